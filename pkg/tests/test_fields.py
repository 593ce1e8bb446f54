import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eulerlab import grid as g
from eulerlab.fields import (
    ScalarField, VectorField, SymTensorField, AltPotential4,
    biot_savart_arr, derivative, leray_project, leray_project_arr,
    traceless_outer,
)
from conftest import random_band_limited, random_solenoidal

TWO_PI = 2 * np.pi


def test_gridspec_validation():
    with pytest.raises(ValueError):
        g.GridSpec(7)
    with pytest.raises(ValueError):
        g.GridSpec(6)
    with pytest.raises(ValueError):
        g.GridSpec(16, dealias_fraction=0.0)
    gr = g.GridSpec(16)
    assert gr.xs[1] == pytest.approx(1 / 16)


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([16, 32, 64]), st.integers(0, 2**31))
def test_round_trip(n, seed):
    gr = g.GridSpec(n)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, n, n))
    f = ScalarField(gr, u)
    back = f.to_spectral().to_physical()
    assert np.abs(back.data - u).max() <= 1e-12 * max(1, np.abs(u).max())


def test_derivative_single_mode(grid32):
    X, Y, Z = grid32.mesh()
    f = ScalarField(grid32, np.sin(TWO_PI * X))
    df = derivative(f, 0)
    assert np.abs(df.data - TWO_PI * np.cos(TWO_PI * X)).max() < 1e-10


def test_derivative_constant(grid16):
    f = ScalarField(grid16, np.full((16,) * 3, 3.7))
    assert np.abs(derivative(f, 0).data).max() < 1e-12


def test_mixed_partials_commute(grid32):
    X, Y, _ = grid32.mesh()
    f = np.sin(TWO_PI * X) * np.sin(TWO_PI * Y)
    d12 = g.deriv(grid32, g.deriv(grid32, f, 0), 1)
    d21 = g.deriv(grid32, g.deriv(grid32, f, 1), 0)
    assert np.abs(d12 - d21).max() < 1e-12 * np.abs(d12).max()


def test_leray_kills_gradients(grid32):
    rng = np.random.default_rng(0)
    phi = random_band_limited(grid32, (), 5, rng, zero_mean=True)
    v = g.grad(grid32, phi)
    out = leray_project(VectorField(grid32, v))
    assert np.abs(out.data).max() < 1e-12 * max(1.0, np.abs(v).max())


def test_leray_identity_on_solenoidal(grid32):
    rng = np.random.default_rng(1)
    v = random_solenoidal(grid32, 6, rng)
    out = leray_project_arr(grid32, v)
    assert np.abs(out - v).max() < 1e-12


def test_leray_splits_sum(grid32):
    rng = np.random.default_rng(2)
    phi = random_band_limited(grid32, (), 5, rng, zero_mean=True)
    w = random_solenoidal(grid32, 5, rng)
    v = g.grad(grid32, phi) + w
    out = leray_project_arr(grid32, v)
    assert np.abs(out - w).max() < 1e-11


def test_leray_idempotent_and_self_adjoint(grid32):
    rng = np.random.default_rng(3)
    u = random_band_limited(grid32, (3,), 8, rng)
    w = random_band_limited(grid32, (3,), 8, rng)
    Pu = leray_project_arr(grid32, u)
    PPu = leray_project_arr(grid32, Pu)
    assert np.abs(PPu - Pu).max() < 1e-10 * np.abs(Pu).max()
    lhs = (leray_project_arr(grid32, u) * w).sum()
    rhs = (u * leray_project_arr(grid32, w)).sum()
    assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), 1.0)


def test_biot_savart_single_mode(grid32):
    X, Y, Z = grid32.mesh()
    v = np.stack([np.sin(TWO_PI * Y), np.zeros_like(Y), np.zeros_like(Y)])
    z = biot_savart_arr(grid32, v)
    z_exact = np.stack([np.zeros_like(Y), np.zeros_like(Y), -np.cos(TWO_PI * Y) / TWO_PI])
    assert np.abs(z - z_exact).max() < 1e-12
    assert np.abs(g.curl(grid32, z) - v).max() < 1e-11


def test_biot_savart_constant_field(grid16):
    v = np.zeros((3, 16, 16, 16))
    v[0] = 2.5
    z = biot_savart_arr(grid16, v)
    assert np.abs(z).max() < 1e-13


def test_biot_savart_identity_random(grid32):
    rng = np.random.default_rng(4)
    v = random_solenoidal(grid32, 7, rng)
    z = biot_savart_arr(grid32, v)
    vbar = v - v.mean(axis=(1, 2, 3), keepdims=True)
    assert np.abs(g.curl(grid32, z) - vbar).max() < 1e-10
    assert np.abs(g.div(grid32, z)).max() < 1e-10


def test_biot_savart_rejects_nonsolenoidal(grid16):
    rng = np.random.default_rng(5)
    v = random_band_limited(grid16, (3,), 4, rng)
    with pytest.raises(ValueError):
        biot_savart_arr(grid16, v)


def test_div_curl_identities(grid32):
    rng = np.random.default_rng(6)
    z = random_band_limited(grid32, (3,), 8, rng)
    phi = random_band_limited(grid32, (), 8, rng)
    assert np.abs(g.div(grid32, g.curl(grid32, z))).max() < 1e-12 * np.abs(z).max() * grid32.n
    assert np.abs(g.curl(grid32, g.grad(grid32, phi))).max() < 1e-12 * np.abs(phi).max() * grid32.n


def test_traceless_outer_trace_vanishes(grid16):
    rng = np.random.default_rng(7)
    u = random_band_limited(grid16, (3,), 4, rng)
    w = random_band_limited(grid16, (3,), 4, rng)
    S = traceless_outer(grid16, u, w)
    assert np.abs(g.trace_sym(S)).max() < 1e-12


def test_operator_norm_le_frobenius(grid16):
    rng = np.random.default_rng(8)
    S6 = random_band_limited(grid16, (6,), 3, rng)
    M = g.sym_to_full(S6)                      # (3,3,n,n,n)
    M_flat = np.moveaxis(M.reshape(3, 3, -1), -1, 0)
    op = np.linalg.norm(M_flat, ord=2, axis=(1, 2))
    fro = np.linalg.norm(M_flat, ord="fro", axis=(1, 2))
    assert np.all(op <= fro + 1e-12)


def test_alt_potential_antisymmetry(grid16):
    rng = np.random.default_rng(9)
    comps = rng.standard_normal((3, 3, 16, 16, 16))
    A = AltPotential4(grid16, comps)
    for (i, k) in ((0, 1), (0, 2), (1, 2)):
        for (j, l) in ((0, 1), (0, 2), (1, 2)):
            assert np.array_equal(A.component(i, k, j, l), -A.component(k, i, j, l))
            assert np.array_equal(A.component(i, k, j, l), -A.component(i, k, l, j))
    assert np.abs(A.component(0, 0, 0, 1)).max() == 0.0


def test_product_exact_when_representable(grid16):
    # product band 2*3=6 <= Nyquist 8: padded product equals the true product
    rng = np.random.default_rng(10)
    a = random_band_limited(grid16, (), 3, rng)
    b = random_band_limited(grid16, (), 3, rng)
    prod = g.product(grid16, a, b)
    fine_a = g.refine(grid16, a, 2)
    fine_b = g.refine(grid16, b, 2)
    fine_prod = g.refine(grid16, prod, 2)
    assert np.abs(fine_prod - fine_a * fine_b).max() < 1e-12


def test_product_is_aliasfree_truncation(grid16):
    # wider bands: the result must equal the spectral truncation of the true product
    rng = np.random.default_rng(12)
    a = random_band_limited(grid16, (), 5, rng)
    b = random_band_limited(grid16, (), 5, rng)
    prod = g.product(grid16, a, b)
    fine = g.refine(grid16, a, 4) * g.refine(grid16, b, 4)
    truncated = g.coarsen(fine, 16)
    assert np.abs(prod - truncated).max() < 1e-12


def test_sym_roundtrip(grid16):
    rng = np.random.default_rng(11)
    S = rng.standard_normal((6, 16, 16, 16))
    assert np.abs(g.full_to_sym(g.sym_to_full(S)) - S).max() == 0.0
