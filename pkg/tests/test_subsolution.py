import numpy as np
import pytest

from eulerlab import grid as g
from eulerlab.subsolution import (
    Subsolution, EnergyProfile, advect, material_derivative,
    mollifier_symbol, mollify_field, mollify_subsolution,
    residual_norm, subsolution_residual, time_derivative,
)
from eulerlab.synth import (
    manufactured_subsolution, quadratic_velocity_path, shear_flow,
    steady_subsolution, random_solenoidal,
)

TWO_PI = 2 * np.pi


def test_time_derivative_exact_on_quadratics():
    times = np.linspace(0.0, 1.0, 7)
    f = np.stack([3.0 + 2.0 * t - 5.0 * t**2 + np.zeros((2, 2)) for t in times])
    df = time_derivative(times, f)
    expected = np.stack([2.0 - 10.0 * t + np.zeros((2, 2)) for t in times])
    assert np.abs(df - expected).max() < 1e-12


def test_material_derivative_zero_velocity(grid16):
    times = np.linspace(0, 0.3, 5)
    rng = np.random.default_rng(0)
    base = rng.standard_normal((16, 16, 16))
    f = np.stack([np.cos(t) * base for t in times])
    v = np.zeros((len(times), 3, 16, 16, 16))
    out = material_derivative(grid16, times, f, v)
    expected = time_derivative(times, f)
    assert np.abs(out - expected).max() < 1e-14


def test_advection_closed_form(grid32):
    X, Y, _ = grid32.mesh()
    v = np.zeros((3, 32, 32, 32))
    v[0] = np.sin(TWO_PI * Y)
    f = np.sin(TWO_PI * X)
    out = advect(grid32, v, f)
    expected = np.sin(TWO_PI * Y) * TWO_PI * np.cos(TWO_PI * X)
    assert np.abs(out - expected).max() < 1e-11


def test_material_derivative_transported_solution(grid32):
    # f(x, t) = f0(x - c t) transported by constant velocity c: D_t f = 0,
    # residual comes only from the time stencil and is O(dt^2)
    c = np.array([1.0, 0.0, 0.0])
    X, _, _ = grid32.mesh()

    def make(dt):
        times = np.arange(5) * dt
        f = np.stack([np.sin(TWO_PI * (X - c[0] * t)) for t in times])
        v = np.zeros((5, 3, 32, 32, 32))
        v[:, 0] = c[0]
        return np.abs(material_derivative(grid32, times, f, v)).max()

    r1 = make(2e-2)
    r2 = make(1e-2)
    assert r1 / r2 == pytest.approx(4.0, rel=0.2)


def test_zero_subsolution_residual(grid16):
    times = np.linspace(0, 1, 4)
    s = Subsolution(grid16, times,
                    np.zeros((4, 3, 16, 16, 16)),
                    np.zeros((4, 16, 16, 16)),
                    np.zeros((4, 6, 16, 16, 16)))
    assert residual_norm(s) == 0.0


def test_steady_shear_with_stress_is_subsolution(grid32):
    v = shear_flow(grid32)
    s = steady_subsolution(grid32, np.linspace(0, 1, 3), v)
    s.check()
    assert residual_norm(s) < 1e-10


def test_manufactured_subsolution_residual(grid16):
    rng = np.random.default_rng(1)
    v_of_t = quadratic_velocity_path(grid16, 3, rng, amp=0.3)
    s = manufactured_subsolution(grid16, np.linspace(0, 0.5, 6), v_of_t)
    s.check(tol_div=1e-10, tol_trace=1e-12)
    assert residual_norm(s) < 1e-10


def test_mollifier_symbol_against_quad():
    from scipy.integrate import quad

    def psi(r):
        return np.exp(-1.0 / (1.0 - (2 * r)**2)) if 2 * r < 1 else 0.0

    mass = quad(lambda r: 4 * np.pi * r**2 * psi(r), 0, 0.5, limit=200)[0]
    for kappa in (0.0, 3.0, 17.0, 60.0):
        if kappa == 0:
            expected = 1.0
        else:
            expected = quad(lambda r: 4 * np.pi * r**2 * psi(r) * np.sinc(kappa * r / np.pi),
                            0, 0.5, limit=200)[0] / mass
        assert mollifier_symbol(kappa) == pytest.approx(expected, abs=1e-12)


def test_mollify_single_mode_matches_symbol(grid32):
    X, _, _ = grid32.mesh()
    v = np.sin(TWO_PI * 3 * X)
    ell = 0.1
    out = mollify_field(grid32, v, ell)
    factor = mollifier_symbol(ell * TWO_PI * 3)
    assert np.abs(out - factor * v).max() < 1e-12


def test_mollify_constant_subsolution_unchanged(grid16):
    times = np.linspace(0, 1, 3)
    v = np.zeros((3, 3, 16, 16, 16))
    v[:, 0] = 0.7
    s = Subsolution(grid16, times, v, np.full((3, 16, 16, 16), 1.3),
                    np.zeros((3, 6, 16, 16, 16)))
    out = mollify_subsolution(s, 0.05)
    assert np.abs(out.v - s.v).max() < 1e-13
    assert np.abs(out.p - s.p).max() < 1e-13
    assert np.abs(out.R - s.R).max() < 1e-13


def test_mollify_second_order_in_ell(grid32):
    rng = np.random.default_rng(2)
    v = random_solenoidal(grid32, 3, rng)
    d1 = np.abs(mollify_field(grid32, v, 0.08) - v).max()
    d2 = np.abs(mollify_field(grid32, v, 0.04) - v).max()
    assert d1 / d2 == pytest.approx(4.0, rel=0.15)


def test_mollified_subsolution_stays_subsolution(grid16):
    rng = np.random.default_rng(3)
    v_of_t = quadratic_velocity_path(grid16, 2, rng, amp=0.3)
    s = manufactured_subsolution(grid16, np.linspace(0, 0.5, 6), v_of_t)
    r_in = residual_norm(s)
    out = mollify_subsolution(s, 0.07)
    out.check(tol_div=1e-10, tol_trace=1e-12)
    assert residual_norm(out) <= r_in + 1e-8


def test_mollify_preserves_any_residual_level(grid16):
    # mollification commutes with the equation: residual_out <= residual_in + tol
    rng = np.random.default_rng(4)
    times = np.linspace(0, 0.4, 5)
    v = np.stack([random_solenoidal(grid16, 2, rng) for _ in times])
    p = np.stack([0.1 * random_solenoidal(grid16, 2, rng)[0] for _ in times])
    R = np.zeros((5, 6, 16, 16, 16))
    s = Subsolution(grid16, times, v, p, R)   # not a subsolution: O(1) residual
    r_in = residual_norm(s)
    r_out = residual_norm(mollify_subsolution(s, 0.06))
    assert r_out <= r_in + 1e-8


def test_energy_profile_positive():
    with pytest.raises(ValueError):
        EnergyProfile(np.linspace(0, 1, 5), np.array([1, 1, -0.5, 1, 1.0]))
    e = EnergyProfile(np.linspace(0, 1, 5), np.array([1, 1.1, 1.3, 1.2, 1.0]))
    assert e(0.5) > 0
