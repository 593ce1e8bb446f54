"""Typed periodic fields and the basic vector-calculus operations on them.

The heavy lifting happens on bare numpy arrays (see grid.py); these classes
carry the grid, the component layout and the physical/spectral tag so that
file IO and interface code can stay honest about what an array means.
"""

from dataclasses import dataclass, field

import numpy as np

from . import grid as g

PHYSICAL = "physical"
SPECTRAL = "spectral"


@dataclass
class _Field:
    grid: g.GridSpec
    data: np.ndarray
    rep: str = PHYSICAL

    ncomp = 1

    def __post_init__(self):
        n = self.grid.n
        want = (n, n, n) if self.ncomp == 1 else (self.ncomp, n, n, n)
        if self.data.shape != want:
            raise ValueError(f"expected shape {want}, got {self.data.shape}")
        if self.rep not in (PHYSICAL, SPECTRAL):
            raise ValueError(f"unknown representation {self.rep!r}")

    def to_physical(self):
        if self.rep == PHYSICAL:
            return self
        return type(self)(self.grid, g.ifftn(self.data), PHYSICAL)

    def to_spectral(self):
        if self.rep == SPECTRAL:
            return self
        return type(self)(self.grid, g.fftn(self.data.astype(float)), SPECTRAL)

    @property
    def values(self):
        """Physical samples regardless of stored representation."""
        return self.to_physical().data


class ScalarField(_Field):
    ncomp = 1


class VectorField(_Field):
    ncomp = 3


class SymTensorField(_Field):
    """Symmetric 2-tensor, six independent components (11,22,33,12,13,23)."""
    ncomp = 6


@dataclass
class AltPotential4:
    """Potential A^{ik}_{jl}, antisymmetric in (i,k) and in (j,l).

    Only the nine independent components are stored: comps[a, b] holds
    A^{ik}_{jl} for (i,k) = PAIRS[a], (j,l) = PAIRS[b]; all other index
    combinations follow by antisymmetry, so the storage enforces it.
    """

    PAIRS = ((0, 1), (0, 2), (1, 2))

    grid: g.GridSpec
    comps: np.ndarray  # shape (3, 3, n, n, n)

    def __post_init__(self):
        n = self.grid.n
        if self.comps.shape != (3, 3, n, n, n):
            raise ValueError(f"expected shape (3,3,{n},{n},{n})")

    def component(self, i, k, j, l):
        """A^{ik}_{jl} with signs resolved from the stored independent block."""
        if i == k or j == l:
            return np.zeros((self.grid.n,) * 3)
        s = 1.0
        if i > k:
            i, k, s = k, i, -s
        if j > l:
            j, l, s = l, j, -s
        a = self.PAIRS.index((i, k))
        b = self.PAIRS.index((j, l))
        return s * self.comps[a, b]


@dataclass
class SupportMask:
    """Indicator of a set of grid cells, with an optional signed distance field."""

    grid: g.GridSpec
    indicator: np.ndarray
    signed_distance: np.ndarray | None = None

    def __post_init__(self):
        self.indicator = self.indicator.astype(bool)
        if self.indicator.shape != (self.grid.n,) * 3:
            raise ValueError("mask shape does not match grid")

    @property
    def volume(self):
        return self.indicator.mean()

    def complement_nonempty(self):
        return not self.indicator.all()

    def nonempty(self):
        return bool(self.indicator.any())


def derivative(f: _Field, axis: int) -> _Field:
    """Exact spectral partial derivative along one axis."""
    fh = f.to_spectral().data
    out = 1j * f.grid.K[axis] * fh
    return type(f)(f.grid, out, SPECTRAL).to_physical() if f.rep == PHYSICAL \
        else type(f)(f.grid, out, SPECTRAL)


def leray_project(v: VectorField) -> VectorField:
    """L2-orthogonal projection onto divergence-free fields (mean preserved)."""
    vh = v.to_spectral().data
    out = leray_project_spec(v.grid, vh)
    res = VectorField(v.grid, out, SPECTRAL)
    return res.to_physical() if v.rep == PHYSICAL else res


def leray_project_spec(gr, vh):
    kdotv = gr.KX * vh[0] + gr.KY * vh[1] + gr.KZ * vh[2]
    out = np.empty_like(vh)
    for a in range(3):
        out[a] = vh[a] - gr.K[a] * kdotv * gr.invK2
    return out


def leray_project_arr(gr, v):
    """Array-level Leray projection (physical in, physical out)."""
    return g.ifftn(leray_project_spec(gr, g.fftn(v)))


def biot_savart_arr(gr, v, tol_div=1e-8):
    """Vector potential z = (-Lap)^{-1} curl v with Div z = 0, curl z = v - mean v.

    Rejects inputs whose divergence exceeds tol_div relative to the field size.
    """
    dv = g.div(gr, v)
    scale = max(np.abs(v).max(), 1.0)
    if np.abs(dv).max() > tol_div * scale:
        raise ValueError(f"biot_savart needs a solenoidal field; |Div v| = {np.abs(dv).max():.3e}")
    vh = g.fftn(v)
    kx, ky, kz = gr.K
    cx = 1j * (ky * vh[2] - kz * vh[1])
    cy = 1j * (kz * vh[0] - kx * vh[2])
    cz = 1j * (kx * vh[1] - ky * vh[0])
    return g.ifftn(np.stack([cx, cy, cz]) * gr.invK2)


def biot_savart(v: VectorField, tol_div=1e-8) -> VectorField:
    z = biot_savart_arr(v.grid, v.values, tol_div=tol_div)
    return VectorField(v.grid, z)


def traceless_outer(gr, u, w, exact=True):
    """u (x)_o w: the traceless symmetric part of the alias-free product."""
    return g.deviatoric(g.outer_sym(gr, u, w, exact=exact))
