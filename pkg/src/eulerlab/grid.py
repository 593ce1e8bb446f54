"""Uniform periodic grids on the unit torus [0,1)^3 and FFT-based calculus.

All fields are sampled at x_j = j/n per axis and stored row-major with any
component axes leading, i.e. shapes (n,n,n), (3,n,n,n), (6,n,n,n).
Symmetric 2-tensors keep the six independent components in the order
(11, 22, 33, 12, 13, 23).
"""

import numpy as np
import scipy.fft as sfft

TWO_PI = 2.0 * np.pi

# symmetric-tensor component order and lookup (i,j) -> slot
SYM_IDX = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
SYM_SLOT = {(0, 0): 0, (1, 1): 1, (2, 2): 2,
            (0, 1): 3, (1, 0): 3, (0, 2): 4, (2, 0): 4, (1, 2): 5, (2, 1): 5}


class GridSpec:
    """Uniform n^3 grid on the unit 3-torus with cached spectral machinery."""

    def __init__(self, n, dealias_fraction=2.0 / 3.0):
        if n % 2 != 0 or n < 8:
            raise ValueError(f"n_per_axis must be even and >= 8, got {n}")
        if not 0.0 < dealias_fraction <= 1.0:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        self.n = int(n)
        self.dealias_fraction = float(dealias_fraction)
        self.h = 1.0 / n

        self.modes = sfft.fftfreq(n, d=1.0 / n).astype(np.int64)  # integer frequencies
        m = self.modes.astype(float)
        # broadcastable wavevector components, k = 2*pi*m
        self.KX = TWO_PI * m[:, None, None]
        self.KY = TWO_PI * m[None, :, None]
        self.KZ = TWO_PI * m[None, None, :]
        self.K = (self.KX, self.KY, self.KZ)
        self.K2 = self.KX**2 + self.KY**2 + self.KZ**2
        inv = np.zeros_like(self.K2)
        nz = self.K2 > 0
        inv[nz] = 1.0 / self.K2[nz]
        self.invK2 = inv

        cutoff = dealias_fraction * (n // 2)
        keep1 = np.abs(self.modes) <= cutoff
        self.dealias_mask = (keep1[:, None, None]
                             & keep1[None, :, None]
                             & keep1[None, None, :])

        self.xs = np.arange(n) / n
        self._mesh = None

    def __repr__(self):
        return f"GridSpec(n={self.n}, dealias_fraction={self.dealias_fraction:.4f})"

    def __eq__(self, other):
        return (isinstance(other, GridSpec) and other.n == self.n
                and other.dealias_fraction == self.dealias_fraction)

    def __hash__(self):
        return hash((self.n, self.dealias_fraction))

    def mesh(self):
        """Coordinate arrays X, Y, Z of shape (n,n,n), values in [0,1)."""
        if self._mesh is None:
            self._mesh = np.meshgrid(self.xs, self.xs, self.xs, indexing="ij")
        return self._mesh

    def mesh_centered(self):
        """Coordinates with the representative in [-1/2, 1/2) per axis."""
        return [((c + 0.5) % 1.0) - 0.5 for c in self.mesh()]


def fftn(u):
    """Forward FFT over the last three axes (leading component axes pass through)."""
    return sfft.fftn(u, axes=(-3, -2, -1), workers=-1)


def ifftn(uh, real=True):
    out = sfft.ifftn(uh, axes=(-3, -2, -1), workers=-1)
    return out.real if real else out


def deriv(grid, u, axis):
    """Exact spectral derivative along one axis (physical in, physical out)."""
    return ifftn(1j * grid.K[axis] * fftn(u))


def grad(grid, f):
    fh = fftn(f)
    return np.stack([ifftn(1j * grid.K[a] * fh) for a in range(3)])


def div(grid, v):
    vh = fftn(v)
    return ifftn(1j * (grid.KX * vh[0] + grid.KY * vh[1] + grid.KZ * vh[2]))


def curl(grid, v):
    vh = fftn(v)
    kx, ky, kz = grid.K
    wx = 1j * (ky * vh[2] - kz * vh[1])
    wy = 1j * (kz * vh[0] - kx * vh[2])
    wz = 1j * (kx * vh[1] - ky * vh[0])
    return ifftn(np.stack([wx, wy, wz]))


def laplacian(grid, u):
    return ifftn(-grid.K2 * fftn(u))


def inv_laplacian(grid, u):
    """Zero-mean solution of Laplace(phi) = u; the k=0 mode is dropped."""
    return ifftn(-grid.invK2 * fftn(u))


def mean(grid, u):
    """Torus average over the spatial axes."""
    return u.mean(axis=(-3, -2, -1))


def sym_get(S, i, j):
    return S[SYM_SLOT[(i, j)]]


def sym_to_full(S):
    """(6,...) -> (3,3,...) full symmetric matrix field."""
    out = np.empty((3, 3) + S.shape[1:], dtype=S.dtype)
    for i in range(3):
        for j in range(3):
            out[i, j] = S[SYM_SLOT[(i, j)]]
    return out


def full_to_sym(M):
    """(3,3,...) -> (6,...), symmetrizing."""
    out = np.empty((6,) + M.shape[2:], dtype=M.dtype)
    for s, (i, j) in enumerate(SYM_IDX):
        out[s] = 0.5 * (M[i, j] + M[j, i])
    return out


def div_sym(grid, S):
    """Divergence of a symmetric tensor stored as (6,n,n,n): (Div S)_i = d_j S_ij."""
    Sh = fftn(S)
    out = np.empty((3, grid.n, grid.n, grid.n))
    for i in range(3):
        acc = np.zeros_like(Sh[0])
        for j in range(3):
            acc += 1j * grid.K[j] * Sh[SYM_SLOT[(i, j)]]
        out[i] = ifftn(acc)
    return out


def sym_grad(grid, v):
    """Symmetric gradient of a vector field, as a (6,...) tensor."""
    vh = fftn(v)
    out = np.empty((6, grid.n, grid.n, grid.n))
    for s, (i, j) in enumerate(SYM_IDX):
        out[s] = ifftn(0.5j * (grid.K[j] * vh[i] + grid.K[i] * vh[j]))
    return out


def trace_sym(S):
    return S[0] + S[1] + S[2]


def deviatoric(S):
    """Remove the pointwise trace: S - (tr S / 3) Id."""
    t = trace_sym(S) / 3.0
    out = S.copy()
    out[0] -= t
    out[1] -= t
    out[2] -= t
    return out


def dealias(grid, u):
    """Apply the grid's 2/3-rule mask in spectral space."""
    return ifftn(fftn(u) * grid.dealias_mask)


# ---------------------------------------------------------------------------
# exact (zero-padded) products

def _band_indices(n_small, n_big):
    half = n_small // 2
    lo = np.arange(0, half)
    hi = np.arange(n_big - half, n_big)
    return np.concatenate([lo, hi]), np.concatenate([np.arange(0, half), np.arange(n_small - half, n_small)])


def pad_spectrum(uh, n_big):
    """Embed an n^3 spectrum into an n_big^3 spectrum (zero padding)."""
    n = uh.shape[-1]
    big_idx, small_idx = _band_indices(n, n_big)
    out = np.zeros(uh.shape[:-3] + (n_big,) * 3, dtype=uh.dtype)
    out[..., big_idx[:, None, None], big_idx[None, :, None], big_idx[None, None, :]] = \
        uh[..., small_idx[:, None, None], small_idx[None, :, None], small_idx[None, None, :]]
    return out


def crop_spectrum(uh, n_small):
    """Keep only the modes representable on an n_small^3 grid."""
    n = uh.shape[-1]
    big_idx, small_idx = _band_indices(n_small, n)
    out = np.zeros(uh.shape[:-3] + (n_small,) * 3, dtype=uh.dtype)
    out[..., small_idx[:, None, None], small_idx[None, :, None], small_idx[None, None, :]] = \
        uh[..., big_idx[:, None, None], big_idx[None, :, None], big_idx[None, None, :]]
    return out


def refine(grid, u, factor=2):
    """Trigonometric interpolation of samples onto a finer grid."""
    n_big = int(round(grid.n * factor))
    scale = (n_big / grid.n) ** 3
    return ifftn(pad_spectrum(fftn(u), n_big)) * scale


def coarsen(u, n_small):
    """Spectral restriction of samples onto a coarser grid."""
    n = u.shape[-1]
    scale = (n_small / n) ** 3
    return ifftn(crop_spectrum(fftn(u), n_small)) * scale


def product(grid, a, b):
    """Alias-free pointwise product via 3/2-rule zero padding.

    The result is the exact trigonometric product truncated to the grid band,
    so identities built from products hold to rounding for band-limited inputs.
    """
    n = grid.n
    n_big = (3 * n) // 2
    if n_big % 2:
        n_big += 1
    ah = pad_spectrum(fftn(a), n_big)
    bh = pad_spectrum(fftn(b), n_big)
    scale = (n_big / n) ** 3
    prod = (ifftn(ah) * scale) * (ifftn(bh) * scale)
    return ifftn(crop_spectrum(fftn(prod), n)) * (n / n_big) ** 3


def product_23(grid, a, b):
    """2/3-rule product: truncate both factors, multiply on the grid, truncate."""
    mask = grid.dealias_mask
    ta = ifftn(fftn(a) * mask)
    tb = ifftn(fftn(b) * mask)
    return ifftn(fftn(ta * tb) * mask)


def outer_sym(grid, u, w, exact=True):
    """Symmetric part of u (x) w as a (6,...) tensor, alias-free by default."""
    mul = product if exact else product_23
    out = np.empty((6, grid.n, grid.n, grid.n))
    for s, (i, j) in enumerate(SYM_IDX):
        if i == j:
            out[s] = mul(grid, u[i], w[j])
        else:
            out[s] = 0.5 * (mul(grid, u[i], w[j]) + mul(grid, u[j], w[i]))
    return out
