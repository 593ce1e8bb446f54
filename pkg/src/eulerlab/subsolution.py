"""Subsolutions of Euler on a time slab: residuals, transport derivative, mollification.

A subsolution is a triple (v, p, R) with Div v = 0, tr R = 0 and

    d_t v + Div(v (x) v) + grad p = Div R.

Fields are stored as stacked samples over an ordered list of instants.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import grid as g
from .util import bump, gauss_legendre


@dataclass
class Subsolution:
    grid: g.GridSpec
    times: np.ndarray          # (nt,)
    v: np.ndarray              # (nt, 3, n, n, n)
    p: np.ndarray              # (nt, n, n, n)
    R: np.ndarray              # (nt, 6, n, n, n), trace-free

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        nt, n = len(self.times), self.grid.n
        if self.v.shape != (nt, 3, n, n, n) or self.p.shape != (nt, n, n, n) \
                or self.R.shape != (nt, 6, n, n, n):
            raise ValueError("subsolution array shapes are inconsistent")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def nt(self):
        return len(self.times)

    def max_divergence(self):
        return max(np.abs(g.div(self.grid, self.v[k])).max() for k in range(self.nt))

    def max_trace(self):
        return max(np.abs(g.trace_sym(self.R[k])).max() for k in range(self.nt))

    def pressure_means(self):
        """The pressure normalization constants, one per instant."""
        return np.array([g.mean(self.grid, self.p[k]) for k in range(self.nt)])

    def check(self, tol_div=1e-8, tol_trace=1e-10):
        dv, tr = self.max_divergence(), self.max_trace()
        if dv > tol_div:
            raise ValueError(f"velocity is not solenoidal: |Div v| = {dv:.3e}")
        if tr > tol_trace:
            raise ValueError(f"stress is not trace-free: |tr R| = {tr:.3e}")
        return {"max_div": dv, "max_trace": tr}

    def restricted(self, sel):
        return Subsolution(self.grid, self.times[sel], self.v[sel], self.p[sel], self.R[sel])


@dataclass
class EnergyProfile:
    """Smooth positive e(t), supplied as samples plus a cubic interpolation rule."""

    times: np.ndarray
    values: np.ndarray
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values <= 0):
            raise ValueError("energy profile must be positive at all samples")
        self._spline = CubicSpline(self.times, self.values)

    def __call__(self, t):
        return self._spline(t)


def time_derivative(times, fields):
    """Second-order finite difference in t: centered interior, one-sided at ends.

    `fields` has the time axis first; a uniform or nonuniform time grid is fine.
    """
    times = np.asarray(times, dtype=float)
    nt = len(times)
    if nt < 3:
        raise ValueError("need at least 3 time samples")
    out = np.empty_like(fields)
    for k in range(nt):
        if k == 0:
            i, j, l = 0, 1, 2
        elif k == nt - 1:
            i, j, l = nt - 3, nt - 2, nt - 1
        else:
            i, j, l = k - 1, k, k + 1
        ti, tj, tl = times[[i, j, l]] - times[k]
        # weights of the quadratic interpolant's derivative at times[k] (t = 0)
        wi = -(tj + tl) / ((ti - tj) * (ti - tl))
        wj = -(ti + tl) / ((tj - ti) * (tj - tl))
        wl = -(ti + tj) / ((tl - ti) * (tl - tj))
        out[k] = wi * fields[i] + wj * fields[j] + wl * fields[l]
    return out


def advect(gr, v, f, exact=True):
    """v . grad f for a scalar or component-stacked field, alias-controlled."""
    mul = g.product if exact else g.product_23
    fh = g.fftn(f)
    out = np.zeros_like(np.asarray(f, dtype=float))
    for a in range(3):
        dfa = g.ifftn(1j * gr.K[a] * fh)
        out += mul(gr, v[a], dfa)
    return out


def material_derivative(gr, times, f, v, exact=True):
    """D_t f = d_t f + v . grad f on a slab (time axis first for f and v)."""
    if len(times) < 3:
        raise ValueError("need at least 3 time samples")
    dt_f = time_derivative(times, f)
    for k in range(len(times)):
        dt_f[k] += advect(gr, v[k], f[k], exact=exact)
    return dt_f


def subsolution_residual(s: Subsolution, exact=True):
    """d_t v + Div(v (x) v) + grad p - Div R, per instant: (nt, 3, n, n, n)."""
    gr = s.grid
    out = time_derivative(s.times, s.v)
    for k in range(s.nt):
        vv = g.outer_sym(gr, s.v[k], s.v[k], exact=exact)
        out[k] += g.div_sym(gr, vv) + g.grad(gr, s.p[k]) - g.div_sym(gr, s.R[k])
    return out


def residual_norm(s: Subsolution, exact=True):
    return np.abs(subsolution_residual(s, exact=exact)).max()


# ---------------------------------------------------------------------------
# mollification

_SYMBOL_CACHE = {}


def mollifier_symbol(kappa, nodes=800):
    """Fourier transform of the unit-mass radial kernel psi supported in B(0,1/2).

    psi(x) = c * exp(-1/(1-|2x|^2)), with c fixed by unit mass.  The transform
    is radial: psi_hat(k) = 4 pi int_0^{1/2} r^2 psi(r) j0(|k| r) dr, evaluated
    by Gauss-Legendre quadrature (the integrand is analytic in r).
    """
    key = nodes
    if key not in _SYMBOL_CACHE:
        r, w = gauss_legendre(nodes, 0.0, 0.5)
        vals = bump(2.0 * r)
        mass = 4.0 * np.pi * np.sum(w * r**2 * vals)
        _SYMBOL_CACHE[key] = (r, w, vals / mass)
    r, w, vals = _SYMBOL_CACHE[key]
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    kr = np.outer(kappa, r)
    j0 = np.ones_like(kr)
    nz = np.abs(kr) > 1e-30
    j0[nz] = np.sin(kr[nz]) / kr[nz]
    out = 4.0 * np.pi * (j0 * (w * r**2 * vals)).sum(axis=1)
    return out if out.size > 1 else out[0]


def mollify_field(gr, u, ell, nodes=800):
    """Convolution with psi_ell = ell^-3 psi(./ell), done by spectral multiplication."""
    kk = np.sqrt(gr.K2)
    uniq = np.unique(kk.ravel())
    symv = np.atleast_1d(mollifier_symbol(uniq * ell, nodes=nodes))
    mult = symv[np.searchsorted(uniq, kk)]
    return g.ifftn(g.fftn(u) * mult)


def mollify_subsolution(s: Subsolution, ell, exact=True):
    """Mollify in space only; the output is again a subsolution.

    v_l = v * psi_l,
    R_l = R * psi_l - (v (x)_o v) * psi_l + v_l (x)_o v_l,
    p_l = p * psi_l + (|v|^2 * psi_l - |v_l|^2) / 3.

    The 1/3 in the pressure matches the trace-free convention for R: with it the
    triple satisfies the equation exactly (checked by the residual tests).
    """
    if not 0.0 < ell < 0.25:
        raise ValueError("mollification length must lie in (0, 1/4)")
    gr = s.grid
    mul = g.product if exact else g.product_23
    v_l = np.empty_like(s.v)
    p_l = np.empty_like(s.p)
    R_l = np.empty_like(s.R)
    for k in range(s.nt):
        v_l[k] = mollify_field(gr, s.v[k], ell)
        vv = g.deviatoric(g.outer_sym(gr, s.v[k], s.v[k], exact=exact))
        vlvl = g.deviatoric(g.outer_sym(gr, v_l[k], v_l[k], exact=exact))
        R_l[k] = mollify_field(gr, s.R[k], ell) - mollify_field(gr, vv, ell) + vlvl
        sq = sum(mul(gr, s.v[k][a], s.v[k][a]) for a in range(3))
        sq_l = sum(mul(gr, v_l[k][a], v_l[k][a]) for a in range(3))
        p_l[k] = mollify_field(gr, s.p[k], ell) + (mollify_field(gr, sq, ell) - sq_l) / 3.0
    return Subsolution(gr, s.times.copy(), v_l, p_l, R_l)
