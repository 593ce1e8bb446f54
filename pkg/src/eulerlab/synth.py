"""Manufactured fields and subsolutions used by tests, demos and golden fixtures."""

import numpy as np

from . import grid as g
from .div_inverse import r_operator
from .fields import leray_project_arr
from .subsolution import Subsolution


def random_band_limited(gr, shape, kmax, rng, zero_mean=False):
    """Random real field with modes inside |m_i| <= kmax, normalized to sup 1."""
    out_shape = tuple(shape) + (gr.n,) * 3
    keep = np.abs(gr.modes) <= kmax
    mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    spec = (rng.standard_normal(out_shape) + 1j * rng.standard_normal(out_shape)) * mask
    phys = g.ifftn(spec)
    if zero_mean:
        phys -= phys.mean(axis=(-3, -2, -1), keepdims=True)
    scale = np.abs(phys).max()
    return phys / scale if scale > 0 else phys


def random_solenoidal(gr, kmax, rng):
    v = random_band_limited(gr, (3,), kmax, rng, zero_mean=True)
    return leray_project_arr(gr, v)


def manufactured_subsolution(gr, times, v_of_t, p_of_t=None):
    """Exact discrete subsolution from a velocity path polynomial in t of degree <= 2.

    v_of_t(t) must return a solenoidal field whose time dependence is at most
    quadratic, so the second-order time stencil reproduces d_t v exactly; the
    stress is R = deviatoric(r_operator(d_t v + Div(v (x) v) + grad p0)) and the
    trace correction moves into the pressure.  The residual of the result is
    zero to rounding, at any time sampling.
    """
    times = np.asarray(times, dtype=float)
    nt = len(times)
    n = gr.n
    v = np.stack([v_of_t(t) for t in times])
    p0 = np.zeros((nt, n, n, n)) if p_of_t is None else np.stack([p_of_t(t) for t in times])

    # exact d_t v from the quadratic path through three samples
    if nt >= 3:
        t0, t1, t2 = times[0], times[(nt - 1) // 2 if nt > 3 else 1], times[-1]
        v0, v1, v2 = v_of_t(t0), v_of_t(t1), v_of_t(t2)
        # Lagrange derivative coefficients: v(t) = sum v_i l_i(t)
        def dv_dt(t):
            d0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2))
            d1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2))
            d2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1))
            return d0 * v0 + d1 * v1 + d2 * v2
    else:
        def dv_dt(t):
            return np.zeros((3, n, n, n))

    p = np.empty_like(p0)
    R = np.empty((nt, 6, n, n, n))
    for k, t in enumerate(times):
        f = dv_dt(t) + g.div_sym(gr, g.outer_sym(gr, v[k], v[k])) + g.grad(gr, p0[k])
        Rfull = r_operator(gr, f)
        tr = g.trace_sym(Rfull) / 3.0
        R[k] = Rfull
        R[k, 0] -= tr
        R[k, 1] -= tr
        R[k, 2] -= tr
        p[k] = p0[k] - tr
    return Subsolution(gr, times, v, p, R)


def quadratic_velocity_path(gr, kmax, rng, amp=0.1):
    """Solenoidal v(t) = a + t b + t^2 c with random band-limited coefficients."""
    a = amp * random_solenoidal(gr, kmax, rng)
    b = amp * random_solenoidal(gr, kmax, rng)
    c = amp * random_solenoidal(gr, kmax, rng)

    def v_of_t(t):
        return a + t * b + t**2 * c

    return v_of_t


def shear_flow(gr, amplitude=1.0):
    """Steady shear (A sin(2 pi x2), 0, 0): an exact Euler solution with p = 0."""
    _, Y, _ = gr.mesh()
    v = np.zeros((3, gr.n, gr.n, gr.n))
    v[0] = amplitude * np.sin(g.TWO_PI * Y)
    return v


def steady_subsolution(gr, times, v, R6=None):
    """Subsolution with time-independent fields; v steady Euler (e.g. shear), R opt."""
    times = np.asarray(times, dtype=float)
    nt, n = len(times), gr.n
    if R6 is None:
        R6 = np.zeros((6, n, n, n))
    f = g.div_sym(gr, g.outer_sym(gr, v, v)) - g.div_sym(gr, R6)
    Rextra = r_operator(gr, f)
    Rtot = R6 + Rextra
    tr = g.trace_sym(Rtot) / 3.0
    Rtot = Rtot.copy()
    Rtot[0] -= tr
    Rtot[1] -= tr
    Rtot[2] -= tr
    return Subsolution(
        gr, times,
        np.broadcast_to(v, (nt, 3, n, n, n)).copy(),
        np.broadcast_to(-tr, (nt, n, n, n)).copy(),
        np.broadcast_to(Rtot, (nt, 6, n, n, n)).copy(),
    )
