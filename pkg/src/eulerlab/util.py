"""Smooth bumps, ramps and cutoff primitives shared across modules."""

import numpy as np


def bump(s):
    """C-infinity bump exp(-1/(1-s^2)) on |s|<1, zero outside (unnormalized)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


def _g(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = s > 0
    out[m] = np.exp(-1.0 / s[m])
    return out


def smoothstep(s):
    """C-infinity monotone ramp: 0 for s<=0, 1 for s>=1."""
    a = _g(s)
    return a / (a + _g(1.0 - np.asarray(s, dtype=float)))


def plateau(u, lo, hi, ramp):
    """C-infinity window: 1 on [lo,hi], 0 outside (lo-ramp, hi+ramp)."""
    u = np.asarray(u, dtype=float)
    return smoothstep((u - (lo - ramp)) / ramp) * smoothstep(((hi + ramp) - u) / ramp)


def mollifier_samples(r, radius=0.5):
    """Radial C_c^infinity kernel on |x| < radius, unnormalized values at radii r."""
    return bump(np.asarray(r, dtype=float) / radius)


def gauss_legendre(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w
