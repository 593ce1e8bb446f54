"""Grid estimators for Hölder and negative-order Besov norms.

Both are sampled estimators: derivative sup-norms use exact spectral
derivatives, seminorms sample difference quotients along axis directions at
all strides >= one grid spacing.  They are lower bounds of the true norms.
"""

import itertools

import numpy as np

from . import grid as g


def _multi_indices(order):
    """All multi-indices of the given total order, as sorted axis tuples."""
    return sorted(set(itertools.combinations_with_replacement(range(3), order)))


def _apply_multi(gr, uh, beta):
    mult = np.ones_like(uh)
    for a in beta:
        mult = mult * (1j * gr.K[a])
    return g.ifftn(uh * mult)


def holder_seminorm_int(gr, f, order):
    """[f]_N = max over |beta| = N of sup |D^beta f| (exact derivatives, grid sup)."""
    if order == 0:
        return float(np.abs(f).max())
    fh = g.fftn(np.asarray(f, dtype=float))
    return max(float(np.abs(_apply_multi(gr, fh, b)).max()) for b in _multi_indices(order))


def holder_seminorm_frac(gr, f, order, alpha, max_strides=None):
    """[f]_{N+alpha} sampled over axis-aligned grid pairs with |x-y| >= h."""
    fh = g.fftn(np.asarray(f, dtype=float))
    derivs = [_apply_multi(gr, fh, b) for b in _multi_indices(order)] if order \
        else [np.asarray(f, dtype=float)]
    n = gr.n
    strides = range(1, n // 2 + 1) if max_strides is None else range(1, max_strides + 1)
    best = 0.0
    for d in derivs:
        for s in strides:
            dist = min(s, n - s) * gr.h
            for ax in range(3):
                diff = np.abs(d - np.roll(d, s, axis=ax)).max()
                best = max(best, diff / dist**alpha)
    return float(best)


def holder_norm(gr, f, N, alpha, max_strides=None):
    """||f||_{N+alpha} = sum_{j<=N} [f]_j + [f]_{N+alpha} (estimated from samples)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    if N > 4:
        raise ValueError("N <= 4: higher spectral derivatives amplify grid noise")
    f = np.asarray(f, dtype=float)
    total = sum(holder_seminorm_int(gr, f, j) for j in range(N + 1))
    return total + holder_seminorm_frac(gr, f, N, alpha, max_strides=max_strides)


def holder_norm_field(gr, f, N, alpha, max_strides=None):
    """Hölder norm of a multi-component field: max over components."""
    f = np.asarray(f, dtype=float)
    if f.ndim == 3:
        return holder_norm(gr, f, N, alpha, max_strides=max_strides)
    return max(holder_norm(gr, c, N, alpha, max_strides=max_strides) for c in f)


# ---------------------------------------------------------------------------
# Littlewood-Paley blocks and the B^{-1+alpha}_{inf,inf} estimator

def _lp_lowpass(s):
    """Smooth cut: 1 for s <= 1, 0 for s >= 2 (C-infinity in between)."""
    from .util import smoothstep
    return 1.0 - smoothstep(np.asarray(s, dtype=float) - 1.0)


def lp_block_multipliers(gr, jmax=None):
    """Dyadic multipliers phi_j(|m|) = chi(|m|/2^j) - chi(|m|/2^(j-1)), j = 0..jmax.

    A pure mode |m| = 2^j lands fully in block j.  The mean (m = 0) is treated
    separately by the norm.
    """
    mm = np.sqrt(gr.K2) / g.TWO_PI  # integer mode magnitude
    if jmax is None:
        jmax = int(np.ceil(np.log2(gr.n))) + 1
    chis = [_lp_lowpass(mm / 2.0**j) for j in range(-1, jmax + 1)]
    blocks = []
    for j in range(0, jmax + 1):
        blocks.append(chis[j + 1] - chis[j])
    blocks[0] = chis[1] - (mm == 0)  # block 0 keeps |m| ~ 1 and drops the mean
    return blocks


def besov_norm_minus(gr, f, alpha, jmax=None):
    """sup_j 2^{j(-1+alpha)} ||P_j f||_inf over a smooth dyadic partition."""
    f = np.asarray(f, dtype=float)
    fh = g.fftn(f)
    blocks = lp_block_multipliers(gr, jmax=jmax)
    vals = [abs(float(f.mean()))]
    for j, mult in enumerate(blocks):
        pj = g.ifftn(fh * mult)
        vals.append(2.0 ** (j * (-1.0 + alpha)) * float(np.abs(pj).max()))
    return max(vals)
