"""Inverse-divergence machinery for symmetric stresses on the torus.

Contents: the order(-1) symmetric anti-divergence R, the second-order
potential operator L whose image is divergence-free, Killing-moment
bookkeeping, support-constrained divergence solves (sparse least squares with
the support as a hard constraint), smooth cutoffs, and two small stress
constructors used by the time-interval and self-similar arguments.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, lsmr

from . import grid as g
from .fields import AltPotential4, SupportMask
from .util import bump, smoothstep


class InfeasibleMoments(Exception):
    """Killing moments of the source obstruct a supported divergence solve."""

    def __init__(self, moments, tol):
        self.moments = moments
        self.tol = tol
        super().__init__(f"Killing moments {moments} exceed tolerance {tol:.3e}")


class DivDivNonzero(Exception):
    pass


# ---------------------------------------------------------------------------
# the operators R and L

def r_operator(gr, f, tol_mean=1e-10):
    """Symmetric S with Div S = f: S_ij = Lap^-1(d_i f_j + d_j f_i) - delta_ij Lap^-1 Div f.

    Torus version, k = 0 mode excluded; f must have zero mean.
    """
    fm = np.abs(f.mean(axis=(-3, -2, -1)))
    if fm.max() > tol_mean * max(1.0, np.abs(f).max()):
        raise ValueError(f"r_operator needs a zero-mean field, |mean| = {fm.max():.3e}")
    fh = g.fftn(f)
    divf_h = sum(1j * gr.K[a] * fh[a] for a in range(3))
    out = np.empty((6,) + f.shape[1:])
    for s, (i, j) in enumerate(g.SYM_IDX):
        num = 1j * (gr.K[i] * fh[j] + gr.K[j] * fh[i])
        if i == j:
            num = num - divf_h
        out[s] = g.ifftn(-num * gr.invK2)
    return out


def l_operator(A: AltPotential4):
    """[L(A)]_ij = 0.5 sum_{k,l} d_k d_l (A^{ik}_{jl} + A^{jk}_{il}); symmetric, divergence-free."""
    gr = A.grid
    # cache spectral components of the independent block
    comp_h = {}
    for a, (i, k) in enumerate(AltPotential4.PAIRS):
        for b, (j, l) in enumerate(AltPotential4.PAIRS):
            comp_h[(i, k, j, l)] = g.fftn(A.comps[a, b])

    def spec(i, k, j, l):
        if i == k or j == l:
            return 0.0
        s = 1.0
        if i > k:
            i, k, s = k, i, -s
        if j > l:
            j, l, s = l, j, -s
        return s * comp_h[(i, k, j, l)]

    out = np.empty((6, gr.n, gr.n, gr.n))
    for slot, (i, j) in enumerate(g.SYM_IDX):
        acc = np.zeros((gr.n, gr.n, gr.n), dtype=complex)
        for k in range(3):
            for l in range(3):
                term = spec(i, k, j, l) + spec(j, k, i, l)
                if isinstance(term, float):
                    continue
                acc = acc - gr.K[k] * gr.K[l] * term
        out[slot] = g.ifftn(0.5 * acc)
    return out


# ---------------------------------------------------------------------------
# Killing fields and moments

def killing_basis(gr):
    """The six fields e_1, e_2, e_3, xi_12, xi_13, xi_23 realized on the grid.

    xi_ij = x_i e_j - x_j e_i with x the grid chart [0,1)^3; moments taken
    against these are meaningful for fields supported away from the seam.
    """
    n = gr.n
    X = gr.mesh()
    basis = np.zeros((6, 3, n, n, n))
    for a in range(3):
        basis[a, a] = 1.0
    for s, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
        basis[3 + s, j] = X[i]
        basis[3 + s, i] = -X[j]
    return basis


def killing_moments(gr, f):
    """Quadrature of int f . w for each Killing basis element: six reals."""
    basis = killing_basis(gr)
    return np.array([(f * basis[a]).sum() * gr.h**3 for a in range(6)])


def project_killing_moments(gr, f, mask=None):
    """Remove the Killing moments of f by subtracting fields supported in the mask.

    Used to build feasible test sources; the correction is div-free only for
    the translation part, so this is a fixture helper, not a projection onto
    the solvable set for subsolution purposes.
    """
    basis = killing_basis(gr)
    w = np.ones((gr.n,) * 3) if mask is None else mask.indicator.astype(float)
    fields = [basis[a] * w for a in range(6)]
    G = np.array([[(fa * fb).sum() * gr.h**3 for fb in fields] for fa in fields])
    m = np.array([(f * fa).sum() * gr.h**3 for fa in fields])
    coef = np.linalg.solve(G, m)
    out = f.copy()
    for c, fa in zip(coef, fields):
        out = out - c * fa
    return out


# ---------------------------------------------------------------------------
# masks and cutoffs

def ball_mask(gr, center, radius):
    X, Y, Z = gr.mesh()
    cc = [((c - ctr + 0.5) % 1.0) - 0.5 for c, ctr in zip((X, Y, Z), center)]
    d2 = cc[0]**2 + cc[1]**2 + cc[2]**2
    return SupportMask(gr, d2 <= radius**2)


def dilate_mask(gr, indicator, radius):
    """Periodic dilation by a ball: indicator of {dist(x, A) <= radius}."""
    n = gr.n
    X, Y, Z = gr.mesh_centered()
    ball = (X**2 + Y**2 + Z**2) <= radius**2
    conv = g.ifftn(g.fftn(indicator.astype(float)) * g.fftn(ball.astype(float))).real
    return conv > 0.5  # counts of covered cells; >=1 up to rounding


def build_cutoff(mask: SupportMask, r):
    """Smooth phi in [0,1]: 1 on the mask, supported in mask + B(0, r).

    Construction: dilate the set by r/2, then convolve with a radial bump of
    radius r/2 - h (discrete unit mass), following the mollified-indicator
    recipe.  Requires r >= 4 grid spacings.
    """
    gr = mask.grid
    if r < 4 * gr.h:
        raise ValueError(f"cutoff width {r} below 4 grid spacings ({4 * gr.h})")
    dil = dilate_mask(gr, mask.indicator, r / 2.0)
    X, Y, Z = gr.mesh_centered()
    rad = np.sqrt(X**2 + Y**2 + Z**2)
    ker = bump(rad / max(r / 2.0 - gr.h, gr.h))
    ker /= ker.sum()
    phi = g.ifftn(g.fftn(dil.astype(float)) * g.fftn(ker)).real
    return np.clip(phi, 0.0, 1.0)


# ---------------------------------------------------------------------------
# prescribing Killing moments

def prescribe_moments(mask: SupportMask, r, L, cutoff=None):
    """Divergence-free w(t) supported in the shell {0 < dist(x, mask) < r} with
    prescribed rotation moments L[t, (ij)] and zero translation moments.

    w = Div A with A_kl(x,t) = sum_{i<j} L_ij(t) (E_ij - E_ji)_kl phi(x) / (2 int phi),
    so int xi_ij . w = 2 int A_ij = L_ij exactly (up to quadrature).
    Returns (w, dw_dt_builder) where the same spatial profile lets the caller
    rebuild the exact time derivative from dL/dt.
    """
    gr = mask.grid
    L = np.atleast_2d(np.asarray(L, dtype=float))  # (nt, 3) for pairs (12, 13, 23)
    phi = build_cutoff(mask, r) if cutoff is None else cutoff
    shell_w = shell_field(gr, phi)
    if not np.any(shell_w[0] != 0.0) and not np.any(shell_w[1] != 0.0) and not np.any(shell_w[2] != 0.0):
        raise ValueError("empty shell: the cutoff has no gradient on the grid")
    denom = 2.0 * phi.sum() * gr.h**3

    def build(coef_row):
        w = np.zeros((3, gr.n, gr.n, gr.n))
        for s, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
            c = coef_row[s] / denom
            # A = c (e_i x e_j - e_j x e_i) phi; w_k = A_kl d_l phi -> only rows i, j act
            w[i] += c * shell_w[j]
            w[j] -= c * shell_w[i]
        return w

    out = np.stack([build(row) for row in L])
    return (out[0], build) if out.shape[0] == 1 else (out, build)


def shell_field(gr, phi):
    """grad phi, the spatial profile used by prescribe_moments."""
    return g.grad(gr, phi)


# ---------------------------------------------------------------------------
# support-constrained divergence solve

@dataclass
class DivSolveResult:
    S: np.ndarray                 # (6, n, n, n), zero outside the mask
    residual: float               # ||Div S - f||_2 (grid l2, volume weighted)
    rel_residual: float
    moments: np.ndarray
    moment_tol: float
    iterations: int
    feasible: bool


def divsolve_supported(gr, f, mask: SupportMask, tol=1e-10, maxiter=3000,
                       moment_tol_factor=1e-8, enforce_moments=True):
    """Least-squares S supported in the mask with Div S = f, minimum Frobenius norm.

    The support constraint is hard (unknowns only on cells of the mask); the
    divergence is the grid's spectral operator, so the residual is measured
    against the same Div used everywhere else.  LSMR with zero initial guess
    returns the minimum-norm least-squares solution.
    """
    if not mask.nonempty() or not mask.complement_nonempty():
        raise ValueError("mask and its complement must both be nonempty")
    idx = np.where(mask.indicator.ravel())[0]
    ncell = idx.size
    n = gr.n
    f = np.asarray(f, dtype=float)
    f_l1 = np.abs(f).sum() * gr.h**3
    moment_tol = moment_tol_factor * max(f_l1, 1e-300)
    moments = killing_moments(gr, f)
    feasible = bool(np.abs(moments).max() <= moment_tol)
    if enforce_moments and not feasible:
        raise InfeasibleMoments(moments, moment_tol)

    def matvec(x):
        S = np.zeros((6, n**3))
        S[:, idx] = x.reshape(6, ncell)
        return g.div_sym(gr, S.reshape(6, n, n, n)).ravel()

    def rmatvec(y):
        # adjoint of Div on symmetric fields: minus the symmetric gradient,
        # with the off-diagonal slots doubled (they appear twice in Div)
        v = y.reshape(3, n, n, n)
        Gt = -g.sym_grad(gr, v)
        Gt[3:] *= 2.0
        return Gt.reshape(6, n**3)[:, idx].ravel()

    op = LinearOperator((3 * n**3, 6 * ncell), matvec=matvec, rmatvec=rmatvec)
    sol = lsmr(op, f.ravel(), atol=tol, btol=tol, maxiter=maxiter)
    x, itn = sol[0], sol[2]
    S = np.zeros((6, n**3))
    S[:, idx] = x.reshape(6, ncell)
    S = S.reshape(6, n, n, n)
    res_vec = g.div_sym(gr, S) - f
    res = float(np.sqrt((res_vec**2).sum() * gr.h**3))
    f_l2 = float(np.sqrt((f**2).sum() * gr.h**3))
    return DivSolveResult(S, res, res / max(f_l2, 1e-300), moments, moment_tol,
                          int(itn), feasible)


# ---------------------------------------------------------------------------
# stress constructors

def annihilate_reynolds_at_time(s, t0_index, width, divdiv_tol=1e-8, chi=None):
    """Modify a subsolution so its stress vanishes identically at one sample time.

    Requires Div Div R(., t0) = 0.  The velocity correction is
    w(x,t) = -(t - t0) chi((t - t0)/width) Div R(x, t0); the stress update adds
    the transported-cutoff terms and the quadratic products, and the new trace
    is absorbed into the pressure.  Outside supp R(., t0) x (t0 - width, t0 + width)
    nothing changes.
    """
    from .subsolution import Subsolution
    gr = s.grid
    t0 = s.times[t0_index]
    R0 = s.R[t0_index]
    divR0 = g.div_sym(gr, R0)
    divdiv = g.div(gr, divR0)
    scale = max(np.abs(R0).max(), 1e-300)
    if np.abs(divdiv).max() > divdiv_tol * scale:
        raise DivDivNonzero(f"Div Div R(., t0) = {np.abs(divdiv).max():.3e} exceeds tolerance")

    if chi is None:
        chi, dchi = _default_chi()
    else:
        chi, dchi = chi

    v = s.v.copy()
    p = s.p.copy()
    R = s.R.copy()
    for k in range(s.nt):
        u = (s.times[k] - t0) / width
        c, dc = float(chi(u)), float(dchi(u))
        if c == 0.0 and dc == 0.0:
            continue
        w = -(s.times[k] - t0) * c * divR0
        quad = g.outer_sym(gr, w, s.v[k], exact=True) * 2.0 + g.outer_sym(gr, w, w, exact=True)
        Rnew = R[k] - c * R0 - u * dc * R0 + quad
        tr = g.trace_sym(Rnew) / 3.0
        Rnew[0] -= tr
        Rnew[1] -= tr
        Rnew[2] -= tr
        v[k] = s.v[k] + w
        p[k] = s.p[k] + tr
        R[k] = Rnew
    return Subsolution(gr, s.times.copy(), v, p, R)


def _default_chi():
    """C_c^infinity chi on (-1,1), identically 1 on [-1/2, 1/2], and its derivative."""
    def chi(u):
        return smoothstep(2.0 * (1.0 - abs(u)))

    def dchi(u, eps=1e-6):
        return (chi(u + eps) - chi(u - eps)) / (2 * eps)

    return chi, dchi


def self_similar_stress(gr, U, alpha, pressure=None, support_mask=None, tol_div=1e-8):
    """S = (1+alpha)(x (x) U + U (x) x) - (4+5*alpha) S0 with Div S0 = U via r_operator.

    x is the representative coordinate in [-1/2, 1/2)^3.  Divergences of the
    coordinate factors are taken by the product rule (the derivative on x is
    analytic, the derivative on U spectral), so the reported identities are
    meaningful for any solenoidal U; as a raw grid field S has a seam
    discontinuity unless supp U stays interior, which the optional support
    mask enforces.

    Returns (S, report).  The report carries
      divdiv_max:  | Div Div S |_max, which collapses to
                   Div(-alpha U + (1+alpha) x . grad U) = 0 up to the residual
                   of Div(r_operator(U)) = U,
      momentum_residual_max (when a pressure P is supplied):
                   -alpha U + (1+alpha) x . grad U + Div(U (x) U + P Id) - Div S.
    """
    dv = g.div(gr, U)
    scale = max(np.abs(U).max(), 1.0)
    if np.abs(dv).max() > tol_div * scale:
        raise ValueError("self_similar_stress needs a solenoidal U")
    if np.abs(U.mean(axis=(1, 2, 3))).max() > tol_div * scale:
        raise ValueError("self_similar_stress needs a zero-mean U")
    X = gr.mesh_centered()
    if support_mask is not None:
        outside = ~support_mask.indicator
        if np.abs(U[:, outside]).max() > tol_div * scale:
            raise ValueError("U is not supported in the given mask")
        seam = np.zeros((gr.n,) * 3, dtype=bool)
        for ax in range(3):
            sl = [slice(None)] * 3
            sl[ax] = gr.n // 2
            seam[tuple(sl)] = True
        if np.any(support_mask.indicator & seam):
            raise ValueError("support mask touches the coordinate seam")

    S0 = r_operator(gr, U)
    S = np.empty((6, gr.n, gr.n, gr.n))
    for slot, (i, j) in enumerate(g.SYM_IDX):
        S[slot] = (1.0 + alpha) * (X[i] * U[j] + X[j] * U[i]) - (4.0 + 5.0 * alpha) * S0[slot]

    # product-rule divergence: Div(x (x) U + U (x) x) = 4U + x.grad U + x Div U
    gradU = np.stack([g.grad(gr, U[a]) for a in range(3)])   # gradU[a, b] = d_b U_a
    x_dot_gradU = np.stack([sum(X[b] * gradU[a, b] for b in range(3)) for a in range(3)])
    div_S0 = g.div_sym(gr, S0)
    periodic_part = (1.0 + alpha) * 4.0 * U - (4.0 + 5.0 * alpha) * div_S0
    x_dv = np.stack([X[a] * dv for a in range(3)])
    divS = periodic_part + (1.0 + alpha) * (x_dot_gradU + x_dv)
    # second product-rule divergence: Div(x.grad U) = Div U + x.grad Div U and
    # Div(x Div U) = 3 Div U + x.grad Div U
    gdv = g.grad(gr, dv)
    x_dot_gdv = sum(X[b] * gdv[b] for b in range(3))
    divdiv = g.div(gr, periodic_part) + (1.0 + alpha) * (4.0 * dv + 2.0 * x_dot_gdv)
    report = {"divdiv_max": float(np.abs(divdiv).max()),
              "div_r_operator_residual": float(np.abs(div_S0 - U).max())}
    if pressure is not None:
        mom = (-alpha) * U + (1.0 + alpha) * x_dot_gradU \
            + g.div_sym(gr, g.outer_sym(gr, U, U)) + g.grad(gr, pressure) - divS
        report["momentum_residual_max"] = float(np.abs(mom).max())
    return S, report
