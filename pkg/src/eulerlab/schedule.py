"""Nash-iteration parameter schedules and the inequality audit.

All per-q quantities are evaluated in the log domain where powers of lambda_q
appear, so very large base frequencies do not overflow.  The audit reports a
signed log-margin for every inequality chain the iteration relies on; the
margins are deterministic functions of the inputs, and the report serializes
to byte-stable JSON.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def admissible_b_range(beta, variant="first"):
    """Open interval of admissible b: 1 < b < min((1-beta)/(2 beta), 11/10).

    The second variant constrains b^2 by the same bound, so the interval for b
    is the square root.  Returns (lo, hi); empty (hi <= lo) when beta >= 1/3.
    """
    if not 0.0 < beta:
        raise ValueError("beta must be positive")
    bound = min((1.0 - beta) / (2.0 * beta), 1.1)
    if variant == "first":
        hi = bound
    elif variant == "second":
        hi = math.sqrt(bound) if bound > 0 else 0.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return (1.0, hi)


@dataclass
class ParameterSchedule:
    beta: float
    b: float
    alpha: float
    a: float
    q_max: int
    C10: float = 1.0
    Ct: float = 1.0
    variant: str = "first"
    # per-q arrays, q = 0..q_max (lambda/delta extended internally as needed)
    lam: np.ndarray = field(default=None, repr=False)
    log_lam: np.ndarray = field(default=None, repr=False)
    delta: np.ndarray = field(default=None, repr=False)
    ell: np.ndarray = field(default=None, repr=False)
    tau: np.ndarray = field(default=None, repr=False)
    d: np.ndarray = field(default=None, repr=False)
    sigma: np.ndarray = field(default=None, repr=False)
    m: np.ndarray = field(default=None, repr=False)
    r: np.ndarray = field(default=None, repr=False)


def build_schedule(beta, b, alpha, a, q_max, C10=1.0, Ct=1.0, variant="first"):
    """Fill every per-q quantity; rejects b outside the admissible range."""
    lo, hi = admissible_b_range(beta, variant)
    if not lo < b < hi:
        raise ValueError(f"b = {b} outside the admissible range ({lo}, {hi}) "
                         f"for beta = {beta} ({variant} variant)")
    if alpha <= 0 or a <= 1:
        raise ValueError("need alpha > 0 and a > 1")
    qx = int(q_max)
    # lambda, delta needed up to q_max + 3 (d_{q+1} uses delta_{q+3})
    qs = np.arange(qx + 4)
    log_a_bq = (b ** qs) * math.log(a)
    lam = np.empty(qx + 4)
    log_lam = np.empty(qx + 4)
    for q in qs:
        if log_a_bq[q] < math.log(2.0**53):
            ceil_val = math.ceil(math.exp(log_a_bq[q]))
            lam[q] = TWO_PI * ceil_val
            log_lam[q] = math.log(TWO_PI) + math.log(ceil_val)
        else:  # beyond integer resolution the ceiling is numerically invisible
            log_lam[q] = math.log(TWO_PI) + log_a_bq[q]
            lam[q] = math.inf if log_lam[q] > 700 else math.exp(log_lam[q])
    delta = np.exp(-2.0 * beta * log_lam)

    ell = np.empty(qx + 1)
    tau = np.empty(qx + 1)
    d = np.empty(qx + 2)
    m = np.empty(qx + 1)
    r = np.empty(qx + 1)
    for q in range(qx + 1):
        log_ell = 0.5 * math.log(delta[q + 1]) - 0.5 * math.log(delta[q]) \
            - (1.0 + 3.0 * alpha) * log_lam[q]
        ell[q] = math.exp(log_ell)
        tau[q] = math.exp(2.0 * alpha * log_ell - 0.5 * math.log(delta[q]) - log_lam[q])
        m[q] = math.ceil(math.exp(0.5 * log_lam[q])) if log_lam[q] < 36 else math.exp(0.5 * log_lam[q])
        r[q] = math.exp(-0.6 * log_lam[q])
    for q in range(qx + 2):
        log_d = (math.log(delta[q + 2]) - 6.0 * alpha * log_lam[q + 1]
                 - math.log(4.0 * C10)) / 10.0
        d[q] = math.exp(log_d)
    sigma = (d[:-1] - d[1:]) / 5.0

    return ParameterSchedule(beta=beta, b=b, alpha=alpha, a=a, q_max=qx, C10=C10,
                             Ct=Ct, variant=variant, lam=lam, log_lam=log_lam,
                             delta=delta, ell=ell, tau=tau, d=d[:qx + 2],
                             sigma=sigma[:qx + 1], m=m, r=r)


# ---------------------------------------------------------------------------
# audit

_CHAINS = (
    ("ell_window", "lambda_q^(-3/2) <= ell_q <= lambda_q^(-1)"),
    ("ceiling_window", "2 pi <= lambda_q / a^(b^q) <= 4 pi"),
    ("sigma_inverse", "sigma_q^(-1) <= K * lambda_q^(1/11)"),
    ("m_gap", "m_q delta_(q+2) delta_(q+1)^(-1/2) >= lambda_q^(1/20)"),
    ("parameters_final", "delta_(q+1)^(1/2) delta_q^(1/2) lambda_q / lambda_(q+1)"
                         " <= delta_(q+2) lambda_(q+1)^(-11 alpha)"),
    ("sigma_vs_ell", "sigma_q >= K_sep * ell_q"),
    ("tau_vs_r", "tau_q <= K * r_q"),
    ("d_lower", "d_q >= lambda_q^(-1/11)"),
)


@dataclass
class AuditReport:
    params: dict
    chains: dict           # name -> {"per_q": [...margins...], "pass": bool, "K": float|None}
    verdict: bool
    first_failure: tuple | None

    def to_json(self):
        def _clean(x):
            if isinstance(x, (np.floating, float)):
                return float(x)
            if isinstance(x, (np.integer, int)):
                return int(x)
            if isinstance(x, (list, tuple)):
                return [_clean(v) for v in x]
            if isinstance(x, dict):
                return {k: _clean(v) for k, v in x.items()}
            return x
        payload = {
            "params": _clean(self.params),
            "chains": _clean(self.chains),
            "verdict": bool(self.verdict),
            "first_failure": _clean(self.first_failure) if self.first_failure else None,
            "chain_descriptions": {k: v for k, v in _CHAINS},
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def audit(s: ParameterSchedule, K_asymptotic=1.0, K_sep=10.0):
    """Check every inequality chain for q = 0..q_max; margins are log-slack.

    A positive margin means the inequality holds with room; implicit "<~"
    constants are surfaced: chains marked with K report the achieved constant
    (the smallest K that would make every q pass) next to the configured one.
    """
    qx = s.q_max
    chains = {}

    def log_margin_pairs(lo_log, hi_log):
        return [float(h - l) for l, h in zip(lo_log, hi_log)]

    log_lam = s.log_lam
    log_delta = np.log(s.delta)
    log_ell = np.log(s.ell)
    log_tau = np.log(s.tau)
    log_sigma = np.log(s.sigma)
    log_d = np.log(s.d)
    log_m = np.log(s.m)
    log_r = np.log(s.r)

    # (a) lambda^(-3/2) <= ell <= lambda^(-1): margin = min of the two slacks
    lo = [log_ell[q] - (-1.5 * log_lam[q]) for q in range(qx + 1)]
    hi = [(-1.0 * log_lam[q]) - log_ell[q] for q in range(qx + 1)]
    per_q = [float(min(a_, b_)) for a_, b_ in zip(lo, hi)]
    chains["ell_window"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q), "K": None}

    # (b) ceiling window
    per_q = []
    for q in range(qx + 1):
        log_ratio = log_lam[q] - (s.b ** q) * math.log(s.a)
        per_q.append(float(min(log_ratio - math.log(TWO_PI),
                                math.log(2.0 * TWO_PI) - log_ratio)))
    chains["ceiling_window"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q), "K": None}

    # (c) sigma^{-1} <= K lambda^{1/11}
    per_q = [float(math.log(K_asymptotic) + log_lam[q] / 11.0 + log_sigma[q])
             for q in range(qx + 1)]
    achieved = max(math.exp(-log_sigma[q] - log_lam[q] / 11.0) for q in range(qx + 1))
    chains["sigma_inverse"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q),
                               "K": float(achieved)}

    # (d) m delta_{q+2} delta_{q+1}^{-1/2} >= lambda^{1/20}
    per_q = [float(log_m[q] + log_delta[q + 2] - 0.5 * log_delta[q + 1]
                   - log_lam[q] / 20.0) for q in range(qx + 1)]
    chains["m_gap"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q), "K": None}

    # (e) parameters final
    per_q = [float((log_delta[q + 2] - 11.0 * s.alpha * log_lam[q + 1])
                   - (0.5 * log_delta[q + 1] + 0.5 * log_delta[q]
                      + log_lam[q] - log_lam[q + 1])) for q in range(qx + 1)]
    chains["parameters_final"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q),
                                  "K": None}

    # (f) sigma >> ell and tau <= K r
    per_q = [float(log_sigma[q] - math.log(K_sep) - log_ell[q]) for q in range(qx + 1)]
    chains["sigma_vs_ell"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q),
                              "K": float(max(math.exp(log_ell[q] - log_sigma[q])
                                             for q in range(qx + 1)))}
    per_q = [float(math.log(K_asymptotic) + log_r[q] - log_tau[q]) for q in range(qx + 1)]
    chains["tau_vs_r"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q),
                          "K": float(max(math.exp(log_tau[q] - log_r[q])
                                         for q in range(qx + 1)))}

    # (g) d_q >= lambda_q^{-1/11}
    per_q = [float(log_d[q] + log_lam[q] / 11.0) for q in range(qx + 1)]
    chains["d_lower"] = {"per_q": per_q, "pass": all(v >= 0 for v in per_q), "K": None}

    verdict = all(c["pass"] for c in chains.values())
    first_failure = None
    for name, _ in _CHAINS:
        c = chains[name]
        for q, v in enumerate(c["per_q"]):
            if v < 0:
                first_failure = (int(q), name)
                break
        if first_failure:
            break
    params = {"beta": s.beta, "b": s.b, "alpha": s.alpha, "a": s.a,
              "q_max": s.q_max, "C10": s.C10, "Ct": s.Ct, "variant": s.variant,
              "K_asymptotic": K_asymptotic, "K_sep": K_sep}
    return AuditReport(params=params, chains=chains, verdict=verdict,
                       first_failure=first_failure)
