"""Closed-form martingale and binomial tail bounds.

Three classical inequalities, plus the union-bound table that quantifies how
unlikely a simultaneous extension-count escape is near the tracking horizon.
The union-bound terms underflow to zero long before the interesting regime,
so they are reported in log space alongside the raw values.  The hidden
leading constant of the exponent is exposed as ``constant_c`` (default 1) and
never silently invented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial, log

from .trajectory import TrajectoryParams, Horizon, beta, i0_p0, powf, sigma


def azuma_bound(a: float, c: list[float]) -> float:
    """Hoeffding-Azuma tail exp(-a^2 / (2 sum c_i^2)) for bounded differences c."""
    if a <= 0:
        raise ValueError(f"deviation a must be positive, got {a}")
    if not c or any(ci <= 0 for ci in c):
        raise ValueError("difference bounds must be positive and nonempty")
    return math.exp(-a * a / (2 * sum(ci * ci for ci in c)))


def bohman_bound(a: float, ell: int, eta: float, N: float) -> float:
    """Tail exp(-a^2 / (3 l eta N)) for an (eta, N)-bounded (sub/super)martingale.

    The hypotheses eta <= N/10 and 0 < a < eta*l are enforced, since the
    inequality is simply false outside them.
    """
    if eta <= 0 or N <= 0 or ell <= 0:
        raise ValueError("eta, N and l must be positive")
    if eta > N / 10:
        raise ValueError(f"hypothesis eta <= N/10 violated: eta={eta}, N={N}")
    if not 0 < a < eta * ell:
        raise ValueError(f"need 0 < a < eta*l, got a={a}, eta*l={eta * ell}")
    return math.exp(-a * a / (3 * ell * eta * N))


def chernoff_bound(n: int, p: float, xi: float) -> float:
    """Binomial two-sided tail bound 2 exp(-xi^2 / (3 n p)) for 0 < xi <= np."""
    if not 0 < p <= 1 or n <= 0:
        raise ValueError("need n >= 1 and p in (0, 1]")
    if not 0 < xi <= n * p:
        raise ValueError(f"need 0 < xi <= np, got xi={xi}, np={n * p}")
    return 2 * math.exp(-xi * xi / (3 * n * p))


@dataclass(frozen=True)
class UnionBoundTerm:
    m: int
    xi: float
    log_term: float          # natural log of the bound contribution
    term: float              # may underflow to 0.0
    analytic_exponent: float  # Theta-exponent of n in the display; equals beta(k, m)


@dataclass(frozen=True)
class UnionBoundReport:
    horizon: Horizon
    constant_c: float
    terms: list[UnionBoundTerm]
    increasing_in_m: bool
    dominant_m: int
    total: float
    log_total: float


def union_bound_at_horizon(params: TrajectoryParams, constant_c: float = 1.0) -> UnionBoundReport:
    """Per-m union-bound terms for an extension-count escape at density p_0.

    Each term is C(n,m) * 2 exp(-c (k-m)! xi^2 / (3 n^(k-m) p_0^(C(k,2)-C(m,2))))
    with xi = sigma(p_0) n^beta_m (ln n)^gamma_m.  The terms increase in m, so
    the m = k-1 codegree term dominates the total.
    """
    if constant_c <= 0:
        raise ValueError("constant_c must be positive")
    k, n = params.k, params.n
    hor = i0_p0(params)
    s = sigma(hor.p0, k)
    ln_n = log(n)
    ckk = comb(k, 2)
    terms = []
    log_terms = []
    for m in range(2, k):
        b = beta(k, m)
        xi = s * powf(n, b) * ln_n ** params.gamma[m]
        exponent = (constant_c * factorial(k - m) * xi * xi
                    / (3 * powf(n, k - m) * hor.p0 ** (ckk - comb(m, 2))))
        log_term = log(2 * comb(n, m)) - exponent
        term = math.exp(log_term) if log_term > -700 else 0.0
        terms.append(UnionBoundTerm(m=m, xi=xi, log_term=log_term, term=term,
                                    analytic_exponent=b))
        log_terms.append(log_term)
    increasing = all(a < b for a, b in zip(log_terms, log_terms[1:]))
    # log-sum-exp for a total that survives underflow
    peak = max(log_terms)
    log_total = peak + log(sum(math.exp(lt - peak) for lt in log_terms))
    total = math.exp(log_total) if log_total > -700 else 0.0
    return UnionBoundReport(horizon=hor, constant_c=constant_c, terms=terms,
                            increasing_in_m=increasing,
                            dominant_m=terms[-1].m if increasing else max(terms, key=lambda t: t.log_term).m,
                            total=total, log_total=log_total)
