"""Predicted trajectories, error envelopes, critical intervals and residuals.

Everything here is a closed-form function of the edge density p and the
parameters (k, n, lambda, mu, gamma_m).  The trajectory for the clique count
is n^k p^C(k,2) / k! and for the m-set extension counts
n^(k-m) p^(C(k,2)-C(m,2)) / (k-m)!; the envelope and interval formulas wrap
those with the error function sigma(p) = 1 - (k(k-1)/4) ln p and the
exponents alpha(k), beta(k, m).  All logarithms are natural.

The envelope machinery requires k >= 4 (alpha, beta and the interval constant
B are only defined there); the process itself runs for k >= 3, so callers
doing k = 3 calibration must not touch these functions.

Powers of n are evaluated in log space only when direct evaluation would
overflow, so moderate inputs stay bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, log

from scipy.optimize import brentq


def powf(base: float, exp: float) -> float:
    """base ** exp with a log-space fallback for astronomically large results."""
    if base < 0:
        raise ValueError("negative base")
    try:
        return float(base) ** exp
    except OverflowError:
        return math.exp(exp * math.log(base))


def p_of(i: float, n: int, k: int) -> float:
    """Edge density after i steps: 1 - k(k-1) i / n^2."""
    p = 1.0 - k * (k - 1) * i / (n * n)
    if p < 0:
        raise ValueError(f"step i={i} is past the density-zero point for n={n}, k={k}")
    return p

def edges_expected(i: float, n: int, k: int) -> float:
    """(n^2 p - n) / 2; agrees exactly with C(n,2) - C(k,2) i."""
    return (n * n * p_of(i, n, k) - n) / 2


def q_traj(p: float, n: int, k: int) -> float:
    """Predicted K_k count.

    Uses n^k / k!, not the falling factorial, so at small n it overshoots the
    exact initial count C(n, k) by a factor n^k / (k! C(n, k)).
    """
    return powf(n, k) / factorial(k) * p ** comb(k, 2)


def r_traj(p: float, n: int, k: int, m: int) -> float:
    """Predicted number of extensions of a complete m-set to a K_k."""
    if not 2 <= m <= k - 1:
        raise ValueError(f"m must be in [2, k-1], got m={m}, k={k}")
    return powf(n, k - m) / factorial(k - m) * p ** (comb(k, 2) - comb(m, 2))


def sigma(p: float, k: int) -> float:
    """Error inflation factor 1 - (k(k-1)/4) ln p; equals 1 at p = 1."""
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return 1.0 - k * (k - 1) / 4 * log(p)


def sigma_prime(p: float, k: int) -> float:
    """d sigma / dt expressed through p: k^2 (k-1)^2 / (4p)."""
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return k * k * (k - 1) * (k - 1) / (4 * p)


def _require_k4(k: int) -> None:
    if k < 4:
        raise ValueError(
            f"k={k}: the envelope exponents and intervals are defined for k >= 4 only; "
            "k = 3 runs are supported by the engine but have no envelope formulas"
        )


def alpha(k: int) -> float:
    """Lower-envelope exponent k - (C(k,2)+1) / (2 C(k,2) - 2)."""
    _require_k4(k)
    c = comb(k, 2)
    return k - (c + 1) / (2 * c - 2)


def beta(k: int, m: int) -> float:
    """Extension-band exponent k - m - (C(k,2)-C(m,2)) / (2 C(k,2) - 2)."""
    _require_k4(k)
    if not 2 <= m <= k - 1:
        raise ValueError(f"m must be in [2, k-1], got m={m}, k={k}")
    c = comb(k, 2)
    return k - m - (c - comb(m, 2)) / (2 * c - 2)


def B_constant(k: int) -> Fraction:
    """Inner endpoint coefficient of the upper Q interval; always < 1/2."""
    _require_k4(k)
    c = comb(k, 2)
    return Fraction(1, 2) - Fraction(1, 2 * c) + Fraction(1, 3 * c * factorial(k - 4))


@dataclass(frozen=True)
class TrajectoryParams:
    """Constants fixing every envelope formula.

    The defaults (lambda=1, mu=2, gamma_m=1) are the smallest integers
    satisfying the constraint list below; no attempt is made to optimize them
    and every one is configurable.
    """

    k: int
    n: int
    lam: float = 1.0
    mu: float = 2.0
    gamma: dict[int, float] = field(default_factory=dict)
    p_floor: float = 0.3

    def __post_init__(self):
        _require_k4(self.k)
        if self.n < self.k:
            raise ValueError(f"n={self.n} smaller than k={self.k}")
        if not self.gamma:
            object.__setattr__(self, "gamma", {m: 1.0 for m in range(2, self.k)})
        if set(self.gamma) != set(range(2, self.k)):
            raise ValueError(f"gamma must have keys 2..{self.k - 1}, got {sorted(self.gamma)}")
        if not 0 < self.p_floor <= 1:
            raise ValueError(f"p_floor must be in (0, 1], got {self.p_floor}")
        c = comb(self.k, 2)
        if not (c + 1) * self.lam > self.mu + 2:
            raise ValueError(f"constraint (C(k,2)+1)*lambda > mu+2 fails: {(c+1)*self.lam} <= {self.mu + 2}")
        for m, g in self.gamma.items():
            if not (c - comb(m, 2)) * self.lam > g + 1:
                raise ValueError(
                    f"constraint (C(k,2)-C(m,2))*lambda > gamma_{m}+1 fails for m={m}"
                )
        if not self.gamma[2] > 0.5:
            raise ValueError(f"constraint gamma_2 > 1/2 fails: {self.gamma[2]}")

    @property
    def log_n(self) -> float:
        return log(self.n)


@dataclass(frozen=True)
class Horizon:
    """Tracking horizon i_0 and its density p_0.

    At desk-scale n the horizon is usually vacuous (p_0 >= 1, i_0 <= 0): the
    asymptotic guarantee says nothing there, and the flag is surfaced instead
    of clamping the values.
    """

    i0: float
    p0: float
    vacuous: bool


def i0_p0(params: TrajectoryParams) -> Horizon:
    """Horizon step count and density; p_of(i0) == p0 identically when valid."""
    k, n, lam = params.k, params.n, params.lam
    kk = k * (k - 1)
    cube2 = 2 ** (1 / 3)
    p0 = cube2 * powf(n, -1 / (kk - 2)) * log(n) ** lam
    i0 = n * n / kk - cube2 / kk * powf(n, 2 - 1 / (kk - 2)) * log(n) ** lam
    return Horizon(i0=i0, p0=p0, vacuous=(p0 >= 1.0 or i0 <= 0.0))


def p0_below_one_threshold(k: int, lam: float) -> float:
    """Smallest n beyond which p_0 < 1 stays true (the horizon stops being vacuous).

    Solves n^(1/(k(k-1)-2)) = 2^(1/3) (ln n)^lambda for the large root, in
    log space.  For k=4, lambda=1 this sits near n ~ 10^17.
    """
    _require_k4(k)
    kk2 = k * (k - 1) - 2

    def h(ln_n: float) -> float:
        # -ln p0 as a function of ln n
        return ln_n / kk2 - log(2) / 3 - lam * log(ln_n)

    lo = lam * kk2 + 1e-9  # stationary point of h; the large root is to the right
    if h(lo) > 0:
        raise ValueError("p0 < 1 already holds at the stationary point; no large root")
    hi = lo
    while h(hi) <= 0:
        hi *= 2
        if hi > 1e6:
            raise RuntimeError("failed to bracket the p0 threshold")
    return math.exp(brentq(h, lo, hi, xtol=1e-12))


@dataclass(frozen=True)
class Envelopes:
    q_center: float
    q_upper: float
    q_lower: float
    r_center: dict[int, float]
    r_half_width: dict[int, float]


def envelopes(params: TrajectoryParams, p: float) -> Envelopes:
    """Upper/lower Q envelope and the symmetric extension bands at density p."""
    k, n = params.k, params.n
    c = comb(k, 2)
    s = sigma(p, k)
    ln_n = params.log_n
    qc = q_traj(p, n, k)
    q_up = qc + powf(n, k - 1) / 2 * p ** (c - 4)
    q_lo = qc - s * s * powf(n, alpha(k)) / p * ln_n ** params.mu
    r_center = {}
    r_half = {}
    for m in range(2, k):
        r_center[m] = r_traj(p, n, k, m)
        r_half[m] = s * powf(n, beta(k, m)) * ln_n ** params.gamma[m]
    return Envelopes(q_center=qc, q_upper=q_up, q_lower=q_lo,
                     r_center=r_center, r_half_width=r_half)


@dataclass(frozen=True)
class CriticalIntervals:
    q_upper: tuple[float, float]
    q_lower: tuple[float, float]
    r_upper: dict[int, tuple[float, float]]


def critical_intervals(params: TrajectoryParams, p: float) -> CriticalIntervals:
    """The thin bands next to each maintained bound.

    The upper Q interval runs from trajectory + B n^(k-1) p^(C(k,2)-4) to
    trajectory + (1/2) n^(k-1) p^(C(k,2)-4); the lower Q interval and the
    upper extension intervals swap sigma^2 for sigma(sigma-1) and sigma for
    sigma-1 respectively, so each interval's width is one sigma-free error
    unit.
    """
    k, n = params.k, params.n
    c = comb(k, 2)
    s = sigma(p, k)
    ln_n = params.log_n
    qc = q_traj(p, n, k)
    b = float(B_constant(k))
    q_err_up = powf(n, k - 1) * p ** (c - 4)
    q_err_lo = powf(n, alpha(k)) / p * ln_n ** params.mu
    r_up = {}
    for m in range(2, k):
        rc = r_traj(p, n, k, m)
        unit = powf(n, beta(k, m)) * ln_n ** params.gamma[m]
        r_up[m] = (rc + (s - 1) * unit, rc + s * unit)
    return CriticalIntervals(
        q_upper=(qc + b * q_err_up, qc + 0.5 * q_err_up),
        q_lower=(qc - s * s * q_err_lo, qc - s * (s - 1) * q_err_lo),
        r_upper=r_up,
    )


@dataclass(frozen=True)
class Residuals:
    """Signed distances of observed counts to their envelope boundaries.

    U <= 0 means the clique count sits at or below its upper envelope,
    L >= 0 means it sits at or above its lower envelope, and Z_m <= 0 means
    the extension count is below the inner edge of its upper interval.
    """

    U: float
    L: float
    Z: dict[int, float]


def residuals(params: TrajectoryParams, p: float, q_observed: float,
              r_observed: dict[int, float]) -> Residuals:
    env = envelopes(params, p)
    s = sigma(p, params.k)
    ln_n = params.log_n
    z = {}
    for m, r_obs in r_observed.items():
        unit = powf(params.n, beta(params.k, m)) * ln_n ** params.gamma[m]
        z[m] = r_obs - env.r_center[m] - (s - 1) * unit
    return Residuals(U=q_observed - env.q_upper,
                     L=q_observed - env.q_lower,
                     Z=z)


def final_size_bound(params: TrajectoryParams) -> float:
    """Edge count at the horizon: (2^(1/3)/2) n^(2 - 1/(k(k-1)-2)) (ln n)^lambda."""
    k, n = params.k, params.n
    return 2 ** (1 / 3) / 2 * powf(n, 2 - 1 / (k * (k - 1) - 2)) * log(n) ** params.lam


def barrier_p(k: int, n: int) -> float:
    """Density n^(-1/(k(k-1)-2)) where extension fluctuations reach trajectory size.

    Logarithmic factors are deliberately omitted.
    """
    _require_k4(k)
    return powf(n, -1 / (k * (k - 1) - 2))


def q_main_error_ratio(params: TrajectoryParams, p: float) -> dict[str, float]:
    """Trajectory-to-error-term ratios for Q at density p.

    Ratios above 1 mean the corresponding envelope is meaningfully narrow at
    this (n, p); below 1 the guarantee is vacuous at this scale.  This is the
    check that defines the usable desk-scale density window.
    """
    env = envelopes(params, p)
    return {
        "upper": env.q_center / (env.q_upper - env.q_center),
        "lower": env.q_center / (env.q_center - env.q_lower),
    }


def traj_over_lower_error_log(k: int, lam: float, mu: float, n: float) -> float:
    """ln of q_traj / (sigma^2 n^alpha p^-1 ln^mu n) evaluated at p = p_0(n).

    Positive means the trajectory dominates its lower error term at the
    horizon.  Evaluated fully in log space so it works at the astronomical n
    where the horizon first becomes non-vacuous.
    """
    _require_k4(k)
    kk = k * (k - 1)
    c = comb(k, 2)
    ln_n = math.log(n)
    ln_p0 = math.log(2) / 3 - ln_n / (kk - 2) + lam * math.log(ln_n)
    s = 1.0 - kk / 4 * ln_p0
    if s <= 0:
        raise ValueError("sigma(p0) <= 0; n is below the p0 validity threshold")
    ln_traj = k * ln_n - math.log(factorial(k)) + c * ln_p0
    ln_err = 2 * math.log(s) + alpha(k) * ln_n - ln_p0 + mu * math.log(ln_n)
    return ln_traj - ln_err


def emit_curves(params: TrajectoryParams, points: int = 200) -> str:
    """CSV of trajectory, envelope and band columns on a uniform p-grid."""
    if points < 2:
        raise ValueError("need at least 2 grid points")
    ms = list(range(2, params.k))
    header = ["p", "q_traj", "q_upper", "q_lower"]
    for m in ms:
        header += [f"r_traj_m{m}", f"band_m{m}"]
    lines = [",".join(header)]
    for j in range(points):
        p = params.p_floor + (1.0 - params.p_floor) * j / (points - 1)
        env = envelopes(params, p)
        row = [repr(p), repr(env.q_center), repr(env.q_upper), repr(env.q_lower)]
        for m in ms:
            row += [repr(env.r_center[m]), repr(env.r_half_width[m])]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
