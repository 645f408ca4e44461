"""Entropy bound, constraint set and Devetak-Winter rate for the Mirror protocol."""

from __future__ import annotations

from dataclasses import dataclass
from math import log2, nan, sqrt

import numpy as np

from . import kernels
from .stats import ObservedStatistics

DEFAULT_GRID = 2001
FEASIBILITY_TOL = 1e-12


class DegenerateStatisticsError(ValueError):
    """No raw key exists (M = 0), so the conditional entropies are undefined."""


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


def shannon_entropy(probs) -> float:
    return float(-sum(p * log2(p) for p in probs if p > 0.0))


@dataclass(frozen=True)
class ConstraintSet:
    sum_lower_bound: float  # Re<E0|E3> + Re<E1|E2> >= this
    cs_bound_03: float  # |Re<E0|E3>| <= this
    cs_bound_12: float  # |Re<E1|E2>| <= this

    @property
    def feasible(self) -> bool:
        return self.sum_lower_bound <= self.cs_bound_03 + self.cs_bound_12 + FEASIBILITY_TOL


@dataclass(frozen=True)
class KeyRateResult:
    sae_lower: float
    h_a_given_b: float
    rate: float
    argmin_re03: float
    argmin_re12: float
    feasible: bool
    lambda1: float
    lambda2: float


def build_constraints(stats: ObservedStatistics) -> ConstraintSet:
    e0, e1, e2, e3 = stats.e
    c0 = sqrt(stats.p_create_0) + sqrt(stats.p_double)
    c1 = sqrt(stats.p_create_1) + sqrt(stats.p_double)
    lower = (
        0.5 * stats.p_plus_plus
        - stats.p0_plus
        - stats.p1_plus
        - 0.25 * (stats.p_ctrl_0 + stats.p_ctrl_1)
        + 0.5 * stats.m_total
        - c1 * (sqrt(e0) + sqrt(e2)) / sqrt(2.0)
        - c0 * (sqrt(e1) + sqrt(e3)) / sqrt(2.0)
        - 0.5 * c0 * c1
    )
    return ConstraintSet(lower, sqrt(e0 * e3), sqrt(e1 * e2))


def _require_key(stats: ObservedStatistics) -> None:
    if stats.m_total <= 0.0:
        raise DegenerateStatisticsError("M = 0: no raw key bits were shared")


def _lambda(e_a: float, e_b: float, re: float) -> float:
    w = e_a + e_b
    if w <= 0.0:
        return 0.5
    return min(0.5 + sqrt((e_a - e_b) ** 2 + 4.0 * re * re) / (2.0 * w), 1.0)


def sae_bound_raw(stats: ObservedStatistics, re03: float, re12: float) -> float:
    """Two-term lower bound on S(A|E) before flooring at zero."""
    _require_key(stats)
    e0, e1, e2, e3 = stats.e
    return kernels.sae_point(e0, e1, e2, e3, stats.m_total, re03, re12)


def sae_bound(stats: ObservedStatistics, re03: float, re12: float) -> float:
    """Lower bound on S(A|E) in bits for given Re<E0|E3>, Re<E1|E2>, floored at 0."""
    return max(0.0, sae_bound_raw(stats, re03, re12))


def minimize_sae(stats: ObservedStatistics, grid_points: int = DEFAULT_GRID) -> KeyRateResult:
    """Worst case of the entropy bound over the constraint set.

    Scans t = Re<E1|E2> over [-cs12, cs12] with Re<E0|E3> = max(0, L - t);
    values of t that would push Re<E0|E3> past its Cauchy-Schwarz cap are
    skipped.  The best grid cell is then refined by golden-section search.
    ``rate`` and ``h_a_given_b`` are left as NaN.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")
    _require_key(stats)
    cons = build_constraints(stats)
    if not cons.feasible:
        return KeyRateResult(nan, nan, nan, nan, nan, False, nan, nan)

    e0, e1, e2, e3 = stats.e
    m = stats.m_total
    lower, cs03, cs12 = cons.sum_lower_bound, cons.cs_bound_03, cons.cs_bound_12
    slack = FEASIBILITY_TOL
    args = (e0, e1, e2, e3, m, lower, cs03, slack)

    t = np.linspace(-cs12, cs12, grid_points)
    values = kernels.sae_scan(*args, t)
    i = int(np.argmin(values))
    t_floor = max(lower - cs03, -cs12)  # smallest t keeping Re<E0|E3> under its cap
    if np.isfinite(values[i]):
        t_star, f_star = float(t[i]), float(values[i])
        lo = max(float(t[max(i - 1, 0)]), min(t_floor, t_star))
        hi = float(t[min(i + 1, grid_points - 1)])
    else:
        # the feasible t-interval is narrower than one grid cell
        t_star, f_star = t_floor, float(kernels.sae_scan(*args, np.array([t_floor]))[0])
        lo, hi = t_floor, cs12
    if hi > lo:
        tr, fr = kernels.golden_section(*args, lo, hi, 1e-9 * 2.0 * cs12)
        if fr < f_star:
            t_star, f_star = float(tr), float(fr)

    re03 = min(max(0.0, lower - t_star), cs03)
    return KeyRateResult(
        sae_lower=max(0.0, f_star),
        h_a_given_b=nan,
        rate=nan,
        argmin_re03=re03,
        argmin_re12=t_star,
        feasible=True,
        lambda1=_lambda(e0, e3, re03),
        lambda2=_lambda(e1, e2, t_star),
    )


def conditional_entropy_ab(stats: ObservedStatistics) -> float:
    """H(A|B) = H(AB) - H(B) over the normalized raw-key distribution."""
    _require_key(stats)
    m = stats.m_total
    e0, e1, e2, e3 = stats.e
    h_ab = shannon_entropy([e0 / m, e1 / m, e2 / m, e3 / m])
    h_b = shannon_entropy([(e0 + e2) / m, (e1 + e3) / m])
    return h_ab - h_b


def key_rate(stats: ObservedStatistics, grid_points: int = DEFAULT_GRID) -> KeyRateResult:
    """r = S(A|E) - H(A|B).  Negative rates are returned unchanged."""
    stats.validate()
    result = minimize_sae(stats, grid_points)
    h = conditional_entropy_ab(stats)
    rate = result.sae_lower - h if result.feasible else nan
    return KeyRateResult(
        sae_lower=result.sae_lower,
        h_a_given_b=h,
        rate=rate,
        argmin_re03=result.argmin_re03,
        argmin_re12=result.argmin_re12,
        feasible=result.feasible,
        lambda1=result.lambda1,
        lambda2=result.lambda2,
    )
