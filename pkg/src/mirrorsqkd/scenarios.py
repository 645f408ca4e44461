"""Closed-form statistics for the two single-photon example scenarios, fiber loss,
the two-copy BB84 baseline, threshold search and key-rate sweeps."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adversary import NoiseChannelSpec
from .keyrate import DEFAULT_GRID, KeyRateResult, binary_entropy, key_rate
from .stats import ObservedStatistics

MODELS = ("dependent", "independent", "explicit")
LOSS_MODES = ("none", "explicit", "fiber")
DB_CONVENTIONS = ("paper-literal", "db-per-10")
DEFAULT_ALPHA_DB_PER_KM = 0.15


class BracketError(ValueError):
    """The key rate does not change sign over the search interval."""


@dataclass(frozen=True)
class ScenarioConfig:
    model: str = "dependent"
    qz: float = 0.0
    qx: float = 0.0
    loss_mode: str = "none"
    p_loss_forward: float = 0.0
    p_loss_reverse: float = 0.0
    alpha: float = DEFAULT_ALPHA_DB_PER_KM
    length_km: float = 0.0
    db_convention: str = "paper-literal"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.loss_mode not in LOSS_MODES:
            raise ValueError(f"loss_mode must be one of {LOSS_MODES}, got {self.loss_mode!r}")
        if self.db_convention not in DB_CONVENTIONS:
            raise ValueError(f"db_convention must be one of {DB_CONVENTIONS}")
        if not 0.0 <= self.qz <= 0.5:
            raise ValueError(f"qz={self.qz} outside [0, 0.5]")
        if self.model == "explicit" and not 0.0 <= self.qx <= 0.5:
            raise ValueError(f"qx={self.qx} outside [0, 0.5]")
        if self.alpha < 0 or self.length_km < 0:
            raise ValueError("alpha and length_km must be non-negative")
        for p in self.losses():
            if not 0.0 <= p < 1.0:
                raise ValueError(f"loss probability {p} outside [0, 1)")

    def effective_qx(self) -> float:
        if self.model == "dependent":
            return self.qz
        if self.model == "independent":
            return 2.0 * self.qz * (1.0 - self.qz)
        return self.qx

    def losses(self) -> tuple[float, float]:
        if self.loss_mode == "none":
            return 0.0, 0.0
        if self.loss_mode == "explicit":
            return self.p_loss_forward, self.p_loss_reverse
        p = fiber_loss(self.alpha, self.length_km, self.db_convention)
        return p, p

    def with_qz(self, qz: float) -> "ScenarioConfig":
        return dataclasses.replace(self, qz=qz)

    def noise_spec(self) -> NoiseChannelSpec:
        pf, pr = self.losses()
        return NoiseChannelSpec(self.qz, self.effective_qx(), pf, pr)


def fiber_loss(alpha: float, length_km: float, convention: str = "paper-literal") -> float:
    """Loss probability of a fiber with attenuation ``alpha`` dB/km.

    ``paper-literal`` evaluates 1 - 10^(-alpha * length) with no decibel scaling; ``db-per-10``
    applies the usual decibel scaling 1 - 10^(-alpha * length / 10).
    """
    if alpha < 0 or length_km < 0:
        raise ValueError("alpha and length_km must be non-negative")
    exponent = alpha * length_km
    if convention == "db-per-10":
        exponent /= 10.0
    elif convention != "paper-literal":
        raise ValueError(f"unknown convention {convention!r}")
    return float(-np.expm1(-exponent * np.log(10.0)))


def closed_form_statistics(cfg: ScenarioConfig) -> ObservedStatistics:
    pf, pr = cfg.losses()
    eta = (1.0 - pf) * (1.0 - pr)
    qz, qx = cfg.qz, cfg.effective_qx()
    same = 0.25 * eta * (1.0 - qz)
    flip = 0.25 * eta * qz
    return ObservedStatistics(
        e00=same,
        e01=flip,
        e10=flip,
        e11=same,
        m_total=0.5 * eta,
        p0_plus=eta / 8.0,
        p1_plus=eta / 8.0,
        p_plus_plus=eta * (1.0 - qx),
        p_ctrl_0=0.5 * eta,
        p_ctrl_1=0.5 * eta,
        p_double=0.0,
        p_create_0=0.0,
        p_create_1=0.0,
    ).validate()


def bb84_baseline(p: float) -> float:
    """Rate of two BB84 copies at error rate ``p``: 2 (1 - 2 H2(p))."""
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"p={p} outside [0, 0.5]")
    return 2.0 * (1.0 - 2.0 * binary_entropy(p))


def scenario_rate(cfg: ScenarioConfig, grid_points: int = DEFAULT_GRID) -> KeyRateResult:
    return key_rate(closed_form_statistics(cfg), grid_points)


def find_threshold(
    template: ScenarioConfig,
    tolerance: float = 1e-4,
    grid_points: int = DEFAULT_GRID,
    bracket: tuple[float, float] = (0.0, 0.25),
) -> float:
    """Largest qz with a non-negative key rate, by bisection on the sign change."""
    lo, hi = bracket

    def rate(qz: float) -> float:
        r = scenario_rate(template.with_qz(qz), grid_points)
        # an infeasible point can only sit past the threshold
        return r.rate if r.feasible else -np.inf

    if not rate(lo) > 0.0:
        raise BracketError(f"key rate at qz={lo} is not positive")
    if not rate(hi) < 0.0:
        raise BracketError(f"key rate at qz={hi} is not negative")
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if rate(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CurveRow:
    qz: float
    qx: float
    rate: float
    rate_throughput_weighted: float
    bb84_rate: float
    sae_lower: float
    h_a_given_b: float
    feasible: bool


CURVE_COLUMNS = tuple(f.name for f in dataclasses.fields(CurveRow))


def curve_row(cfg: ScenarioConfig, grid_points: int = DEFAULT_GRID) -> CurveRow:
    stats = closed_form_statistics(cfg)
    r = key_rate(stats, grid_points)
    return CurveRow(
        qz=cfg.qz,
        qx=cfg.effective_qx(),
        rate=r.rate,
        rate_throughput_weighted=r.rate * stats.m_total,
        bb84_rate=bb84_baseline(cfg.qz),
        sae_lower=r.sae_lower,
        h_a_given_b=r.h_a_given_b,
        feasible=r.feasible,
    )


def sweep_curve(
    template: ScenarioConfig,
    qz_start: float,
    qz_end: float,
    steps: int,
    grid_points: int = DEFAULT_GRID,
    executor: Optional[object] = None,
) -> list[CurveRow]:
    """Key rate and BB84 baseline on an evenly spaced qz grid, ordered by qz.

    A degenerate range (``qz_start == qz_end``) collapses to a single row.
    ``executor`` may be any ``concurrent.futures`` executor; rows are independent.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    configs = [template.with_qz(float(q)) for q in np.unique(np.linspace(qz_start, qz_end, steps))]
    if executor is None:
        return [curve_row(c, grid_points) for c in configs]
    return list(executor.map(curve_row, configs, [grid_points] * len(configs)))
