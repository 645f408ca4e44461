"""Observable round statistics of the Mirror protocol under a given attack.

Conventions for the probability fields:

* ``e00 .. e11`` and ``p0_plus``, ``p1_plus`` are joint probabilities within
  raw-key (resp. mismatched raw-key) rounds: Alice picks SWAP-10 or SWAP-01
  with probability 1/2 each, sees vacuum, and Bob gets the stated result.
* ``p_plus_plus`` and ``p_ctrl_*`` are probabilities within CTRL rounds.
* ``p_double`` and ``p_create_*`` are probabilities within SWAP-ALL rounds.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from . import kernels
from .adversary import OUT_00, OUT_01, OUT_10, FirstAttack, SecondAttack, verify_isometry
from .fock import (
    ALICE,
    BOB,
    COMPUTATIONAL,
    COMPUTATIONAL_OUTCOMES,
    HADAMARD,
    HADAMARD_OUTCOMES,
    FockStateVector,
    measurement_probabilities,
)
from .protocol import AliceOperation, PreconditionError, alice_branch, apply_alice_operation

STAT_TOL = 1e-10

FIELDS = (
    "e00",
    "e01",
    "e10",
    "e11",
    "m_total",
    "p0_plus",
    "p1_plus",
    "p_plus_plus",
    "p_ctrl_0",
    "p_ctrl_1",
    "p_double",
    "p_create_0",
    "p_create_1",
)


class StatisticsError(ValueError):
    """Probabilities that no attack could produce under the model."""


@dataclass(frozen=True)
class ObservedStatistics:
    e00: float
    e01: float
    e10: float
    e11: float
    m_total: float
    p0_plus: float
    p1_plus: float
    p_plus_plus: float
    p_ctrl_0: float
    p_ctrl_1: float
    p_double: float
    p_create_0: float
    p_create_1: float

    def validate(self, tol: float = STAT_TOL) -> "ObservedStatistics":
        for name in FIELDS:
            value = getattr(self, name)
            if not (-tol <= value <= 1.0 + tol):
                raise StatisticsError(f"{name}={value!r} is not a probability")
        joint = self.e00 + self.e01 + self.e10 + self.e11
        if abs(self.m_total - joint) > tol:
            raise StatisticsError(
                f"m_total={self.m_total!r} differs from e00+e01+e10+e11={joint!r}"
            )
        return self

    @property
    def e(self) -> tuple[float, float, float, float]:
        return (self.e00, self.e01, self.e10, self.e11)

    def scaled(self, eta: float) -> "ObservedStatistics":
        """Every probability multiplied by ``eta`` (uniform loss)."""
        return ObservedStatistics(**{k: eta * v for k, v in self.as_dict().items()})

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "ObservedStatistics":
        missing = [name for name in FIELDS if name not in data]
        extra = sorted(set(data) - set(FIELDS))
        if missing or extra:
            raise StatisticsError(f"missing fields {missing}, unknown fields {extra}")
        return cls(**{name: float(data[name]) for name in FIELDS}).validate()


@dataclass(frozen=True, eq=False)
class EveVectors:
    """Eve-side vectors built from the attack's g-vectors."""

    E0: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    E3: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    h0: np.ndarray
    h1: np.ndarray
    h_vac: np.ndarray

    def norm2(self, name: str) -> float:
        v = getattr(self, name)
        return float(np.vdot(v, v).real)

    def re_inner(self, a: str, b: str) -> float:
        return float(np.vdot(getattr(self, a), getattr(self, b)).real)


def _probs(state: FockStateVector, register: str, basis: str) -> dict[str, float]:
    # branches may be empty (e.g. total forward loss); their outcomes all have probability 0
    if state.norm_squared() == 0.0:
        names = COMPUTATIONAL_OUTCOMES if basis == COMPUTATIONAL else HADAMARD_OUTCOMES
        return dict.fromkeys(names, 0.0)
    return measurement_probabilities(state, register, basis)


def _require_isometry(second: SecondAttack) -> None:
    if not verify_isometry(second):
        raise PreconditionError("reverse attack is not an isometry")


def analytic_statistics(
    first: FirstAttack, second: SecondAttack
) -> tuple[ObservedStatistics, EveVectors]:
    """Exact probabilities by evolving each round type and applying the Born rule."""
    _require_isometry(second)
    psi0 = first.state()

    raw = {}
    for op, bit in ((AliceOperation.SWAP10, 0), (AliceOperation.SWAP01, 1)):
        kept = alice_branch(apply_alice_operation(op, psi0), "vacuum")
        out = second.apply(kept)
        comp = _probs(out, BOB, COMPUTATIONAL)
        had = _probs(out, BOB, HADAMARD)
        raw[bit] = (0.5 * comp["click0"], 0.5 * comp["click1"], 0.5 * had["plus"])

    reflected = second.apply(apply_alice_operation(AliceOperation.CTRL, psi0))
    ctrl_comp = _probs(reflected, BOB, COMPUTATIONAL)
    ctrl_had = _probs(reflected, BOB, HADAMARD)

    swapped = apply_alice_operation(AliceOperation.SWAPALL, psi0)
    alice = _probs(swapped, ALICE, COMPUTATIONAL)
    created = _probs(second.apply(alice_branch(swapped, "vacuum")), BOB, COMPUTATIONAL)

    e00, e01, p0_plus = raw[0]
    e10, e11, p1_plus = raw[1]
    stats = ObservedStatistics(
        e00=e00,
        e01=e01,
        e10=e10,
        e11=e11,
        m_total=e00 + e01 + e10 + e11,
        p0_plus=p0_plus,
        p1_plus=p1_plus,
        p_plus_plus=ctrl_had["plus"],
        p_ctrl_0=ctrl_comp["click0"],
        p_ctrl_1=ctrl_comp["click1"],
        p_double=alice["double"],
        p_create_0=created["click0"],
        p_create_1=created["click1"],
    )
    return stats, eve_vectors(first, second)


def eve_vectors(first: FirstAttack, second: SecondAttack) -> EveVectors:
    """E_i, g_j, h_j and h_vac from g^{jk}_{m1,m0} = U_R |m1,m0>|e_{m1,m0}>."""
    L = min(second.domain_cap, first.n_max) + 1
    inj = first.injected
    if np.any(inj[L:]) or np.any(inj[:, L:]):
        raise ValueError("forward state has photons outside the reverse attack's domain")
    # g[m1, m0, j] is the Eve vector paired with output label j
    g = np.einsum("xye,xyejf->xyjf", inj[:L, :L], second.action[:L, :L])
    r = 1.0 / sqrt(2.0)
    return EveVectors(
        E0=r * g[0, :, OUT_01].sum(axis=0),
        E1=r * g[0, :, OUT_10].sum(axis=0),
        E2=r * g[:, 0, OUT_01].sum(axis=0),
        E3=r * g[:, 0, OUT_10].sum(axis=0),
        g0=r * g[0, 0, OUT_01],
        g1=r * g[0, 0, OUT_10],
        h0=r * g[1:, 1:, OUT_01].sum(axis=(0, 1)),
        h1=r * g[1:, 1:, OUT_10].sum(axis=(0, 1)),
        h_vac=r * g[1:, 1:, OUT_00].sum(axis=(0, 1)),
    )


def check_lemma1(vecs: EveVectors, stats: ObservedStatistics, tol: float = STAT_TOL) -> bool:
    """Double-click bound on h0, h1 plus the unitarity identity behind it."""
    h0, h1, hv = vecs.norm2("h0"), vecs.norm2("h1"), vecs.norm2("h_vac")
    half = 0.5 * stats.p_double
    return bool(h0 <= half + tol and h1 <= half + tol and abs(half - (h0 + h1 + hv)) <= tol)


# ---------------------------------------------------------------- Monte Carlo

OPS = (AliceOperation.CTRL, AliceOperation.SWAP10, AliceOperation.SWAP01, AliceOperation.SWAPALL)
_CTRL, _S10, _S01, _SALL = range(4)
_COMP, _HAD = 0, 1
_VAC, _C0, _C1, _DBL = range(4)  # Bob's Hadamard outcomes reuse 1 = plus, 2 = minus
BLOCK_ROUNDS = 1 << 16


def _cdf(p: np.ndarray) -> np.ndarray:
    total = p.sum()
    c = np.cumsum(p / total) if total > 0 else np.cumsum(np.full(len(p), 1.0 / len(p)))
    c[-1] = 1.0
    return c


def branch_tables(first: FirstAttack, second: SecondAttack):
    """Alice's outcome CDF per operation and Bob's conditional CDF per branch and basis."""
    psi0 = first.state()
    alice_cdf = np.zeros((4, 4))
    bob_cdf = np.zeros((4, 4, 2, 4))
    for i, op in enumerate(OPS):
        after = apply_alice_operation(op, psi0)
        pa = _probs(after, ALICE, COMPUTATIONAL)
        alice_cdf[i] = _cdf(np.array([pa[o] for o in COMPUTATIONAL_OUTCOMES]))
        for a, outcome in enumerate(COMPUTATIONAL_OUTCOMES):
            out = second.apply(alice_branch(after, outcome))
            for b, (basis, names) in enumerate(
                ((COMPUTATIONAL, COMPUTATIONAL_OUTCOMES), (HADAMARD, HADAMARD_OUTCOMES))
            ):
                pb = _probs(out, BOB, basis)
                bob_cdf[i, a, b] = _cdf(np.array([pb[o] for o in names]))
    return alice_cdf, bob_cdf


def _estimate(k: int, n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    if k == 0 or k == n:
        return p, 3.0 / n  # rule of three
    return p, sqrt(p * (1.0 - p) / n)


def statistics_from_counts(counts: np.ndarray) -> tuple[ObservedStatistics, dict[str, float]]:
    """Turn a (op, basis, Alice outcome, Bob outcome) tally into estimates and standard errors."""
    c = np.asarray(counts, dtype=np.int64)
    n_raw = int(c[_S10, _COMP].sum() + c[_S01, _COMP].sum())
    n_mis = int(c[_S10, _HAD].sum() + c[_S01, _HAD].sum())
    n_test = int(c[_CTRL, _HAD].sum())
    n_mtest = int(c[_CTRL, _COMP].sum())
    n_swap = int(c[_SALL, _COMP].sum())

    tallies = {
        "e00": (c[_S10, _COMP, _VAC, _C0], n_raw),
        "e01": (c[_S10, _COMP, _VAC, _C1], n_raw),
        "e10": (c[_S01, _COMP, _VAC, _C0], n_raw),
        "e11": (c[_S01, _COMP, _VAC, _C1], n_raw),
        "p0_plus": (c[_S10, _HAD, _VAC, _C0], n_mis),
        "p1_plus": (c[_S01, _HAD, _VAC, _C0], n_mis),
        "p_plus_plus": (c[_CTRL, _HAD, :, _C0].sum(), n_test),
        "p_ctrl_0": (c[_CTRL, _COMP, :, _C0].sum(), n_mtest),
        "p_ctrl_1": (c[_CTRL, _COMP, :, _C1].sum(), n_mtest),
        "p_double": (c[_SALL, _COMP, _DBL, :].sum(), n_swap),
        "p_create_0": (c[_SALL, _COMP, _VAC, _C0], n_swap),
        "p_create_1": (c[_SALL, _COMP, _VAC, _C1], n_swap),
    }
    key_count = sum(int(tallies[k][0]) for k in ("e00", "e01", "e10", "e11"))
    tallies["m_total"] = (key_count, n_raw)

    values, errors = {}, {}
    for name in FIELDS:
        k, n = tallies[name]
        values[name], errors[name] = _estimate(int(k), int(n))
    stats = ObservedStatistics(**values)
    # m_total is a ratio of integer sums; pin it to the exact sum of its parts
    stats = dataclasses.replace(stats, m_total=stats.e00 + stats.e01 + stats.e10 + stats.e11)
    return stats, errors


def monte_carlo_counts(
    first: FirstAttack,
    second: SecondAttack,
    rounds: int,
    seed: int = 0,
    op_weights=(0.25, 0.25, 0.25, 0.25),
    p_computational: float = 0.5,
    workers: int = 1,
) -> np.ndarray:
    """Round-by-round simulation, tallied by (op, basis, Alice outcome, Bob outcome).

    Rounds are cut into fixed blocks, and block ``i`` draws from the stream
    ``SeedSequence(seed, spawn_key=(i,))``, so the tally does not depend on
    ``workers``.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    _require_isometry(second)
    weights = np.asarray(op_weights, dtype=np.float64)
    if weights.shape != (4,) or np.any(weights < 0) or weights.sum() <= 0:
        raise ValueError("op_weights must be four non-negative numbers")
    op_cdf = _cdf(weights)
    alice_cdf, bob_cdf = branch_tables(first, second)

    n_blocks = ceil(rounds / BLOCK_ROUNDS)

    def run_block(i: int) -> np.ndarray:
        size = min(BLOCK_ROUNDS, rounds - i * BLOCK_ROUNDS)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        u = rng.random((size, 4))
        return kernels.tally_rounds(op_cdf, p_computational, alice_cdf, bob_cdf, u)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, range(n_blocks)))
    else:
        parts = [run_block(i) for i in range(n_blocks)]
    return np.sum(parts, axis=0)


def monte_carlo_statistics(
    first: FirstAttack,
    second: SecondAttack,
    rounds: int,
    seed: int = 0,
    op_weights=(0.25, 0.25, 0.25, 0.25),
    p_computational: float = 0.5,
    workers: int = 1,
) -> tuple[ObservedStatistics, dict[str, float]]:
    counts = monte_carlo_counts(
        first, second, rounds, seed, op_weights, p_computational, workers
    )
    return statistics_from_counts(counts)
