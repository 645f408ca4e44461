"""Truncated two-mode Fock space shared by Bob's register, Alice's ancilla and Eve.

A state is stored densely as an array indexed ``[b1, b0, a1, a0, e]``: photon
counts of Bob's |1> and |0> modes, of Alice's ancilla modes, and an index into
Eve's ancilla.  With the default truncation (4 photons per mode) that is at most
625 * dim(E) amplitudes, so a dense layout is cheaper than a sparse map.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, sqrt
from typing import NamedTuple

import numpy as np

DEFAULT_N_MAX = 4
NORM_TOL = 1e-10

COMPUTATIONAL = "computational"
HADAMARD = "hadamard"

BOB = "bob"
ALICE = "alice"

# detector outcome names, per basis
COMPUTATIONAL_OUTCOMES = ("vacuum", "click0", "click1", "double")
HADAMARD_OUTCOMES = ("vacuum", "plus", "minus", "double")


class DimensionMismatchError(ValueError):
    """Two states live in incompatible spaces."""


class DegenerateStateError(ValueError):
    """An operation needs a state with nonzero norm."""


class FockBasisLabel(NamedTuple):
    m1: int
    m0: int


VACUUM = FockBasisLabel(0, 0)
ONE_IN_0 = FockBasisLabel(0, 1)
ONE_IN_1 = FockBasisLabel(1, 0)


@dataclass(frozen=True, eq=False)
class FockStateVector:
    """Amplitudes over Bob (x) Alice-ancilla (x) Eve.

    ``bob_basis`` records how Bob's single-photon labels are to be read.  In the
    Hadamard frame ``(0, 1)`` is |+> and ``(1, 0)`` is |->, following the
    |0,1>_x / |1,0>_x naming.
    """

    amplitudes: np.ndarray
    normalized: bool = False
    bob_basis: str = COMPUTATIONAL

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 5 or len(set(amps.shape[:4])) != 1:
            raise DimensionMismatchError(
                f"expected shape (n+1, n+1, n+1, n+1, d), got {amps.shape}"
            )
        if amps.shape[4] < 1:
            raise DimensionMismatchError("Eve ancilla dimension must be >= 1")
        if self.bob_basis not in (COMPUTATIONAL, HADAMARD):
            raise ValueError(f"unknown basis {self.bob_basis!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm_squared() - 1.0) > NORM_TOL:
            raise ValueError(
                f"state flagged normalized has norm^2 {self.norm_squared():.3e}"
            )

    @classmethod
    def zeros(cls, n_max: int = DEFAULT_N_MAX, eve_dim: int = 1) -> FockStateVector:
        return cls(np.zeros((n_max + 1,) * 4 + (eve_dim,), dtype=np.complex128))

    @classmethod
    def from_components(
        cls,
        components: dict,
        n_max: int = DEFAULT_N_MAX,
        eve_dim: int = 1,
        normalize: bool = False,
    ) -> FockStateVector:
        """Build a state from ``{(bob_label, alice_label, eve_index): amplitude}``."""
        amps = np.zeros((n_max + 1,) * 4 + (eve_dim,), dtype=np.complex128)
        for (bob, alice, e), value in components.items():
            amps[bob[0], bob[1], alice[0], alice[1], e] += value
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise DegenerateStateError("cannot normalize the zero vector")
            amps /= norm
        return cls(amps, normalized=normalize)

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def eve_dim(self) -> int:
        return self.amplitudes.shape[4]

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, bob, alice=VACUUM, eve: int = 0) -> complex:
        return complex(self.amplitudes[bob[0], bob[1], alice[0], alice[1], eve])

    def components(self, tol: float = 0.0) -> dict:
        """Nonzero amplitudes as ``{(bob_label, alice_label, eve): amplitude}``."""
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.amplitudes) > tol)):
            b1, b0, a1, a0, e = (int(i) for i in idx)
            out[(FockBasisLabel(b1, b0), FockBasisLabel(a1, a0), e)] = complex(
                self.amplitudes[idx]
            )
        return out

    def with_amplitudes(self, amplitudes: np.ndarray, **changes) -> FockStateVector:
        fields = {"normalized": False, "bob_basis": self.bob_basis}
        fields.update(changes)
        return FockStateVector(amplitudes, **fields)


def inner_product(a: FockStateVector, b: FockStateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.amplitudes.shape != b.amplitudes.shape:
        raise DimensionMismatchError(
            f"shapes differ: {a.amplitudes.shape} vs {b.amplitudes.shape}"
        )
    if a.bob_basis != b.bob_basis:
        raise DimensionMismatchError("states are expressed in different Bob bases")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _swap_single_photon_frame(amps: np.ndarray) -> np.ndarray:
    # |0,1> -> (|+> + |->)/sqrt2 and |1,0> -> (|+> - |->)/sqrt2; the map is its own inverse
    out = amps.copy()
    zero = amps[0, 1]
    one = amps[1, 0]
    out[0, 1] = (zero + one) / sqrt(2.0)
    out[1, 0] = (zero - one) / sqrt(2.0)
    return out


def to_hadamard_amplitudes(v: FockStateVector) -> FockStateVector:
    """Rewrite Bob's single-photon components in the {|+>, |->} frame.

    Vacuum and multi-photon labels are left as they are.  Applying the function
    to a state already in the Hadamard frame returns it to the computational one.
    """
    target = HADAMARD if v.bob_basis == COMPUTATIONAL else COMPUTATIONAL
    return v.with_amplitudes(_swap_single_photon_frame(v.amplitudes), bob_basis=target)


def to_computational_amplitudes(v: FockStateVector) -> FockStateVector:
    if v.bob_basis == COMPUTATIONAL:
        return v
    return to_hadamard_amplitudes(v)


def _beam_splitter_rows(m1: int, m0: int) -> dict[tuple[int, int], float]:
    """Expansion of |m1, m0> in Hadamard-mode Fock labels (minus count, plus count).

    Uses a0^dag = (p^dag + q^dag)/sqrt2, a1^dag = (p^dag - q^dag)/sqrt2 with p the
    |+> mode and q the |-> mode.
    """
    n = m1 + m0
    # poly[k] = coefficient of p^k q^(n-k)
    poly = np.zeros(n + 1)
    for i in range(m1 + 1):
        for j in range(m0 + 1):
            # (p - q)^m1 term: C(m1,i) p^i (-q)^(m1-i); (p + q)^m0 term: C(m0,j) p^j q^(m0-j)
            poly[i + j] += comb(m1, i) * (-1) ** (m1 - i) * comb(m0, j)
    scale = 1.0 / (sqrt(2.0) ** n * sqrt(factorial(m1) * factorial(m0)))
    rows = {}
    for k in range(n + 1):
        if poly[k] != 0:
            rows[(n - k, k)] = poly[k] * scale * sqrt(factorial(k) * factorial(n - k))
    return rows


def _detector_class(m_first: int, m_second: int) -> int:
    # index into the 4-outcome tuple: vacuum, second-mode click, first-mode click, double
    if m_first == 0 and m_second == 0:
        return 0
    if m_first == 0:
        return 1
    if m_second == 0:
        return 2
    return 3


def measurement_probabilities(
    v: FockStateVector, register: str = BOB, basis: str = COMPUTATIONAL
) -> dict[str, float]:
    """Threshold-detector outcome probabilities for one register.

    The probabilities are not renormalized: they add up to ``v.norm_squared()``,
    which is what branch bookkeeping on unnormalized states needs.  Any label
    with photons in both measured modes counts as a double click.
    """
    total = v.norm_squared()
    if total == 0.0:
        raise DegenerateStateError("measurement of a zero-norm state")
    if register not in (BOB, ALICE):
        raise ValueError(f"unknown register {register!r}")
    if register == ALICE and basis != COMPUTATIONAL:
        raise ValueError("Alice can only measure in the computational basis")

    amps = v.amplitudes
    if register == BOB:
        amps = to_computational_amplitudes(v).amplitudes
        # population per Bob label, coherent over the rest of the system
        weights = amps.reshape(amps.shape[0], amps.shape[1], -1)
    else:
        weights = np.moveaxis(amps, (2, 3), (0, 1)).reshape(
            amps.shape[2], amps.shape[3], -1
        )

    probs = np.zeros(4)
    if basis == COMPUTATIONAL:
        pops = np.sum(np.abs(weights) ** 2, axis=2)
        for m1 in range(pops.shape[0]):
            for m0 in range(pops.shape[1]):
                probs[_detector_class(m1, m0)] += pops[m1, m0]
        return dict(zip(COMPUTATIONAL_OUTCOMES, probs.tolist()))

    if basis != HADAMARD:
        raise ValueError(f"unknown basis {basis!r}")
    # photon number is conserved by the basis change, so transform one sector at a time
    n_cap = weights.shape[0] - 1
    for n in range(2 * n_cap + 1):
        sector: dict[tuple[int, int], np.ndarray] = {}
        for m1 in range(max(0, n - n_cap), min(n, n_cap) + 1):
            col = weights[m1, n - m1]
            if not np.any(col):
                continue
            for label, coeff in _beam_splitter_rows(m1, n - m1).items():
                sector[label] = sector.get(label, 0) + coeff * col
        for (minus, plus), col in sector.items():
            probs[_detector_class(minus, plus)] += float(np.vdot(col, col).real)
    return dict(zip(HADAMARD_OUTCOMES, probs.tolist()))


def project(
    v: FockStateVector, register: str, outcome: str, basis: str = COMPUTATIONAL
) -> FockStateVector:
    """Unnormalized post-measurement branch for a computational-basis outcome."""
    if basis != COMPUTATIONAL:
        raise NotImplementedError("projection is only needed in the computational basis")
    if outcome not in COMPUTATIONAL_OUTCOMES:
        raise ValueError(f"unknown outcome {outcome!r}")
    target = COMPUTATIONAL_OUTCOMES.index(outcome)
    n = v.n_max + 1
    mask = np.array(
        [[_detector_class(m1, m0) == target for m0 in range(n)] for m1 in range(n)]
    )
    if register == BOB:
        comp = to_computational_amplitudes(v)
        amps = comp.amplitudes * mask[:, :, None, None, None]
        return comp.with_amplitudes(amps)
    if register == ALICE:
        amps = v.amplitudes * mask[None, None, :, :, None]
        return v.with_amplitudes(amps)
    raise ValueError(f"unknown register {register!r}")
