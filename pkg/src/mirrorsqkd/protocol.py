"""Alice's classical operations, Bob's basis choice and round bookkeeping."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import isclose, sqrt
from typing import Optional

import numpy as np

from .fock import (
    ALICE,
    COMPUTATIONAL,
    HADAMARD,
    ONE_IN_0,
    ONE_IN_1,
    FockBasisLabel,
    FockStateVector,
    project,
    to_hadamard_amplitudes,
)


class PreconditionError(ValueError):
    pass


class AliceOperation(enum.Enum):
    CTRL = "CTRL"
    SWAP10 = "SWAP-10"
    SWAP01 = "SWAP-01"
    SWAPALL = "SWAP-ALL"


class BobBasis(enum.Enum):
    COMPUTATIONAL = COMPUTATIONAL
    HADAMARD = HADAMARD


class RoundType(enum.Enum):
    RAW_KEY = "raw key"
    MISMATCHED_RAW_KEY = "mismatched raw key"
    TEST = "test"
    MISMATCHED_TEST = "mismatched test"
    SWAP_ALL = "SWAP-ALL"
    MISMATCHED_SWAP_ALL = "mismatched SWAP-ALL"


# Alice's raw key bit: SWAP-10 keeps the |0> mode for Bob, so it encodes bit 0.
RAW_KEY_BIT = {AliceOperation.SWAP10: 0, AliceOperation.SWAP01: 1}

_ROUND_TABLE = {
    ("SWAP-x", BobBasis.COMPUTATIONAL): RoundType.RAW_KEY,
    ("SWAP-x", BobBasis.HADAMARD): RoundType.MISMATCHED_RAW_KEY,
    ("CTRL", BobBasis.HADAMARD): RoundType.TEST,
    ("CTRL", BobBasis.COMPUTATIONAL): RoundType.MISMATCHED_TEST,
    ("SWAP-ALL", BobBasis.COMPUTATIONAL): RoundType.SWAP_ALL,
    ("SWAP-ALL", BobBasis.HADAMARD): RoundType.MISMATCHED_SWAP_ALL,
}


def classify_round(op: AliceOperation, basis: BobBasis) -> RoundType:
    if op in (AliceOperation.SWAP10, AliceOperation.SWAP01):
        family = "SWAP-x"
    elif op is AliceOperation.CTRL:
        family = "CTRL"
    else:
        family = "SWAP-ALL"
    return _ROUND_TABLE[(family, basis)]


def apply_alice_operation(op: AliceOperation, state: FockStateVector) -> FockStateVector:
    """Act with CTRL / SWAP-10 / SWAP-01 / SWAP-ALL on a fresh ancilla.

    Bob's register must be in the computational frame and Alice's ancilla must
    be vacuum.  The photons Alice keeps are moved into her ancilla; she measures
    the ancilla afterwards (see :func:`alice_branch`).
    """
    if state.bob_basis != COMPUTATIONAL:
        raise PreconditionError("Alice acts on the computational-basis modes")
    amps = state.amplitudes
    if np.any(amps[:, :, 1:, :, :]) or np.any(amps[:, :, :, 1:, :]):
        raise PreconditionError("Alice's ancilla must start in the vacuum |0,0>")

    if op is AliceOperation.CTRL:
        return state.with_amplitudes(amps.copy())

    bob = amps[:, :, 0, 0, :]  # [m1, m0, e]
    out = np.zeros_like(amps)
    if op is AliceOperation.SWAP10:
        # |m1,m0>_B -> |m1,0>_anc |0,m0>_B
        out[0, :, :, 0, :] = np.transpose(bob, (1, 0, 2))
    elif op is AliceOperation.SWAP01:
        # |m1,m0>_B -> |0,m0>_anc |m1,0>_B
        out[:, 0, 0, :, :] = bob
    elif op is AliceOperation.SWAPALL:
        out[0, 0, :, :, :] = bob
    else:  # pragma: no cover
        raise ValueError(op)
    return state.with_amplitudes(out)


def alice_branch(state: FockStateVector, outcome: str) -> FockStateVector:
    """Unnormalized state after Alice's ancilla measurement gives ``outcome``."""
    return project(state, ALICE, outcome)


@dataclass(frozen=True)
class BobState:
    label: FockBasisLabel
    basis: str


@dataclass(frozen=True)
class IdealOutcome:
    alice_detects: bool
    state_to_bob: BobState
    probability: float
    raw_key_bit: Optional[int]


def _identify_bob_state(branch: FockStateVector) -> BobState:
    # the branch is a pure single-label state in one of the two frames
    norm = branch.norm_squared()
    for candidate in (branch, to_hadamard_amplitudes(branch)):
        bob_pop = np.sum(np.abs(candidate.amplitudes) ** 2, axis=(2, 3, 4))
        m1, m0 = np.unravel_index(np.argmax(bob_pop), bob_pop.shape)
        if isclose(bob_pop[m1, m0], norm, rel_tol=1e-12):
            return BobState(FockBasisLabel(int(m1), int(m0)), candidate.bob_basis)
    raise ValueError("state sent to Bob is not a single basis state")


def ideal_round_outcome(op: AliceOperation) -> list[IdealOutcome]:
    """Branches of an error-free, loss-free round where Bob sent |+>."""
    plus = FockStateVector.from_components(
        {(ONE_IN_0, (0, 0), 0): 1 / sqrt(2), (ONE_IN_1, (0, 0), 0): 1 / sqrt(2)},
        normalize=True,
    )
    after = apply_alice_operation(op, plus)
    quiet = alice_branch(after, "vacuum")
    clicked = after.with_amplitudes(after.amplitudes - quiet.amplitudes)
    rows = []
    for detected, branch in ((False, quiet), (True, clicked)):
        p = branch.norm_squared()
        if p < 1e-15:
            continue
        bit = None if detected else RAW_KEY_BIT.get(op)
        rows.append(IdealOutcome(detected, _identify_bob_state(branch), p, bit))
    return rows
