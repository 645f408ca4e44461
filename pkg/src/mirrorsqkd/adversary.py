"""Eve's collective attack: an injected forward state and a reverse isometry.

The reverse attack returns at most one photon to Bob, so its action on each
input ``|m1, m0>_B |k>_E`` is three Eve vectors: the components that go out
with Bob's register in ``|0,1>``, ``|1,0>`` and ``|0,0>`` (in that order).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .fock import (
    DEFAULT_N_MAX,
    NORM_TOL,
    ONE_IN_0,
    ONE_IN_1,
    VACUUM,
    COMPUTATIONAL,
    DimensionMismatchError,
    FockStateVector,
)

# Bob's output labels, indexed by the second axis of ``SecondAttack.action``
OUTPUT_LABELS = (ONE_IN_0, ONE_IN_1, VACUUM)
OUT_01, OUT_10, OUT_00 = 0, 1, 2


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FirstAttack:
    """Eve's replacement of Bob's pulse: ``sum |m1,m0>_B |e_{m1,m0}>_E``.

    ``injected[m1, m0]`` is the (unnormalized) Eve vector ``e_{m1,m0}``.
    """

    injected: np.ndarray

    def __post_init__(self):
        inj = _frozen(self.injected)
        if inj.ndim != 3 or inj.shape[0] != inj.shape[1]:
            raise DimensionMismatchError(f"injected must be (n+1, n+1, d), got {inj.shape}")
        norm = float(np.vdot(inj, inj).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"injected state has norm^2 {norm!r}, expected 1")
        object.__setattr__(self, "injected", inj)

    @property
    def n_max(self) -> int:
        return self.injected.shape[0] - 1

    @property
    def eve_dim(self) -> int:
        return self.injected.shape[2]

    def state(self) -> FockStateVector:
        """|psi0> with Alice's ancilla in vacuum."""
        n = self.n_max + 1
        amps = np.zeros((n, n, n, n, self.eve_dim), dtype=np.complex128)
        amps[:, :, 0, 0, :] = self.injected
        return FockStateVector(amps, normalized=True)


@dataclass(frozen=True, eq=False)
class SecondAttack:
    """Reverse-channel isometry U_R.

    ``action[m1, m0, k, j]`` is the Eve output vector paired with Bob's output
    label ``OUTPUT_LABELS[j]`` when the input is ``|m1, m0>_B |k>_E``.  Inputs
    with more than ``domain_cap`` photons in a mode are outside the attack's
    domain.
    """

    action: np.ndarray

    def __post_init__(self):
        act = _frozen(self.action)
        if act.ndim != 5 or act.shape[0] != act.shape[1] or act.shape[3] != 3:
            raise DimensionMismatchError(f"action must be (L, L, d_in, 3, d_out), got {act.shape}")
        object.__setattr__(self, "action", act)

    @property
    def domain_cap(self) -> int:
        return self.action.shape[0] - 1

    @property
    def eve_dim_in(self) -> int:
        return self.action.shape[2]

    @property
    def eve_dim_out(self) -> int:
        return self.action.shape[4]

    def matrix(self) -> np.ndarray:
        """U_R as a (3 * d_out) x (L * L * d_in) matrix."""
        L, _, d_in, _, d_out = self.action.shape
        return self.action.transpose(3, 4, 0, 1, 2).reshape(3 * d_out, L * L * d_in)

    def outputs(self, m1: int, m0: int, eve_in: np.ndarray) -> np.ndarray:
        """(g01, g10, g00) for ``U_R |m1, m0>|eve_in>``, stacked as rows."""
        return np.einsum("e,ejf->jf", np.asarray(eve_in), self.action[m1, m0])

    def apply(self, state: FockStateVector) -> FockStateVector:
        """Apply U_R to Bob's register, leaving Alice's ancilla alone."""
        if state.bob_basis != COMPUTATIONAL:
            raise ValueError("U_R is defined on the computational-basis labels")
        if state.eve_dim != self.eve_dim_in:
            raise DimensionMismatchError(
                f"state has Eve dim {state.eve_dim}, attack expects {self.eve_dim_in}"
            )
        if state.n_max < 1:
            raise DimensionMismatchError("need at least one photon per mode to hold Bob's output")
        n = state.n_max + 1
        L = min(self.domain_cap + 1, n)
        amps = state.amplitudes
        if np.any(amps[L:]) or np.any(amps[:, L:]):
            raise ValueError("state has Bob photons outside the attack's domain")
        res = np.einsum("xyabe,xyejf->jabf", amps[:L, :L], self.action[:L, :L])
        out = np.zeros((n, n, n, n, self.eve_dim_out), dtype=np.complex128)
        for j, (m1, m0) in enumerate(OUTPUT_LABELS):
            out[m1, m0] = res[j]
        return FockStateVector(out, bob_basis=COMPUTATIONAL)


def verify_isometry(attack: SecondAttack, tol: float = NORM_TOL) -> bool:
    """True iff every input keeps unit norm and distinct inputs stay orthogonal."""
    v = attack.matrix()
    gram = v.conj().T @ v
    return bool(np.max(np.abs(gram - np.eye(gram.shape[0])), initial=0.0) <= tol)


@dataclass(frozen=True)
class NoiseChannelSpec:
    qz: float
    qx: float
    loss_forward: float = 0.0
    loss_reverse: float = 0.0

    def __post_init__(self):
        for name in ("qz", "qx"):
            q = getattr(self, name)
            if not 0.0 <= q <= 0.5:
                raise ValueError(f"{name}={q} outside [0, 0.5]")
        # a loss probability of exactly 1 is allowed here: it is the terminal-loss limit
        for name in ("loss_forward", "loss_reverse"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")


def build_depolarizing_attack(
    spec: NoiseChannelSpec, n_max: int = DEFAULT_N_MAX
) -> tuple[FirstAttack, SecondAttack]:
    """Dilate the single-photon depolarizing/loss scenario into an explicit attack.

    Forward: Eve sends |+> (each mode amplitude sqrt((1-pF)/2)) or, with
    probability pF, vacuum tagged by her "lost" ancilla state.

    Reverse: a photon in mode x keeps its mode with amplitude sqrt(1-Qz) and
    flips with amplitude sqrt(Qz); with probability pR it is swallowed and Eve
    keeps a which-mode record.  The Eve states left behind by the two modes
    overlap by ``c = 1 - 2 Qx``, which fixes the |+>/|-> error rate in CTRL
    rounds at Qx while keeping raw-key flips at Qz.  Vacuum stays vacuum.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    qz, qx = spec.qz, spec.qx
    keep_f = sqrt(1.0 - spec.loss_forward)
    keep_r = sqrt(1.0 - spec.loss_reverse)
    lose_r = sqrt(spec.loss_reverse)
    c = 1.0 - 2.0 * qx
    s = sqrt(max(0.0, 1.0 - c * c))

    # Eve input: 0 = a photon went on to Alice, 1 = forward loss
    injected = np.zeros((n_max + 1, n_max + 1, 2), dtype=np.complex128)
    injected[0, 1, 0] = keep_f / sqrt(2.0)
    injected[1, 0, 0] = keep_f / sqrt(2.0)
    injected[0, 0, 1] = sqrt(spec.loss_forward)

    # Eve output basis: 0..3 mode records, 4..5 reverse-loss records,
    # 6..7 vacuum passthrough, 8..11 inputs the protocol never produces
    d_out = 12
    e = np.eye(d_out)
    act = np.zeros((2, 2, 2, 3, d_out), dtype=np.complex128)

    a0, a1 = e[0], e[2]
    b0, b1 = c * e[0] + s * e[1], c * e[2] + s * e[3]

    act[0, 1, 0, OUT_01] = keep_r * sqrt(1.0 - qz) * a0
    act[0, 1, 0, OUT_10] = keep_r * sqrt(qz) * a1
    act[0, 1, 0, OUT_00] = lose_r * e[4]

    act[1, 0, 0, OUT_10] = keep_r * sqrt(1.0 - qz) * b0
    act[1, 0, 0, OUT_01] = keep_r * sqrt(qz) * b1
    act[1, 0, 0, OUT_00] = lose_r * e[5]

    act[0, 0, 0, OUT_00] = e[6]
    act[0, 0, 1, OUT_00] = e[7]

    act[0, 1, 1, OUT_00] = e[8]
    act[1, 0, 1, OUT_00] = e[9]
    act[1, 1, 0, OUT_00] = e[10]
    act[1, 1, 1, OUT_00] = e[11]

    return FirstAttack(injected), SecondAttack(act)


def random_attack(
    seed: int, eve_dim: int, photon_cap: int, n_max: int = DEFAULT_N_MAX
) -> tuple[FirstAttack, SecondAttack]:
    """Random normalized forward state (up to ``photon_cap`` per mode) and random isometry."""
    if eve_dim < 1:
        raise ValueError("eve_dim must be >= 1")
    if not 0 <= photon_cap <= n_max:
        raise ValueError(f"photon_cap must lie in [0, {n_max}]")
    rng = np.random.default_rng(seed)
    L = photon_cap + 1

    z = rng.standard_normal((L, L, eve_dim)) + 1j * rng.standard_normal((L, L, eve_dim))
    injected = np.zeros((n_max + 1, n_max + 1, eve_dim), dtype=np.complex128)
    injected[:L, :L] = z / np.linalg.norm(z)

    n_in = L * L * eve_dim
    d_out = max(1, ceil(n_in / 3))
    g = rng.standard_normal((3 * d_out, n_in)) + 1j * rng.standard_normal((3 * d_out, n_in))
    q, _ = np.linalg.qr(g)
    action = q.reshape(3, d_out, L, L, eve_dim).transpose(2, 3, 4, 0, 1)
    return FirstAttack(injected), SecondAttack(action)
