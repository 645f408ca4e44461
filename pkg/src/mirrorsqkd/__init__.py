"""Mirror semiquantum key distribution: collective-attack statistics and key-rate bound."""

__version__ = "0.1.0"

from .adversary import (
    FirstAttack,
    NoiseChannelSpec,
    SecondAttack,
    build_depolarizing_attack,
    random_attack,
    verify_isometry,
)
from .fock import FockBasisLabel, FockStateVector, inner_product, measurement_probabilities
from .keyrate import (
    ConstraintSet,
    KeyRateResult,
    binary_entropy,
    build_constraints,
    key_rate,
    minimize_sae,
    sae_bound,
)
from .protocol import AliceOperation, BobBasis, RoundType, apply_alice_operation, classify_round
from .scenarios import (
    ScenarioConfig,
    bb84_baseline,
    closed_form_statistics,
    fiber_loss,
    find_threshold,
    sweep_curve,
)
from .stats import (
    EveVectors,
    ObservedStatistics,
    analytic_statistics,
    check_lemma1,
    eve_vectors,
    monte_carlo_statistics,
)

__all__ = [
    "AliceOperation",
    "BobBasis",
    "ConstraintSet",
    "EveVectors",
    "FirstAttack",
    "FockBasisLabel",
    "FockStateVector",
    "KeyRateResult",
    "NoiseChannelSpec",
    "ObservedStatistics",
    "RoundType",
    "ScenarioConfig",
    "SecondAttack",
    "analytic_statistics",
    "apply_alice_operation",
    "bb84_baseline",
    "binary_entropy",
    "build_constraints",
    "build_depolarizing_attack",
    "check_lemma1",
    "classify_round",
    "closed_form_statistics",
    "eve_vectors",
    "fiber_loss",
    "find_threshold",
    "inner_product",
    "key_rate",
    "measurement_probabilities",
    "minimize_sae",
    "monte_carlo_statistics",
    "random_attack",
    "sae_bound",
    "sweep_curve",
    "verify_isometry",
]
