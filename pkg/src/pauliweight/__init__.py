"""Pauli-weight dynamics in locally-scrambled brick-wall circuits.

Four cross-validating engines (dense, tensor-train, Monte Carlo, mean-field)
for occupation fields, Pauli weights, shadow norms and optimal-depth scans,
plus gate-level operator-entanglement analysis of two-qubit ensembles.
"""

from .transfer import (
    EntanglementCoords,
    TransferMatrix,
    check_feasible,
    clifford_tm,
    dual_unitary_tm,
    general_tm,
    two_qubit_shadow_norm,
)
from .gates import (
    alpha_from_j,
    build_v,
    entanglement_coords,
    named_gate,
    operator_purities,
    twirled_transfer_matrix,
)
from .dense import (
    BrickwallSpec,
    SupportPattern,
    WeightState,
    evolve,
    init_state,
    occupation,
    pauli_weight,
    shadow_norm,
)
from .mps import (
    MpsWeightState,
    mps_evolve,
    mps_log_pauli_weight,
    mps_occupation_profile,
    mps_pauli_weight,
    mps_shadow_norm,
)
from .mc import (
    estimate_occupation,
    estimate_pauli_weight,
    sample_trajectory,
)
from .meanfield import (
    beta_mft,
    fit_alpha_prime,
    mf_evolve,
    optimal_depth,
)
from .experiments import ExperimentConfig

__all__ = [
    "EntanglementCoords",
    "TransferMatrix",
    "check_feasible",
    "clifford_tm",
    "dual_unitary_tm",
    "general_tm",
    "two_qubit_shadow_norm",
    "alpha_from_j",
    "build_v",
    "entanglement_coords",
    "named_gate",
    "operator_purities",
    "twirled_transfer_matrix",
    "BrickwallSpec",
    "SupportPattern",
    "WeightState",
    "evolve",
    "init_state",
    "occupation",
    "pauli_weight",
    "shadow_norm",
    "MpsWeightState",
    "mps_evolve",
    "mps_log_pauli_weight",
    "mps_occupation_profile",
    "mps_pauli_weight",
    "mps_shadow_norm",
    "estimate_occupation",
    "estimate_pauli_weight",
    "sample_trajectory",
    "beta_mft",
    "fit_alpha_prime",
    "mf_evolve",
    "optimal_depth",
    "ExperimentConfig",
]

__version__ = "0.1.0"
