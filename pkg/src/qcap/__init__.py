"""Capacities of noisy quantum channels, with and without prior entanglement.

Closed forms, numerical maximization of the quantum mutual information and
explicit superdense-coding / teleportation reductions, cross-checked against
each other.
"""

from .capacities import (
    CapacityReport,
    DomainError,
    c1_depolarizing,
    ce_dephasing,
    ce_depolarizing,
    ce_optimize,
    depolarizing_bounds,
    erasure_capacities,
    fccc_mr_depolarizing,
    hashing_bound,
    qe_from_ce,
    quantum_mutual_information,
)
from .channels import (
    QuantumChannel,
    apply,
    bell_diagonal,
    choi,
    dephasing,
    depolarizing,
    entropy_exchange,
    erasure,
    from_kraus,
)
from .protocols import (
    c_sd,
    fccc_tp,
    measure_reprepare,
    superdense_induced,
    teleport_induced,
    verify_bell_diagonal,
)
from .shannon import DiscreteChannel, ba_capacity, classical_erasure, dary_symmetric

__version__ = "0.1.0"

__all__ = [
    "CapacityReport",
    "DiscreteChannel",
    "DomainError",
    "QuantumChannel",
    "apply",
    "ba_capacity",
    "bell_diagonal",
    "c1_depolarizing",
    "c_sd",
    "ce_dephasing",
    "ce_depolarizing",
    "ce_optimize",
    "choi",
    "classical_erasure",
    "dary_symmetric",
    "dephasing",
    "depolarizing",
    "depolarizing_bounds",
    "entropy_exchange",
    "erasure",
    "erasure_capacities",
    "fccc_mr_depolarizing",
    "fccc_tp",
    "from_kraus",
    "hashing_bound",
    "measure_reprepare",
    "qe_from_ce",
    "quantum_mutual_information",
    "superdense_induced",
    "teleport_induced",
    "verify_bell_diagonal",
]
