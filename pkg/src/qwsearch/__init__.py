"""Coined quantum-walk search (SKW hypercube, AKR grid) under decoherence."""

__version__ = "0.1.0"

from .state_space import (  # noqa: E402
    CorruptStateError,
    Family,
    WalkerState,
    WalkSpec,
    basis_state,
    make_uniform_state,
    marked_probability,
    norm_error,
    position_distribution,
)
from .operators import LinkSet, StepNoise, step  # noqa: E402
from .noise import NoiseKind, NoiseSpec, edge_count, realize_step_noise, strength_from_delta  # noqa: E402
from .walks import (  # noqa: E402
    Trajectory,
    run_grover,
    run_walk,
    theoretical_stop_skw,
    verify_initial_eigenstate,
)
from .metrics import CostCurve, McAggregate, cost_curve, max_unmarked, monte_carlo, scaled_cost  # noqa: E402

__all__ = [
    "__version__",
    "CorruptStateError",
    "Family",
    "WalkerState",
    "WalkSpec",
    "basis_state",
    "make_uniform_state",
    "marked_probability",
    "norm_error",
    "position_distribution",
    "LinkSet",
    "StepNoise",
    "step",
    "NoiseKind",
    "NoiseSpec",
    "edge_count",
    "realize_step_noise",
    "strength_from_delta",
    "Trajectory",
    "run_grover",
    "run_walk",
    "theoretical_stop_skw",
    "verify_initial_eigenstate",
    "CostCurve",
    "McAggregate",
    "cost_curve",
    "max_unmarked",
    "monte_carlo",
    "scaled_cost",
]
