"""Listen-or-transmit decisions for a secondary user overhearing primary ARQ feedback."""

from ._core import (
    ChannelModel,
    ConstructionError,
    DegenerateObservationError,
    Error,
    InvariantViolation,
    PreconditionError,
    SolverError,
    StateError,
    ValueGrid,
    __version__,
    evaluate_m_policy,
    fit_transitions,
    generate_feedback,
    greedy_burst_length,
    optimal_m,
    rate_region,
    simulate,
    solve,
    threshold,
)

__all__ = [
    "ChannelModel",
    "ConstructionError",
    "DegenerateObservationError",
    "Error",
    "InvariantViolation",
    "PreconditionError",
    "SolverError",
    "StateError",
    "ValueGrid",
    "__version__",
    "evaluate_m_policy",
    "fit_transitions",
    "generate_feedback",
    "greedy_burst_length",
    "optimal_m",
    "rate_region",
    "simulate",
    "solve",
    "threshold",
]
