"""Python interface to the CBDC/banking New Keynesian model engine."""

from ._core import (  # noqa: F401
    BlanchardKahnError,
    ConfigError,
    SolverError,
    TaylorCoefficients,
    baseline_calibration_dict,
    compensating_fraction,
    conditional_welfare,
    irf,
    optimize_rule,
    simulate,
    steady_state,
    utility_flow,
    variable_names,
)

__all__ = [
    "BlanchardKahnError",
    "ConfigError",
    "SolverError",
    "TaylorCoefficients",
    "baseline_calibration_dict",
    "compensating_fraction",
    "conditional_welfare",
    "irf",
    "optimize_rule",
    "simulate",
    "steady_state",
    "utility_flow",
    "variable_names",
]
