"""Numerical laboratory for an aging fluid in 1D Couette flow."""

from .core import (
    BoundaryCondition,
    DivergenceError,
    Grid,
    InitialConditionSpec,
    Parameters,
    RunConfig,
    State,
    ValidationError,
    build_initial_state,
    config_from_dict,
    validate_parameters,
)
from .diagnostics import DiagnosticsRecord, RateFit, fit_exponential, fit_power_law, measure_beta, record, sandwich_check
from .equilibria import (
    SteadyState,
    StabilityReport,
    dulac_condition,
    fluidity_floor_m_f,
    linearized_rate,
    sigma,
    steady_homogeneous,
    steady_nonhomogeneous,
    steady_piecewise,
)
from .ode import OdeState, ode_oracle, ode_run, ode_step
from .scheme import StepReport, run, step

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "DivergenceError", "Grid", "InitialConditionSpec", "Parameters", "RunConfig", "State",
    "ValidationError", "build_initial_state", "config_from_dict", "validate_parameters",
    "DiagnosticsRecord", "RateFit", "fit_exponential", "fit_power_law", "measure_beta", "record", "sandwich_check",
    "SteadyState", "StabilityReport", "dulac_condition", "fluidity_floor_m_f", "linearized_rate", "sigma",
    "steady_homogeneous", "steady_nonhomogeneous", "steady_piecewise",
    "OdeState", "ode_oracle", "ode_run", "ode_step",
    "StepReport", "run", "step",
]
