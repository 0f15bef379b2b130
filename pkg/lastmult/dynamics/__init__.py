"""Trajectory integration and invariant monitors."""

from .integrator import (
    EVOLUTION_ATOL,
    EVOLUTION_RTOL,
    RK45_ATOL,
    RK45_RTOL,
    FlowField,
    integrate,
    integrate_variational,
    time_grid,
)
from .monitors import (
    conformal_factor_check,
    conformal_factor_series,
    evolution_consistency,
    evolution_series,
    first_integral_series,
    monitor_first_integral,
)
from .trajectory import Trajectory


__all__ = [
    "EVOLUTION_ATOL",
    "EVOLUTION_RTOL",
    "RK45_ATOL",
    "RK45_RTOL",
    "FlowField",
    "Trajectory",
    "conformal_factor_check",
    "conformal_factor_series",
    "evolution_consistency",
    "evolution_series",
    "first_integral_series",
    "integrate",
    "integrate_variational",
    "monitor_first_integral",
    "time_grid",
]
