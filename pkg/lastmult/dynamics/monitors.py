"""Invariant monitors evaluated along trajectories."""

from typing import Union

import numpy as np

from ..core.errors import FormError
from ..core.expr import ONE, ZERO, Expr, as_expr, diff
from ..core.forms import VectorField
from ..core.stats import ResidualStats, SampleBatch, residual_stats, residual_values
from ..utils.validation import DEFAULT_TOLERANCE
from .trajectory import Trajectory


MIN_STENCIL_POINTS = 5


def first_integral_series(traj: Trajectory, F: Expr) -> np.ndarray:
    """F(state(t), t) on the trajectory grid."""
    return traj.batch().evaluate(F)


def monitor_first_integral(
    traj: Trajectory, F: Expr, tolerance: float = DEFAULT_TOLERANCE
) -> ResidualStats:
    """Drift F(state, t) - F(state_0, t_0) over the grid."""
    batch = traj.batch()
    series = batch.evaluate(F)
    return residual_stats(
        {"drift": (series, np.full_like(series, series[0]))}, batch, tolerance
    )


def _uniform_step(traj: Trajectory) -> float:
    if len(traj) < MIN_STENCIL_POINTS:
        raise ValueError(
            f"Evolution consistency needs at least {MIN_STENCIL_POINTS} grid points, "
            f"got {len(traj)}"
        )
    steps = np.diff(traj.times)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("Evolution consistency needs a uniform time grid")
    return h


def _time_partial(traj: Trajectory, H: Expr) -> Expr:
    return ZERO if traj.time_symbol is None else diff(H, traj.time_symbol)


def numerical_rate(values: np.ndarray, h: float) -> np.ndarray:
    """d/dt on a uniform grid: fourth-order central differences inside, second order at the ends."""
    rate = np.gradient(values, h, edge_order=2)
    rate[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)
    return np.asarray(rate)


def evolution_series(traj: Trajectory, H: Expr) -> np.ndarray:
    """dH/dt along the trajectory minus the explicit time partial of H."""
    h = _uniform_step(traj)
    batch = traj.batch()
    return numerical_rate(batch.evaluate(H), h) - batch.evaluate(_time_partial(traj, H))


def _interior(batch: SampleBatch, margin: int) -> SampleBatch:
    values = {
        name: value[margin:-margin] if isinstance(value, np.ndarray) else value
        for name, value in batch.values.items()
    }
    return SampleBatch(batch.size - 2 * margin, values)


def evolution_consistency(
    traj: Trajectory,
    H: Expr,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """Along the flow of an evolution field for H, dH/dt equals dH/dt explicit.

    Only interior points, where the fourth-order stencil applies, are gated.
    """
    h = _uniform_step(traj)
    batch = traj.batch()
    values = batch.evaluate(H)
    rate = numerical_rate(values, h)[2:-2]
    interior = _interior(batch, 2)
    partial = interior.evaluate(_time_partial(traj, H))
    return residual_stats({"evolution": (rate, partial)}, interior, tolerance)


def conformal_factor_check(
    X: VectorField,
    expected_a: Union[Expr, float],
    pts: SampleBatch,
    density: Expr = ONE,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """div_mu X - a for mu = density times the coordinate volume."""
    if X.extended:
        raise FormError("Conformal factor is defined for spatial fields")
    return residual_values(
        X.divergence(density), as_expr(expected_a), pts, tolerance, "divergence"
    )


def conformal_factor_series(
    traj: Trajectory,
    X: VectorField,
    expected_a: Union[Expr, float],
    density: Expr = ONE,
) -> np.ndarray:
    batch = traj.batch()
    return batch.evaluate(X.divergence(density)) - batch.evaluate(as_expr(expected_a))


__all__ = [
    "conformal_factor_check",
    "conformal_factor_series",
    "evolution_consistency",
    "evolution_series",
    "first_integral_series",
    "monitor_first_integral",
    "numerical_rate",
]
