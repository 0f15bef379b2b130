"""Fixed-step RK4 and adaptive RK45 integration of symbolic vector fields."""

import math
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from ..core.errors import DomainError, IntegrationError, MissingSymbolError
from ..core.expr import compile_expr, diff
from ..core.forms import VectorField
from ..core.logger import get_logger
from ..utils.validation import ConfigValidator
from .trajectory import Trajectory


logger = get_logger(__name__)

RK45_RTOL = 1e-9
RK45_ATOL = 1e-12

# finite differences of the states amplify solver noise by 1/dt
EVOLUTION_RTOL = 1e-12
EVOLUTION_ATOL = 1e-15

_validator = ConfigValidator()

InitialState = Union[Mapping[str, float], Sequence[float]]
Rhs = Callable[[float, np.ndarray], np.ndarray]


class FlowField:
    """Compiled right-hand side ``(t, state) -> derivative`` of a spatial field."""

    def __init__(self, field: VectorField, params: Optional[Mapping[str, float]] = None):
        if field.extended:
            field = field.spatial()
        self.coords: Tuple[str, ...] = field.chart.coords
        self.time = field.chart.time
        self.params: Dict[str, float] = dict(field.chart.defaults)
        self.params.update(params or {})
        self._components = [compile_expr(c) for c in field.components]
        self._jacobian = [
            [compile_expr(diff(c, name)) for name in self.coords] for c in field.components
        ]

    def env(self, t: float, state: np.ndarray) -> Dict[str, float]:
        env = dict(self.params)
        env.update(zip(self.coords, (float(v) for v in state)))
        if self.time is not None:
            env[self.time] = float(t)
        return env

    def __call__(self, t: float, state: np.ndarray) -> np.ndarray:
        env = self.env(t, state)
        return np.array([component(env) for component in self._components], dtype=float)

    def jacobian(self, t: float, state: np.ndarray) -> np.ndarray:
        env = self.env(t, state)
        return np.array(
            [[entry(env) for entry in row] for row in self._jacobian], dtype=float
        )

    def variational(self) -> Rhs:
        """Right-hand side of (state, Phi) with Phi' = J Phi, Phi flattened row-major."""
        n = len(self.coords)

        def rhs(t: float, augmented: np.ndarray) -> np.ndarray:
            state = augmented[:n]
            phi = augmented[n:].reshape(n, n)
            return np.concatenate([self(t, state), (self.jacobian(t, state) @ phi).ravel()])

        return rhs


def time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """Uniform grid from t0 to t1 whose step does not exceed dt."""
    t0, t1, dt = _validator.validate_time_window(t0, t1, dt)
    steps = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    grid = t0 + (t1 - t0) * np.arange(steps + 1) / steps
    grid[-1] = t1
    return grid


def _initial_vector(x0: InitialState, coords: Sequence[str]) -> np.ndarray:
    if isinstance(x0, Mapping):
        missing = [name for name in coords if name not in x0]
        if missing:
            raise ValueError(f"Initial state lacks {', '.join(missing)}")
        values = [float(x0[name]) for name in coords]
    else:
        values = [float(v) for v in x0]
        if len(values) != len(coords):
            raise ValueError(
                f"Expected {len(coords)} initial values ({', '.join(coords)}), got {len(values)}"
            )
    return np.array(values, dtype=float)


def _rk4(rhs: Rhs, grid: np.ndarray, y0: np.ndarray) -> np.ndarray:
    states = np.empty((grid.size, y0.size))
    states[0] = y0
    y = y0
    for i in range(grid.size - 1):
        t, h = grid[i], grid[i + 1] - grid[i]
        try:
            k1 = rhs(t, y)
            k2 = rhs(t + h / 2, y + h / 2 * k1)
            k3 = rhs(t + h / 2, y + h / 2 * k2)
            k4 = rhs(t + h, y + h * k3)
        except DomainError as exc:
            raise IntegrationError(f"Step failed: {exc}", float(t), y.copy()) from exc
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("State left the finite range", float(grid[i + 1]), y)
        states[i + 1] = y
    return states


def _rk45(
    rhs: Rhs, grid: np.ndarray, y0: np.ndarray, rtol: float, atol: float
) -> np.ndarray:
    last_t, last_y = float(grid[0]), y0

    def tracked(t: float, y: np.ndarray) -> np.ndarray:
        nonlocal last_t, last_y
        last_t, last_y = float(t), y
        return rhs(t, y)

    try:
        solution = solve_ivp(
            tracked,
            (grid[0], grid[-1]),
            y0,
            method="RK45",
            t_eval=grid,
            rtol=rtol,
            atol=atol,
        )
    except DomainError as exc:
        raise IntegrationError(f"Step failed: {exc}", last_t, np.array(last_y)) from exc

    if not solution.success or solution.y.shape[1] != grid.size:
        failed_at = float(solution.t[-1]) if solution.t.size else float(grid[0])
        state = solution.y[:, -1] if solution.y.size else y0
        raise IntegrationError(f"Step failed: {solution.message}", failed_at, state)
    if not np.all(np.isfinite(solution.y)):
        raise IntegrationError("State left the finite range", last_t, np.array(last_y))
    return np.asarray(solution.y.T)


def _solve(
    rhs: Rhs,
    grid: np.ndarray,
    y0: np.ndarray,
    method: str,
    rtol: float = RK45_RTOL,
    atol: float = RK45_ATOL,
) -> np.ndarray:
    method = _validator.validate_method(method)
    if method == "rk4":
        return _rk4(rhs, grid, y0)
    rtol = _validator.validate_tolerance(rtol)
    atol = _validator.validate_tolerance(atol)
    return _rk45(rhs, grid, y0, rtol, atol)


def integrate(
    X: VectorField,
    x0: InitialState,
    t0: float,
    t1: float,
    dt: float,
    method: str = "rk45",
    params: Optional[Mapping[str, float]] = None,
    rtol: float = RK45_RTOL,
    atol: float = RK45_ATOL,
) -> Trajectory:
    """Integrate X from x0 over [t0, t1]; the result is sampled on ``time_grid``.

    ``rtol`` and ``atol`` apply to rk45 only.
    """
    flow = FlowField(X, params)
    grid = time_grid(t0, t1, dt)
    y0 = _initial_vector(x0, flow.coords)

    logger.debug("integration_started", method=method, t0=t0, t1=t1, steps=grid.size - 1)
    try:
        states = _solve(flow, grid, y0, method, rtol, atol)
    except MissingSymbolError as exc:
        raise ValueError(f"Vector field needs a value for '{exc.symbol}'") from exc
    except IntegrationError as exc:
        logger.error("integration_failed", time=exc.time, error=str(exc))
        raise

    return Trajectory(flow.coords, grid, states, flow.time, flow.params)


def integrate_variational(
    X: VectorField,
    x0: InitialState,
    t0: float,
    t1: float,
    dt: float,
    method: str = "rk45",
    params: Optional[Mapping[str, float]] = None,
    rtol: float = RK45_RTOL,
    atol: float = RK45_ATOL,
) -> Tuple[Trajectory, np.ndarray]:
    """Integrate X with its tangent flow.

    Returns the trajectory, with a ``logdet`` monitor holding log|det Phi(t)|,
    and the stack of flow-map Jacobians Phi(t) of shape (len(grid), n, n).
    """
    flow = FlowField(X, params)
    grid = time_grid(t0, t1, dt)
    y0 = _initial_vector(x0, flow.coords)
    n = y0.size
    augmented0 = np.concatenate([y0, np.eye(n).ravel()])

    try:
        solution = _solve(flow.variational(), grid, augmented0, method, rtol, atol)
    except IntegrationError as exc:
        logger.error("integration_failed", time=exc.time, error=str(exc))
        raise

    jacobians = solution[:, n:].reshape(grid.size, n, n)
    _, logdet = np.linalg.slogdet(jacobians)
    trajectory = Trajectory(flow.coords, grid, solution[:, :n], flow.time, flow.params)
    return trajectory.with_monitor("logdet", logdet), jacobians


__all__ = [
    "EVOLUTION_ATOL",
    "EVOLUTION_RTOL",
    "RK45_ATOL",
    "RK45_RTOL",
    "FlowField",
    "integrate",
    "integrate_variational",
    "time_grid",
]
