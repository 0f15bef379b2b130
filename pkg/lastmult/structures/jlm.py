"""Jacobi last multiplier method: residuals, reconstruction, coordinate checks."""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Sequence, Tuple

import numpy as np

from ..core.errors import (
    DomainError,
    FormError,
    PathDependenceError,
    QuadratureError,
    SingularPathError,
    SingularTransformError,
)
from ..core.expr import (
    ZERO,
    Chart,
    Expr,
    compile_expr,
    diff,
    mul,
    neg,
    sub,
    substitute,
)
from ..core.forms import (
    DifferentialForm,
    VectorField,
    coordinate_differential,
    differential,
    project_spatial,
    residual_form,
    wedge,
)
from ..core.logger import get_logger
from ..core.stats import ResidualStats, SampleBatch, residual_stats
from ..utils.validation import (
    DEFAULT_TOLERANCE,
    QUADRATURE_TOLERANCE,
    RECONSTRUCTION_TOLERANCE,
)


logger = get_logger(__name__)

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)
_MAX_DEPTH = 40
_ROUNDING = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class MultiplierData:
    """Dynamics X, multiplier M and auxiliary functions (psi, phi[, varphi])."""

    chart: Chart
    field: VectorField
    multiplier: Expr
    aux: Tuple[Expr, ...] = ()

    def __post_init__(self) -> None:
        if self.field.extended:
            raise FormError("Dynamics must be a spatial vector field")
        aux = tuple(self.aux) or (ZERO,) * self.chart.dimension
        if len(aux) != self.chart.dimension:
            raise FormError(
                f"Expected {self.chart.dimension} auxiliary functions, got {len(aux)}"
            )
        object.__setattr__(self, "aux", aux)

    @property
    def reduced(self) -> Tuple[Expr, ...]:
        """M (f_i - aux_i) for each coordinate."""
        return tuple(
            mul(self.multiplier, sub(f, a))
            for f, a in zip(self.field.components, self.aux)
        )


@dataclass(frozen=True)
class CoordinateTransform:
    """Target coordinates given as expressions in source coordinates and time."""

    source: Chart
    targets: Tuple[str, ...]
    maps: Tuple[Expr, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.targets) != len(self.maps):
            raise FormError("Each target coordinate needs exactly one map")
        if len(self.targets) != self.source.dimension:
            raise FormError(
                f"Transform needs {self.source.dimension} target coordinates"
            )

    @property
    def target_chart(self) -> Chart:
        return Chart(self.targets, self.source.time, self.source.params, self.source.defaults)

    def as_mapping(self) -> Dict[str, Expr]:
        return dict(zip(self.targets, self.maps))

    def jacobian(self) -> Tuple[Tuple[Expr, ...], ...]:
        """Spatial Jacobian d(target_i)/d(source_j)."""
        return tuple(
            tuple(diff(m, name) for name in self.source.coords) for m in self.maps
        )

    def check_nonsingular(self, pts: SampleBatch) -> None:
        rows = [[pts.evaluate(entry) for entry in row] for row in self.jacobian()]
        matrices = np.moveaxis(np.array(rows), -1, 0)
        determinants = np.linalg.det(matrices)
        bad = np.flatnonzero(np.abs(determinants) < 1e-300)
        if bad.size:
            raise SingularTransformError(
                "Transform Jacobian is singular at a sample point",
                pts.point(int(bad[0])),
            )

    def push_batch(self, pts: SampleBatch) -> SampleBatch:
        """Sample batch in target coordinates (time and parameters carried over)."""
        values = {name: pts.evaluate(m) for name, m in zip(self.targets, self.maps)}
        carried = {
            name: value
            for name, value in pts.values.items()
            if name not in self.source.coords
        }
        carried.update(values)
        return SampleBatch(pts.size, carried)


def jlm_residual(
    X: VectorField,
    M: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """dM/dt + M div X = 0, with dM/dt the total derivative along X."""
    chart = X.chart
    lhs = X.apply(M)
    if chart.time is not None:
        lhs = diff(M, chart.time) + lhs
    rhs = neg(mul(M, X.divergence()))
    return residual_stats(
        {"jlm": (pts.evaluate(lhs), pts.evaluate(rhs))}, pts, tolerance
    )


def exactness_residual_2d(
    d: MultiplierData, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> ResidualStats:
    """d_x[M(f - psi)] + d_y[M(g - phi)] = 0."""
    if d.chart.dimension != 2:
        raise FormError("Exactness check is planar")
    x, y = d.chart.coords
    first, second = d.reduced
    lhs = diff(first, x)
    rhs = neg(diff(second, y))
    return residual_stats(
        {"exactness": (pts.evaluate(lhs), pts.evaluate(rhs))}, pts, tolerance
    )


def hamiltonian_gradient_residual(
    d: MultiplierData,
    H: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """H_y = M(f - psi) and H_x = -M(g - phi)."""
    x, y = d.chart.coords
    first, second = d.reduced
    return residual_stats(
        {
            f"d{y}": (pts.evaluate(diff(H, y)), pts.evaluate(first)),
            f"d{x}": (pts.evaluate(diff(H, x)), pts.evaluate(neg(second))),
        },
        pts,
        tolerance,
    )


def line_one_form(d: MultiplierData) -> Tuple[Expr, Expr]:
    """Coefficients (dx, dy) of M(f - psi) dy - M(g - phi) dx."""
    first, second = d.reduced
    return neg(second), first


def _gauss(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    middle = 0.5 * (b + a)
    return float(half * np.dot(_WEIGHTS, f(middle + half * _NODES)))


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tolerance: float = QUADRATURE_TOLERANCE,
) -> float:
    """Composite 16-point Gauss-Legendre with interval bisection."""
    if a == b:
        return 0.0

    def refine(lo: float, hi: float, whole: float, tol: float, depth: int) -> float:
        mid = 0.5 * (lo + hi)
        left = _gauss(f, lo, mid)
        right = _gauss(f, mid, hi)
        if not math.isfinite(left + right):
            raise SingularPathError(f"Integrand is not finite on [{lo}, {hi}]")
        if abs(left + right - whole) <= max(tol, _ROUNDING * abs(left + right)):
            return left + right
        if depth >= _MAX_DEPTH:
            raise QuadratureError(
                f"Quadrature did not converge on [{lo}, {hi}]"
            )
        return refine(lo, mid, left, tol / 2, depth + 1) + refine(
            mid, hi, right, tol / 2, depth + 1
        )

    whole = _gauss(f, a, b)
    if not math.isfinite(whole):
        raise SingularPathError(f"Integrand is not finite on [{a}, {b}]")
    return refine(a, b, whole, tolerance, 0)


def line_integral_2d(
    d: MultiplierData,
    base: Mapping[str, float],
    target: Mapping[str, float],
    first_axis: str,
    tolerance: float = QUADRATURE_TOLERANCE,
) -> float:
    """Integral of M(f-psi) dy - M(g-phi) dx along an axis-aligned two-leg path.

    The path first moves along ``first_axis`` and then along the other axis.
    Time and parameters are frozen at the values in ``base``.
    """
    x, y = d.chart.coords
    if first_axis not in (x, y):
        raise ValueError(f"Unknown axis '{first_axis}'")
    coeff_x, coeff_y = line_one_form(d)
    integrands = {x: compile_expr(coeff_x), y: compile_expr(coeff_y)}
    frozen = {k: v for k, v in base.items() if k not in (x, y)}

    def leg(axis: str, fixed_axis: str, fixed: float, start: float, stop: float) -> float:
        compiled = integrands[axis]

        def integrand(s: np.ndarray) -> np.ndarray:
            env = dict(frozen)
            env[axis] = s
            env[fixed_axis] = fixed
            try:
                values = compiled(env)
            except DomainError as e:
                raise SingularPathError(f"Path crosses a singularity: {e}") from e
            return np.broadcast_to(np.asarray(values, dtype=float), s.shape)

        # endpoints are never Gauss nodes, so check them for singularities separately
        integrand(np.array([start, stop]))
        return adaptive_gauss_legendre(integrand, start, stop, tolerance)

    second_axis = y if first_axis == x else x
    total = leg(first_axis, second_axis, base[second_axis], base[first_axis], target[first_axis])
    total += leg(
        second_axis, first_axis, target[first_axis], base[second_axis], target[second_axis]
    )
    return total


def reconstruct_hamiltonian_2d(
    d: MultiplierData,
    base: Mapping[str, float],
    target: Mapping[str, float],
    tolerance: float = QUADRATURE_TOLERANCE,
    path_tolerance: float = RECONSTRUCTION_TOLERANCE,
) -> float:
    """H(target) - H(base) by line integration; both two-leg paths must agree."""
    if d.chart.dimension != 2:
        raise FormError("Hamiltonian reconstruction is planar")
    x, y = d.chart.coords
    first = line_integral_2d(d, base, target, x, tolerance)
    second = line_integral_2d(d, base, target, y, tolerance)
    if abs(first - second) > path_tolerance:
        raise PathDependenceError(first, second, path_tolerance)
    logger.debug("hamiltonian_reconstructed", value=first, other_path=second)
    return first


def system_as_form(X: VectorField) -> DifferentialForm:
    """alpha^1 ^ ... ^ alpha^n with alpha^i = dx_i - f_i dt on extended space."""
    chart = X.chart
    if chart.time is None:
        raise FormError("System form needs a time symbol")
    dt = coordinate_differential(chart, chart.time, True)
    result = DifferentialForm.scalar(chart, 1.0, True)
    for name, f in zip(chart.coords, X.components):
        alpha = coordinate_differential(chart, name, True) - dt.scale(f)
        result = wedge(result, alpha)
    return result


def _shifted_form(d: MultiplierData) -> DifferentialForm:
    """M (dx_1 - aux_1 dt) ^ ... ^ (dx_n - aux_n dt)."""
    chart = d.chart
    shifted = VectorField(chart, d.aux)
    return system_as_form(shifted).scale(d.multiplier)


def _target_volume(T: CoordinateTransform) -> DifferentialForm:
    chart = T.source
    result = DifferentialForm.scalar(chart, 1.0, True)
    for m in T.maps:
        result = wedge(result, differential(chart, m, extended=True))
    return result


def transform_residual(
    d: MultiplierData,
    T: CoordinateTransform,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """Pullback dq^dp (du^dv^dw) against M (dx - psi dt) ^ (dy - phi dt) ^ ..."""
    T.check_nonsingular(pts)
    return residual_form(_target_volume(T), _shifted_form(d), pts, tolerance)


def matching_residual_3d(
    d: MultiplierData,
    H1: Expr,
    H2: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """M[(f-psi) dy^dz + (g-phi) dz^dx + (h-varphi) dx^dy] = spatial dH1^dH2."""
    chart = d.chart
    if chart.dimension != 3:
        raise FormError("Matching check is three-dimensional")
    x, y, z = chart.coords
    first, second, third = d.reduced
    lhs = (
        DifferentialForm.basis(chart, (y, z), False, first)
        + DifferentialForm.basis(chart, (z, x), False, second)
        + DifferentialForm.basis(chart, (x, y), False, third)
    )
    rhs = wedge(differential(chart, H1), differential(chart, H2))
    return residual_form(lhs, rhs, pts, tolerance)


def multiplier_identity_residual(
    d: MultiplierData,
    T: CoordinateTransform,
    hamiltonians: Sequence[Expr],
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """M alpha^1^alpha^2 = dq^dp + dH^dt (planar) or
    M alpha^1^alpha^2^alpha^3 = du^dv^dw - dH1^dH2^dt (three-dimensional)."""
    chart = d.chart
    if chart.time is None:
        raise FormError("Multiplier identity needs a time symbol")
    dt = coordinate_differential(chart, chart.time, True)
    lhs = system_as_form(d.field).scale(d.multiplier)
    volume = _target_volume(T)
    if chart.dimension == 2:
        (H,) = hamiltonians
        rhs = volume + wedge(differential(chart, H, True), dt)
    elif chart.dimension == 3:
        H1, H2 = hamiltonians
        rhs = volume - wedge(
            wedge(differential(chart, H1, True), differential(chart, H2, True)), dt
        )
    else:
        raise FormError("Multiplier identity is defined in two or three dimensions")
    return residual_form(lhs, rhs, pts, tolerance)


def spatial_matching_residual(
    d: MultiplierData,
    T: CoordinateTransform,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """M alpha-product equals the target volume up to terms containing dt.

    Only purely spatial slots are gated; dt slots are reported as components.
    """
    lhs = system_as_form(d.field).scale(d.multiplier)
    rhs = _target_volume(T)
    spatial = project_spatial(lhs)
    keys = set(spatial.coeffs) | set(project_spatial(rhs).coeffs)
    gated = [spatial.label(key) for key in sorted(keys)]
    return residual_form(lhs, rhs, pts, tolerance, gated=gated)


def standard_flow_residual(
    d: MultiplierData,
    T: CoordinateTransform,
    target_field: VectorField,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """Derivative of the transform along the dynamics equals the target field.

    ``target_field`` is expressed in target coordinates (and time); it is
    pulled back by substituting the transform.
    """
    chart = d.chart
    mapping = T.as_mapping()
    pairs = {}
    for name, m, component in zip(T.targets, T.maps, target_field.components):
        along = d.field.apply(m)
        if chart.time is not None:
            along = diff(m, chart.time) + along
        pulled = substitute(component, mapping)
        pairs[name] = (pts.evaluate(along), pts.evaluate(pulled))
    return residual_stats(pairs, pts, tolerance)


__all__ = [
    "CoordinateTransform",
    "MultiplierData",
    "adaptive_gauss_legendre",
    "exactness_residual_2d",
    "hamiltonian_gradient_residual",
    "jlm_residual",
    "line_integral_2d",
    "matching_residual_3d",
    "multiplier_identity_residual",
    "reconstruct_hamiltonian_2d",
    "spatial_matching_residual",
    "standard_flow_residual",
    "system_as_form",
    "transform_residual",
]
