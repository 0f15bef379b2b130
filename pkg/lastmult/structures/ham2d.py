"""Planar structures: multiplier symplectic, conformal and cosymplectic."""

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from ..core.errors import DegenerateStructureError, FormError
from ..core.expr import ONE, Chart, Expr, as_expr, diff, div, evaluate, mul, neg, sub
from ..core.forms import (
    DifferentialForm,
    VectorField,
    differential,
    ext_d,
    interior,
    lie_derivative,
    residual_field,
    residual_form,
    wedge,
)
from ..core.logger import get_logger
from ..core.stats import ResidualStats, SampleBatch, residual_values
from ..utils.validation import DEFAULT_TOLERANCE


logger = get_logger(__name__)


def _require_planar(chart: Chart) -> None:
    if chart.dimension != 2:
        raise FormError(f"Planar structure needs 2 coordinates, got {chart.dimension}")


def _require_time(chart: Chart) -> str:
    if chart.time is None:
        raise FormError("Cosymplectic structure needs a time symbol")
    return chart.time


def check_nonvanishing(e: Expr, pts: SampleBatch, what: str) -> None:
    values = pts.evaluate(e)
    zero = np.flatnonzero(values == 0)
    if zero.size:
        raise DegenerateStructureError(
            f"{what} vanishes at a sample point", pts.point(int(zero[0]))
        )


def area_form(chart: Chart, density: Expr, extended: bool = False) -> DifferentialForm:
    x, y = chart.coords
    return DifferentialForm.basis(chart, (x, y), extended, density)


@dataclass(frozen=True)
class SymplecticData2D:
    """Multiplier structure: bracket {x, y} = 1/M, form Omega = M dx^dy."""

    chart: Chart
    multiplier: Expr

    def __post_init__(self) -> None:
        _require_planar(self.chart)

    @property
    def omega(self) -> DifferentialForm:
        return area_form(self.chart, self.multiplier)

    def check(self, pts: SampleBatch) -> None:
        check_nonvanishing(self.multiplier, pts, "Multiplier")


def hamiltonian_field_2d(H: Expr, M: Expr, chart: Chart) -> VectorField:
    """((1/M) H_y, -(1/M) H_x); satisfies i_X (M dx^dy) = dH."""
    _require_planar(chart)
    x, y = chart.coords
    return VectorField(chart, (div(diff(H, y), M), neg(div(diff(H, x), M))))


def poisson_bracket_2d(F: Expr, G: Expr, M: Expr, chart: Chart) -> Expr:
    """{F, G} = (1/M)(F_x G_y - F_y G_x)."""
    _require_planar(chart)
    x, y = chart.coords
    return div(
        sub(mul(diff(F, x), diff(G, y)), mul(diff(F, y), diff(G, x))), M
    )


def symplectic_residuals(
    H: Expr,
    data: SymplecticData2D,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, ResidualStats]:
    """i_X Omega = dH and L_X Omega = 0 for X = hamiltonian_field_2d(H, M)."""
    data.check(pts)
    X = hamiltonian_field_2d(H, data.multiplier, data.chart)
    omega = data.omega
    return {
        "hamilton": residual_form(
            interior(X, omega), differential(data.chart, H), pts, tolerance
        ),
        "preservation": residual_form(
            lie_derivative(X, omega),
            DifferentialForm.zero(data.chart, 2),
            pts,
            tolerance,
        ),
    }


@dataclass(frozen=True)
class ConformalData2D:
    """Omega = rho dx^dy, Liouville form theta, Liouville field Z, scaling a."""

    chart: Chart
    omega: DifferentialForm
    theta: DifferentialForm
    liouville: VectorField
    scale: Expr

    def __post_init__(self) -> None:
        _require_planar(self.chart)
        if self.omega.degree != 2 or self.theta.degree != 1:
            raise FormError("Conformal data needs a 2-form Omega and a 1-form theta")
        object.__setattr__(self, "scale", as_expr(self.scale))

    @property
    def density(self) -> Expr:
        x, y = self.chart.coords
        return self.omega.coefficient((x, y))

    def residuals(
        self, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
    ) -> Dict[str, ResidualStats]:
        """Omega = -d theta and i_Z Omega = -theta."""
        return {
            "exact": residual_form(self.omega, -ext_d(self.theta), pts, tolerance),
            "liouville": residual_form(
                interior(self.liouville, self.omega), -self.theta, pts, tolerance
            ),
        }


def conformal_field_2d(H: Expr, a: Expr, data: ConformalData2D) -> VectorField:
    """Solve i_X Omega = dH - a theta for X."""
    chart = data.chart
    x, y = chart.coords
    beta = differential(chart, H) - data.theta.scale(a)
    rho = data.density
    return VectorField(
        chart,
        (div(beta.coefficient((y,)), rho), neg(div(beta.coefficient((x,)), rho))),
    )


def conformal_residuals(
    H: Expr,
    data: ConformalData2D,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, ResidualStats]:
    """i_G Omega = dH - a theta, L_G Omega = a Omega, G = X_H + aZ."""
    check_nonvanishing(data.density, pts, "Symplectic density")
    gamma = conformal_field_2d(H, data.scale, data)
    decomposed = hamiltonian_field_2d(H, data.density, data.chart) + data.liouville.scale(
        data.scale
    )
    return {
        "contraction": residual_form(
            interior(gamma, data.omega),
            differential(data.chart, H) - data.theta.scale(data.scale),
            pts,
            tolerance,
        ),
        "scaling": residual_form(
            lie_derivative(gamma, data.omega),
            data.omega.scale(data.scale),
            pts,
            tolerance,
        ),
        "decomposition": residual_field(gamma, decomposed, pts, tolerance),
        "divergence": conformal_divergence_2d(gamma, data, pts, tolerance),
    }


def conformal_divergence_2d(
    X: VectorField,
    data: ConformalData2D,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """div_Omega X = a, the infinitesimal form of phi_t* Omega = e^{at} Omega."""
    return residual_values(
        X.divergence(data.density), data.scale, pts, tolerance, "divergence"
    )


@dataclass(frozen=True)
class CosymplecticData:
    """(eta, Omega) on extended space; Darboux presentation by default."""

    chart: Chart
    eta: DifferentialForm = None  # type: ignore[assignment]
    omega: DifferentialForm = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        _require_planar(self.chart)
        time = _require_time(self.chart)
        if self.eta is None:
            object.__setattr__(
                self, "eta", DifferentialForm.basis(self.chart, (time,), True)
            )
        if self.omega is None:
            x, y = self.chart.coords
            object.__setattr__(
                self, "omega", DifferentialForm.basis(self.chart, (x, y), True)
            )
        if not (self.eta.extended and self.omega.extended):
            raise FormError("Cosymplectic forms live on extended space")

    @property
    def is_darboux(self) -> bool:
        x, y = self.chart.coords
        time = _require_time(self.chart)
        darboux_eta = DifferentialForm.basis(self.chart, (time,), True)
        darboux_omega = DifferentialForm.basis(self.chart, (x, y), True)
        return self.eta == darboux_eta and self.omega == darboux_omega

    def reeb(self) -> VectorField:
        """Symbolic Reeb field; only available in the Darboux presentation."""
        if not self.is_darboux:
            raise FormError("Use reeb_field_at for a general (eta, Omega) pair")
        return VectorField.basis(self.chart, _require_time(self.chart), True)

    def volume(self) -> Expr:
        x, y = self.chart.coords
        return wedge(self.eta, self.omega).coefficient((x, y, _require_time(self.chart)))

    def check(self, pts: SampleBatch) -> None:
        check_nonvanishing(self.volume(), pts, "eta ^ Omega")


def _chi_matrix(data: CosymplecticData, pt: Mapping[str, float]) -> np.ndarray:
    axes = data.chart.axes
    n = len(axes)
    eta = np.array([evaluate(data.eta.coefficient((name,)), pt) for name in axes])
    omega = np.zeros((n, n))
    for j, a in enumerate(axes):
        for k, b in enumerate(axes):
            if j != k:
                omega[j, k] = evaluate(data.omega.coefficient((a, b)), pt)
    # chi(X)_j = sum_k X^k Omega_kj + eta(X) eta_j
    return omega.T + np.outer(eta, eta)


def reeb_field_at(data: CosymplecticData, pt: Mapping[str, float]) -> Dict[str, float]:
    """Pointwise Reeb vector: solve chi(xi) = eta."""
    matrix = _chi_matrix(data, pt)
    rhs = np.array(
        [evaluate(data.eta.coefficient((name,)), pt) for name in data.chart.axes]
    )
    try:
        solution = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError:
        raise DegenerateStructureError(
            "eta ^ Omega is degenerate; Reeb field undefined", dict(pt)
        ) from None
    return dict(zip(data.chart.axes, (float(v) for v in solution)))


def chi_map(X: VectorField, data: CosymplecticData) -> DifferentialForm:
    """chi(X) = i_X Omega + eta(X) eta."""
    eta_of_x = interior(X, data.eta).coeffs.get((), None)
    contraction = interior(X, data.omega)
    if eta_of_x is None:
        return contraction
    return contraction + data.eta.scale(eta_of_x)


def evolution_field_cosym(H: Expr, chart: Chart) -> VectorField:
    """E_H = d/dt + H_y d/dx - H_x d/dy on extended space."""
    _require_planar(chart)
    time = _require_time(chart)
    x, y = chart.coords
    return VectorField.from_mapping(
        chart, {x: diff(H, y), y: neg(diff(H, x)), time: ONE}, extended=True
    )


def cosym_hamiltonian_field(H: Expr, chart: Chart) -> VectorField:
    """X_H with i_X eta = 0 and i_X Omega = dH - xi(H) eta."""
    _require_planar(chart)
    _require_time(chart)
    x, y = chart.coords
    return VectorField.from_mapping(
        chart, {x: diff(H, y), y: neg(diff(H, x))}, extended=True
    )


def gradient_field_cosym(H: Expr, data: CosymplecticData) -> VectorField:
    """grad H = xi(H) d/dt + H_y d/dx - H_x d/dy (Darboux presentation)."""
    chart = data.chart
    xi = data.reeb()
    x, y = chart.coords
    return VectorField.from_mapping(
        chart,
        {x: diff(H, y), y: neg(diff(H, x)), _require_time(chart): xi.apply(H)},
        extended=True,
    )


def cosymplectic_residuals(
    H: Expr,
    data: CosymplecticData,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, ResidualStats]:
    """Evolution and gradient identities of a time-dependent Hamiltonian."""
    data.check(pts)
    chart = data.chart
    xi = data.reeb()
    xi_h = xi.apply(H)
    dH = differential(chart, H, extended=True)
    one = DifferentialForm.scalar(chart, ONE, True)
    evolution = evolution_field_cosym(H, chart)
    gradient = gradient_field_cosym(H, data)
    target = dH - data.eta.scale(xi_h)

    results = {
        "reeb_eta": residual_form(interior(xi, data.eta), one, pts, tolerance),
        "reeb_omega": residual_form(
            interior(xi, data.omega), DifferentialForm.zero(chart, 1, True), pts, tolerance
        ),
        "evolution_eta": residual_form(interior(evolution, data.eta), one, pts, tolerance),
        "evolution_omega": residual_form(
            interior(evolution, data.omega), target, pts, tolerance
        ),
        "gradient_eta": residual_form(
            interior(gradient, data.eta),
            DifferentialForm.scalar(chart, xi_h, True),
            pts,
            tolerance,
        ),
        "gradient_omega": residual_form(
            interior(gradient, data.omega), target, pts, tolerance
        ),
    }
    for name, stats in results.items():
        logger.debug("cosymplectic_check", check=name, max=stats.max)
    return results


__all__ = [
    "ConformalData2D",
    "CosymplecticData",
    "SymplecticData2D",
    "area_form",
    "chi_map",
    "conformal_divergence_2d",
    "conformal_field_2d",
    "conformal_residuals",
    "cosym_hamiltonian_field",
    "cosymplectic_residuals",
    "evolution_field_cosym",
    "gradient_field_cosym",
    "hamiltonian_field_2d",
    "poisson_bracket_2d",
    "reeb_field_at",
    "symplectic_residuals",
]
