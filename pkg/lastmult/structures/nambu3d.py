"""Nambu-Poisson machinery in three dimensions."""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from ..core.errors import FormError
from ..core.expr import ONE, ZERO, Chart, Expr, add, as_expr, diff, div, mul, neg, sub
from ..core.forms import (
    DifferentialForm,
    VectorField,
    coordinate_differential,
    differential,
    interior,
    lie_derivative,
    project_spatial,
    residual_form,
    wedge,
)
from ..core.stats import ResidualStats, SampleBatch, residual_stats, residual_values
from ..utils.validation import DEFAULT_TOLERANCE


Vector3 = Tuple[Expr, Expr, Expr]


def _require_3d(chart: Chart) -> None:
    if chart.dimension != 3:
        raise FormError(f"Nambu structure needs 3 coordinates, got {chart.dimension}")


def gradient3(F: Expr, chart: Chart) -> Vector3:
    u, v, w = chart.coords
    return diff(F, u), diff(F, v), diff(F, w)


def cross(a: Sequence[Expr], b: Sequence[Expr]) -> Vector3:
    return (
        sub(mul(a[1], b[2]), mul(a[2], b[1])),
        sub(mul(a[2], b[0]), mul(a[0], b[2])),
        sub(mul(a[0], b[1]), mul(a[1], b[0])),
    )


def dot(a: Sequence[Expr], b: Sequence[Expr]) -> Expr:
    result = ZERO
    for left, right in zip(a, b):
        result = add(result, mul(left, right))
    return result


def curl(J: VectorField) -> Vector3:
    u, v, w = J.chart.coords
    a, b, c = J.components[:3]
    return (
        sub(diff(c, v), diff(b, w)),
        sub(diff(a, w), diff(c, u)),
        sub(diff(b, u), diff(a, v)),
    )


@dataclass(frozen=True)
class NambuData:
    """Volume form mu = M du^dv^dw; bracket (1/M) grad F1 . (grad F2 x grad F3)."""

    chart: Chart
    multiplier: Expr = ONE

    def __post_init__(self) -> None:
        _require_3d(self.chart)
        object.__setattr__(self, "multiplier", as_expr(self.multiplier))

    def volume(self, extended: bool = False) -> DifferentialForm:
        return DifferentialForm.basis(
            self.chart, self.chart.coords, extended, self.multiplier
        )


@dataclass(frozen=True)
class HamiltonianPair:
    H1: Expr
    H2: Expr

    def swapped(self) -> "HamiltonianPair":
        return HamiltonianPair(self.H2, self.H1)


@dataclass(frozen=True)
class ConformalParams:
    """Linear scalings (a1, a2, a3); zeta = a1 u dv^dw + a2 v dw^du + a3 w du^dv."""

    chart: Chart
    a1: Expr
    a2: Expr
    a3: Expr

    def __post_init__(self) -> None:
        _require_3d(self.chart)
        for name in ("a1", "a2", "a3"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))

    @property
    def total(self) -> Expr:
        return add(add(self.a1, self.a2), self.a3)

    @property
    def zeta(self) -> DifferentialForm:
        u, v, w = self.chart.coords
        U, V, W = self.chart.coordinate_exprs()
        return (
            DifferentialForm.basis(self.chart, (v, w), False, mul(self.a1, U))
            + DifferentialForm.basis(self.chart, (w, u), False, mul(self.a2, V))
            + DifferentialForm.basis(self.chart, (u, v), False, mul(self.a3, W))
        )

    def liouville(self) -> VectorField:
        """Linear field (a1 u, a2 v, a3 w) with i_Z mu = zeta for M = 1."""
        U, V, W = self.chart.coordinate_exprs()
        return VectorField(
            self.chart, (mul(self.a1, U), mul(self.a2, V), mul(self.a3, W))
        )


def nambu_bracket(F1: Expr, F2: Expr, F3: Expr, d: NambuData) -> Expr:
    chart = d.chart
    triple = dot(gradient3(F1, chart), cross(gradient3(F2, chart), gradient3(F3, chart)))
    return div(triple, d.multiplier)


def nambu_field(pair: HamiltonianPair, d: NambuData) -> VectorField:
    """(1/M) grad H1 x grad H2; i_X mu = dH1 ^ dH2."""
    chart = d.chart
    product = cross(gradient3(pair.H1, chart), gradient3(pair.H2, chart))
    return VectorField(chart, tuple(div(c, d.multiplier) for c in product))


def poisson_field_3d(J: VectorField, H: Expr) -> VectorField:
    """J x grad H."""
    _require_3d(J.chart)
    return VectorField(J.chart, cross(J.components, gradient3(H, J.chart)))


def poisson_vectors(pair: HamiltonianPair, d: NambuData) -> Tuple[VectorField, VectorField]:
    """J1 = (1/M) grad H1 and J2 = -(1/M) grad H2, so X = J1 x grad H2 = J2 x grad H1."""
    chart = d.chart
    first = VectorField(chart, tuple(div(g, d.multiplier) for g in gradient3(pair.H1, chart)))
    second = VectorField(
        chart, tuple(neg(div(g, d.multiplier)) for g in gradient3(pair.H2, chart))
    )
    return first, second


def vector_bracket(F: Expr, G: Expr, J: VectorField) -> Expr:
    """{F, G}_J = J . (grad F x grad G)."""
    chart = J.chart
    return dot(J.components, cross(gradient3(F, chart), gradient3(G, chart)))


def induced_poisson_bracket(
    F: Expr, G: Expr, fixed: Expr, slot: int, d: NambuData
) -> Expr:
    """Binary bracket obtained by freezing one Nambu slot.

    slot 3 gives {F, G, fixed}; slot 2 gives {F, fixed, G}.
    """
    if slot == 3:
        return nambu_bracket(F, G, fixed, d)
    if slot == 2:
        return nambu_bracket(F, fixed, G, d)
    raise ValueError(f"slot must be 2 or 3, got {slot}")


def jacobi_residual(
    J: VectorField, pts: SampleBatch, tolerance: float = DEFAULT_TOLERANCE
) -> ResidualStats:
    """J . (curl J) = 0, compared as the two halves of the triple product."""
    _require_3d(J.chart)
    u, v, w = J.chart.coords
    a, b, c = J.components
    lhs = add(add(mul(a, diff(c, v)), mul(b, diff(a, w))), mul(c, diff(b, u)))
    rhs = add(add(mul(a, diff(b, w)), mul(b, diff(c, u))), mul(c, diff(a, v)))
    return residual_stats(
        {"jacobi": (pts.evaluate(lhs), pts.evaluate(rhs))}, pts, tolerance
    )


def pencil_jacobi_residual(
    J1: VectorField,
    J2: VectorField,
    pts: SampleBatch,
    weights: Sequence[Tuple[float, float]] = ((1.0, 1.0), (1.0, -1.0), (2.0, 0.5)),
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """Jacobi identity for several members c1 J1 + c2 J2 of the pencil."""
    result = None
    for c1, c2 in weights:
        member = J1.scale(c1) + J2.scale(c2)
        stats = jacobi_residual(member, pts, tolerance)
        result = stats if result is None else result.merge(stats)
    assert result is not None
    return result


def fundamental_identity_residual(
    d: NambuData,
    F1: Expr,
    F2: Expr,
    H1: Expr,
    H2: Expr,
    H3: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """{F1,F2,{H1,H2,H3}} against the three-term expansion."""

    def bracket(a: Expr, b: Expr, c: Expr) -> Expr:
        return nambu_bracket(a, b, c, d)

    lhs = bracket(F1, F2, bracket(H1, H2, H3))
    rhs = add(
        add(
            bracket(bracket(F1, F2, H1), H2, H3),
            bracket(H1, bracket(F1, F2, H2), H3),
        ),
        bracket(H1, H2, bracket(F1, F2, H3)),
    )
    return residual_stats(
        {"fundamental": (pts.evaluate(lhs), pts.evaluate(rhs))}, pts, tolerance
    )


def leibniz_residual(
    d: NambuData,
    F1: Expr,
    F2: Expr,
    F: Expr,
    H: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """{F1,F2,F H} = {F1,F2,F} H + F {F1,F2,H}."""
    lhs = nambu_bracket(F1, F2, mul(F, H), d)
    rhs = add(mul(nambu_bracket(F1, F2, F, d), H), mul(F, nambu_bracket(F1, F2, H, d)))
    return residual_values(lhs, rhs, pts, tolerance, "leibniz")


def antisymmetry_residual(
    d: NambuData,
    F1: Expr,
    F2: Expr,
    F3: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """Sign change under each transposition."""
    base = pts.evaluate(nambu_bracket(F1, F2, F3, d))
    pairs = {
        "12": (base, -pts.evaluate(nambu_bracket(F2, F1, F3, d))),
        "13": (base, -pts.evaluate(nambu_bracket(F3, F2, F1, d))),
        "23": (base, -pts.evaluate(nambu_bracket(F1, F3, F2, d))),
    }
    return residual_stats(pairs, pts, tolerance)


def derivation_residual(
    pair: HamiltonianPair,
    d: NambuData,
    F1: Expr,
    F2: Expr,
    F3: Expr,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """X{F1,F2,F3} = {X F1,F2,F3} + {F1,X F2,F3} + {F1,F2,X F3}."""
    X = nambu_field(pair, d)
    lhs = X.apply(nambu_bracket(F1, F2, F3, d))
    rhs = add(
        add(
            nambu_bracket(X.apply(F1), F2, F3, d),
            nambu_bracket(F1, X.apply(F2), F3, d),
        ),
        nambu_bracket(F1, F2, X.apply(F3), d),
    )
    return residual_values(lhs, rhs, pts, tolerance, "derivation")


def triple_product_halves(
    a: Sequence[Expr], b: Sequence[Expr], c: Sequence[Expr]
) -> Tuple[Expr, Expr]:
    """a . (b x c) split into its cyclic and anticyclic products."""
    cyclic = add(
        add(mul(mul(a[0], b[1]), c[2]), mul(mul(a[1], b[2]), c[0])),
        mul(mul(a[2], b[0]), c[1]),
    )
    anticyclic = add(
        add(mul(mul(a[0], b[2]), c[1]), mul(mul(a[1], b[0]), c[2])),
        mul(mul(a[2], b[1]), c[0]),
    )
    return cyclic, anticyclic


def conservation_residual(
    pair: HamiltonianPair,
    d: NambuData,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """X(H1) = X(H2) = 0 for the Nambu field of the pair.

    X(H) = (1/M) grad H . (grad H1 x grad H2) is compared as the two halves
    of the triple product, so the residual is scaled by the size of the
    products that cancel.
    """
    chart = d.chart
    g1, g2 = gradient3(pair.H1, chart), gradient3(pair.H2, chart)
    pairs: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
    for label, g in (("H1", g1), ("H2", g2)):
        cyclic, anticyclic = triple_product_halves(g, g1, g2)
        pairs[label] = (
            pts.evaluate(div(cyclic, d.multiplier)),
            pts.evaluate(div(anticyclic, d.multiplier)),
        )
    return residual_stats(pairs, pts, tolerance)


def volume_preservation_residual(
    pair: HamiltonianPair,
    d: NambuData,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """div(M X) = 0."""
    X = nambu_field(pair, d)
    return residual_values(
        X.scale(d.multiplier).divergence(), ZERO, pts, tolerance, "volume"
    )


def sharp_map(alpha: DifferentialForm, d: NambuData) -> VectorField:
    """alpha = A dv^dw + B dw^du + C du^dv  ->  (1/M)(A, B, C)."""
    if alpha.degree != 2 or alpha.extended:
        raise FormError("sharp map takes a spatial 2-form")
    u, v, w = d.chart.coords
    return VectorField(
        d.chart,
        tuple(
            div(alpha.coefficient(names), d.multiplier)
            for names in ((v, w), (w, u), (u, v))
        ),
    )


def nambu_form_residual(
    pair: HamiltonianPair,
    d: NambuData,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """i_X mu = dH1 ^ dH2 for X = nambu_field(pair)."""
    X = nambu_field(pair, d)
    dH = wedge(differential(d.chart, pair.H1), differential(d.chart, pair.H2))
    return residual_form(interior(X, d.volume()), dH, pts, tolerance)


def evolution_field_nambu(pair: HamiltonianPair, d: NambuData) -> VectorField:
    """E = d/dt + X_{H1,H2} on extended space."""
    chart = d.chart
    if chart.time is None:
        raise FormError("Evolution field needs a time symbol")
    X = nambu_field(pair, d)
    return VectorField.basis(chart, chart.time, True) + X.lift()


def mu_H(pair: HamiltonianPair, d: NambuData) -> DifferentialForm:
    """mu_H = mu - dH1 ^ dH2 ^ dt on extended space."""
    chart = d.chart
    if chart.time is None:
        raise FormError("mu_H needs a time symbol")
    dt = coordinate_differential(chart, chart.time, True)
    dH = wedge(differential(chart, pair.H1, True), differential(chart, pair.H2, True))
    return d.volume(True) - wedge(dH, dt)


def evolution_identity_residuals(
    pair: HamiltonianPair,
    d: NambuData,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, ResidualStats]:
    """i_E eta = 1, i_E mu_H = 0, i_X eta = 0, i_X mu = spatial dH1^dH2."""
    chart = d.chart
    E = evolution_field_nambu(pair, d)
    X = nambu_field(pair, d).lift()
    assert chart.time is not None
    eta = coordinate_differential(chart, chart.time, True)
    dH = wedge(differential(chart, pair.H1, True), differential(chart, pair.H2, True))
    return {
        "evolution_eta": residual_form(
            interior(E, eta), DifferentialForm.scalar(chart, ONE, True), pts, tolerance
        ),
        "evolution_kernel": residual_form(
            interior(E, mu_H(pair, d)), DifferentialForm.zero(chart, 2, True), pts, tolerance
        ),
        "field_eta": residual_form(
            interior(X, eta), DifferentialForm.zero(chart, 0, True), pts, tolerance
        ),
        "field_volume": residual_form(
            project_spatial(interior(X, d.volume(True))), project_spatial(dH), pts, tolerance
        ),
    }


def mu_H_residual(
    pair: HamiltonianPair,
    d: NambuData,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, ResidualStats]:
    """mu_H against beta1 ^ beta2 ^ beta3, beta_i = dx_i - X^i dt, plus kernel checks."""
    chart = d.chart
    if chart.time is None:
        raise FormError("mu_H needs a time symbol")
    X = nambu_field(pair, d)
    dt = coordinate_differential(chart, chart.time, True)
    product = DifferentialForm.scalar(chart, d.multiplier, True)
    for name, component in zip(chart.coords, X.components):
        beta = coordinate_differential(chart, name, True) - dt.scale(component)
        product = wedge(product, beta)
    identities = evolution_identity_residuals(pair, d, pts, tolerance)
    return {
        "decomposition": residual_form(mu_H(pair, d), product, pts, tolerance),
        "kernel": identities["evolution_kernel"],
        "eta": identities["field_eta"],
    }


def liouville_field_3d(cp: ConformalParams) -> VectorField:
    """Z with i_Z mu = zeta for the unit volume."""
    return cp.liouville()


def conformal_nambu_field(F1: Expr, F2: Expr, cp: ConformalParams) -> VectorField:
    """Nambu field of (F1, F2) for M = 1 plus (a1 u, a2 v, a3 w)."""
    chart = cp.chart
    return nambu_field(HamiltonianPair(F1, F2), NambuData(chart)) + liouville_field_3d(cp)


def conformal_nambu_residuals(
    F1: Expr,
    F2: Expr,
    cp: ConformalParams,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, ResidualStats]:
    """i_X mu = dF1^dF2 + zeta, L_X mu = a mu, div X = a."""
    chart = cp.chart
    X = conformal_nambu_field(F1, F2, cp)
    mu = NambuData(chart).volume()
    dF = wedge(differential(chart, F1), differential(chart, F2))
    return {
        "contraction": residual_form(interior(X, mu), dF + cp.zeta, pts, tolerance),
        "scaling": residual_form(lie_derivative(X, mu), mu.scale(cp.total), pts, tolerance),
        "divergence": residual_values(X.divergence(), cp.total, pts, tolerance, "divergence"),
    }


__all__ = [
    "ConformalParams",
    "HamiltonianPair",
    "NambuData",
    "antisymmetry_residual",
    "conformal_nambu_field",
    "conformal_nambu_residuals",
    "conservation_residual",
    "cross",
    "curl",
    "derivation_residual",
    "dot",
    "evolution_field_nambu",
    "evolution_identity_residuals",
    "fundamental_identity_residual",
    "induced_poisson_bracket",
    "jacobi_residual",
    "leibniz_residual",
    "liouville_field_3d",
    "mu_H",
    "mu_H_residual",
    "nambu_bracket",
    "nambu_field",
    "nambu_form_residual",
    "pencil_jacobi_residual",
    "poisson_field_3d",
    "poisson_vectors",
    "sharp_map",
    "triple_product_halves",
    "vector_bracket",
    "volume_preservation_residual",
]
