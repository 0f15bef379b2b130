"""Exterior calculus in coordinates: forms, vector fields, d, wedge, i_X, L_X.

A form lives either on the spatial chart or on the extended chart, where the
time symbol is the last axis. Coefficients are stored sparsely under strictly
increasing index tuples into the axes.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from ..utils.validation import DEFAULT_TOLERANCE
from .errors import ChartMismatchError, FormError
from .expr import ONE, ZERO, Chart, Expr, add, as_expr, diff, div, mul, neg, sub
from .stats import ResidualStats, SampleBatch, residual_stats


Index = Tuple[int, ...]
Scalar = Union[Expr, float, int]


def chart_axes(chart: Chart, extended: bool) -> Tuple[str, ...]:
    if not extended:
        return chart.coords
    if chart.time is None:
        raise FormError("Extended space needs a chart with a time symbol")
    return chart.axes


def _sort_with_sign(indices: Sequence[int]) -> Tuple[int, Index]:
    """Bubble-sort ``indices``; returns (sign, sorted) or (0, ()) on repeats."""
    items = list(indices)
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


def _signed(sign: int, coefficient: Expr) -> Expr:
    return coefficient if sign > 0 else neg(coefficient)


def _accumulate(target: Dict[Index, Expr], key: Index, value: Expr) -> None:
    target[key] = add(target[key], value) if key in target else value


@dataclass(frozen=True)
class DifferentialForm:
    chart: Chart
    degree: int
    coeffs: Mapping[Index, Expr] = field(default_factory=dict)
    extended: bool = False

    def __post_init__(self) -> None:
        axes = chart_axes(self.chart, self.extended)
        cleaned: Dict[Index, Expr] = {}
        for raw_key, coefficient in self.coeffs.items():
            key = tuple(raw_key)
            if len(key) != self.degree:
                raise FormError(
                    f"Index {key} does not match degree {self.degree}"
                )
            if any(b <= a for a, b in zip(key, key[1:])):
                raise FormError(f"Index {key} is not strictly increasing")
            if any(i < 0 or i >= len(axes) for i in key):
                raise FormError(f"Index {key} out of range for axes {axes}")
            if not coefficient.is_zero():
                cleaned[key] = coefficient
        if self.degree < 0 or (self.degree > len(axes) and cleaned):
            raise FormError(
                f"Degree {self.degree} impossible on {len(axes)} axes"
            )
        object.__setattr__(self, "coeffs", dict(sorted(cleaned.items())))

    @property
    def axes(self) -> Tuple[str, ...]:
        return chart_axes(self.chart, self.extended)

    @classmethod
    def zero(cls, chart: Chart, degree: int, extended: bool = False) -> "DifferentialForm":
        return cls(chart, degree, {}, extended)

    @classmethod
    def scalar(cls, chart: Chart, f: Scalar, extended: bool = False) -> "DifferentialForm":
        return cls(chart, 0, {(): as_expr(f)}, extended)

    @classmethod
    def basis(
        cls,
        chart: Chart,
        names: Sequence[str],
        extended: bool = False,
        coefficient: Scalar = 1.0,
    ) -> "DifferentialForm":
        """``coefficient * d(names[0]) ^ d(names[1]) ^ ...``"""
        axes = chart_axes(chart, extended)
        try:
            indices = [axes.index(name) for name in names]
        except ValueError:
            raise FormError(f"Unknown axis in {tuple(names)}; axes are {axes}") from None
        sign, key = _sort_with_sign(indices)
        if sign == 0:
            return cls.zero(chart, len(names), extended)
        return cls(chart, len(names), {key: _signed(sign, as_expr(coefficient))}, extended)

    def coefficient(self, names: Sequence[str]) -> Expr:
        """Coefficient of d(names[0]) ^ ..., with the sign of that ordering."""
        indices = [self.axes.index(name) for name in names]
        sign, key = _sort_with_sign(indices)
        if sign == 0:
            return ZERO
        return _signed(sign, self.coeffs.get(key, ZERO))

    def label(self, key: Index) -> str:
        if not key:
            return "1"
        return "^".join(f"d{self.axes[i]}" for i in key)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check_compatible(self, other: "DifferentialForm") -> None:
        if self.axes != other.axes:
            raise ChartMismatchError(self.axes, other.axes)
        if self.degree != other.degree:
            raise FormError(f"Degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check_compatible(other)
        result = dict(self.coeffs)
        for key, value in other.coeffs.items():
            _accumulate(result, key, value)
        return DifferentialForm(self.chart, self.degree, result, self.extended)

    def __neg__(self) -> "DifferentialForm":
        return self.scale(-1.0)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def scale(self, factor: Scalar) -> "DifferentialForm":
        factor = as_expr(factor)
        return DifferentialForm(
            self.chart,
            self.degree,
            {key: mul(factor, value) for key, value in self.coeffs.items()},
            self.extended,
        )

    def __mul__(self, factor: Scalar) -> "DifferentialForm":
        return self.scale(factor)

    def __rmul__(self, factor: Scalar) -> "DifferentialForm":
        return self.scale(factor)

    def lift(self) -> "DifferentialForm":
        """View a spatial form on extended space (indices are unchanged)."""
        if self.extended:
            return self
        return DifferentialForm(self.chart, self.degree, dict(self.coeffs), True)


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: Tuple[Expr, ...]
    extended: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != len(self.axes):
            raise FormError(
                f"Vector field needs {len(self.axes)} components, got {len(self.components)}"
            )

    @property
    def axes(self) -> Tuple[str, ...]:
        return chart_axes(self.chart, self.extended)

    @classmethod
    def from_mapping(
        cls, chart: Chart, mapping: Mapping[str, Scalar], extended: bool = False
    ) -> "VectorField":
        axes = chart_axes(chart, extended)
        unknown = set(mapping) - set(axes)
        if unknown:
            raise FormError(f"Unknown axes {sorted(unknown)}; axes are {axes}")
        return cls(
            chart,
            tuple(as_expr(mapping.get(name, ZERO)) for name in axes),
            extended,
        )

    @classmethod
    def basis(cls, chart: Chart, name: str, extended: bool = False) -> "VectorField":
        return cls.from_mapping(chart, {name: ONE}, extended)

    @classmethod
    def zero(cls, chart: Chart, extended: bool = False) -> "VectorField":
        return cls.from_mapping(chart, {}, extended)

    def component(self, name: str) -> Expr:
        return self.components[self.axes.index(name)]

    def as_dict(self) -> Dict[str, Expr]:
        return dict(zip(self.axes, self.components))

    def apply(self, f: Expr) -> Expr:
        """Directional derivative X(f)."""
        result = ZERO
        for name, component in zip(self.axes, self.components):
            result = add(result, mul(component, diff(f, name)))
        return result

    def divergence(self, density: Optional[Expr] = None) -> Expr:
        """(1/rho) sum_i d_i(rho X^i); plain divergence when no density is given."""
        if density is None:
            result = ZERO
            for name, component in zip(self.axes, self.components):
                result = add(result, diff(component, name))
            return result
        total = ZERO
        for name, component in zip(self.axes, self.components):
            total = add(total, diff(mul(density, component), name))
        return div(total, density)

    def _check_compatible(self, other: "VectorField") -> None:
        if self.axes != other.axes:
            raise ChartMismatchError(self.axes, other.axes)

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check_compatible(other)
        return VectorField(
            self.chart,
            tuple(add(a, b) for a, b in zip(self.components, other.components)),
            self.extended,
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check_compatible(other)
        return VectorField(
            self.chart,
            tuple(sub(a, b) for a, b in zip(self.components, other.components)),
            self.extended,
        )

    def __neg__(self) -> "VectorField":
        return self.scale(-1.0)

    def scale(self, factor: Scalar) -> "VectorField":
        factor = as_expr(factor)
        return VectorField(
            self.chart, tuple(mul(factor, c) for c in self.components), self.extended
        )

    def spatial(self) -> "VectorField":
        """Drop the time component."""
        if not self.extended:
            return self
        return VectorField(self.chart, self.components[:-1], False)

    def lift(self) -> "VectorField":
        """Extended-space field with zero time component."""
        if self.extended:
            return self
        return VectorField(self.chart, self.components + (ZERO,), True)


def coordinate_differential(
    chart: Chart, name: str, extended: bool = False
) -> DifferentialForm:
    return DifferentialForm.basis(chart, (name,), extended)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if a.axes != b.axes:
        raise ChartMismatchError(a.axes, b.axes)
    degree = a.degree + b.degree
    result: Dict[Index, Expr] = {}
    if degree <= len(a.axes):
        for key_a, coeff_a in a.coeffs.items():
            for key_b, coeff_b in b.coeffs.items():
                sign, key = _sort_with_sign(key_a + key_b)
                if sign == 0:
                    continue
                _accumulate(result, key, _signed(sign, mul(coeff_a, coeff_b)))
    return DifferentialForm(a.chart, degree, result, a.extended)


def ext_d(a: DifferentialForm) -> DifferentialForm:
    """Exterior derivative: d(f dx_I) = sum_k d_k f dx_k ^ dx_I."""
    result: Dict[Index, Expr] = {}
    for key, coefficient in a.coeffs.items():
        for k, name in enumerate(a.axes):
            if k in key:
                continue
            partial = diff(coefficient, name)
            if partial.is_zero():
                continue
            sign, sorted_key = _sort_with_sign((k,) + key)
            _accumulate(result, sorted_key, _signed(sign, partial))
    return DifferentialForm(a.chart, a.degree + 1, result, a.extended)


def differential(chart: Chart, f: Scalar, extended: bool = False) -> DifferentialForm:
    return ext_d(DifferentialForm.scalar(chart, f, extended))


def interior(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """i_X a; raises FormError on 0-forms."""
    if X.axes != a.axes:
        raise ChartMismatchError(X.axes, a.axes)
    if a.degree == 0:
        raise FormError("Interior product of a 0-form is undefined")
    result: Dict[Index, Expr] = {}
    for key, coefficient in a.coeffs.items():
        for position, axis in enumerate(key):
            component = X.components[axis]
            if component.is_zero():
                continue
            term = mul(component, coefficient)
            if position % 2:
                term = neg(term)
            _accumulate(result, key[:position] + key[position + 1 :], term)
    return DifferentialForm(a.chart, a.degree - 1, result, a.extended)


def lie_derivative(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan: L_X a = d(i_X a) + i_X(d a); on functions L_X f = X(f)."""
    if X.axes != a.axes:
        raise ChartMismatchError(X.axes, a.axes)
    if a.degree == 0:
        f = a.coeffs.get((), ZERO)
        return DifferentialForm.scalar(a.chart, X.apply(f), a.extended)
    return ext_d(interior(X, a)) + interior(X, ext_d(a))


def project_spatial(a: DifferentialForm) -> DifferentialForm:
    """Drop every slot containing dt and return the form on the spatial chart."""
    if not a.extended:
        return a
    time_index = len(a.axes) - 1
    kept = {key: value for key, value in a.coeffs.items() if time_index not in key}
    return DifferentialForm(a.chart, a.degree, kept, False)


def residual_form(
    a: DifferentialForm,
    b: DifferentialForm,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
    gated: Optional[Iterable[str]] = None,
) -> ResidualStats:
    """Coefficientwise residual of a - b over the sample batch."""
    a._check_compatible(b)
    keys = sorted(set(a.coeffs) | set(b.coeffs))
    pairs = {
        a.label(key): (
            pts.evaluate(a.coeffs.get(key, ZERO)),
            pts.evaluate(b.coeffs.get(key, ZERO)),
        )
        for key in keys
    }
    if not pairs:
        pairs = {"0": (pts.evaluate(ZERO), pts.evaluate(ZERO))}
    return residual_stats(pairs, pts, tolerance, gated)


def residual_field(
    X: VectorField,
    Y: VectorField,
    pts: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ResidualStats:
    """Componentwise residual of two vector fields."""
    X._check_compatible(Y)
    pairs = {
        name: (pts.evaluate(x), pts.evaluate(y))
        for name, x, y in zip(X.axes, X.components, Y.components)
    }
    return residual_stats(pairs, pts, tolerance)


def time_slots(a: DifferentialForm) -> Tuple[str, ...]:
    """Labels of slots containing dt, for reporting them ungated."""
    if not a.extended:
        return ()
    time_index = len(a.axes) - 1
    return tuple(a.label(key) for key in a.coeffs if time_index in key)
