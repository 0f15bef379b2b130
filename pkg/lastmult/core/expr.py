"""Symbolic expression kernel: immutable trees, exact derivatives, evaluation."""

import math
from dataclasses import dataclass, field
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .errors import DomainError, MissingSymbolError, UndeclaredSymbolError


Number = Union[int, float]
Value = Union[float, np.ndarray]
Point = Mapping[str, float]
Env = Mapping[str, Any]

UNARY_FUNCTIONS: Tuple[str, ...] = ("exp", "ln", "sin", "cos", "sqrt")
BINARY_OPERATORS: Tuple[str, ...] = ("add", "sub", "mul", "div", "pow")
SYMBOL_KINDS: Tuple[str, ...] = ("var", "param")


@dataclass(frozen=True)
class Expr:
    """Immutable expression node.

    ``op`` is one of ``const``, ``var``, ``param``, ``neg``, a unary function
    name or a binary operator. Arithmetic operators build simplified trees;
    the parser builds raw ones.
    """

    op: str
    args: Tuple["Expr", ...] = ()
    value: float = 0.0
    name: str = ""

    def __add__(self, other: Any) -> "Expr":
        return add(self, as_expr(other))

    def __radd__(self, other: Any) -> "Expr":
        return add(as_expr(other), self)

    def __sub__(self, other: Any) -> "Expr":
        return sub(self, as_expr(other))

    def __rsub__(self, other: Any) -> "Expr":
        return sub(as_expr(other), self)

    def __mul__(self, other: Any) -> "Expr":
        return mul(self, as_expr(other))

    def __rmul__(self, other: Any) -> "Expr":
        return mul(as_expr(other), self)

    def __truediv__(self, other: Any) -> "Expr":
        return div(self, as_expr(other))

    def __rtruediv__(self, other: Any) -> "Expr":
        return div(as_expr(other), self)

    def __pow__(self, other: Any) -> "Expr":
        return power(self, as_expr(other))

    def __rpow__(self, other: Any) -> "Expr":
        return power(as_expr(other), self)

    def __neg__(self) -> "Expr":
        return neg(self)

    @property
    def is_constant(self) -> bool:
        return self.op == "const"

    @property
    def is_symbol(self) -> bool:
        return self.op in SYMBOL_KINDS

    def is_zero(self) -> bool:
        return self.op == "const" and self.value == 0.0

    def __str__(self) -> str:
        return to_source(self)

    def __repr__(self) -> str:
        return f"Expr({to_source(self)!r})"


def const(value: Number) -> Expr:
    return Expr("const", value=float(value))


def var(name: str) -> Expr:
    return Expr("var", name=name)


def param(name: str) -> Expr:
    return Expr("param", name=name)


ZERO = const(0.0)
ONE = const(1.0)
TWO = const(2.0)


def as_expr(value: Any) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
        value, bool
    ):
        return const(float(value))
    raise TypeError(f"Cannot convert {type(value).__name__} to Expr")


@dataclass(frozen=True)
class Chart:
    """Coordinate system: ordered coordinates, optional time, parameters.

    ``defaults`` holds optional bound parameter values.
    """

    coords: Tuple[str, ...]
    time: Optional[str] = None
    params: Tuple[str, ...] = ()
    defaults: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "defaults", dict(self.defaults))

        names = list(self.coords) + list(self.params)
        if self.time is not None:
            names.append(self.time)
        if not self.coords:
            raise ValueError("Chart needs at least one coordinate")
        seen = set()
        for name in names:
            if not name.isidentifier():
                raise ValueError(f"Invalid symbol name '{name}'")
            if name in UNARY_FUNCTIONS:
                raise ValueError(f"Symbol name '{name}' shadows a function")
            if name in seen:
                raise ValueError(f"Symbol '{name}' declared more than once")
            seen.add(name)
        unknown = set(self.defaults) - set(self.params)
        if unknown:
            raise ValueError(
                f"Defaults given for undeclared parameters: {', '.join(sorted(unknown))}"
            )

    @property
    def dimension(self) -> int:
        return len(self.coords)

    @property
    def axes(self) -> Tuple[str, ...]:
        """Coordinates followed by time, when the chart has one."""
        if self.time is None:
            return self.coords
        return self.coords + (self.time,)

    def symbols(self) -> Tuple[str, ...]:
        return self.axes + self.params

    def declares(self, name: str) -> bool:
        return name in self.coords or name == self.time or name in self.params

    def is_parameter(self, name: str) -> bool:
        return name in self.params

    def symbol(self, name: str) -> Expr:
        if name in self.params:
            return param(name)
        if name in self.coords or name == self.time:
            return var(name)
        raise UndeclaredSymbolError(name)

    def coordinate_exprs(self) -> Tuple[Expr, ...]:
        return tuple(var(name) for name in self.coords)

    def with_coords(self, coords: Sequence[str]) -> "Chart":
        return Chart(tuple(coords), self.time, self.params, self.defaults)

    def with_params(
        self, params: Sequence[str], defaults: Optional[Mapping[str, float]] = None
    ) -> "Chart":
        merged = dict(self.defaults)
        merged.update(defaults or {})
        extra = tuple(p for p in params if p not in self.params)
        return Chart(self.coords, self.time, self.params + extra, merged)

    def without_time(self) -> "Chart":
        return Chart(self.coords, None, self.params, self.defaults)


# Domain-checked primitive operations. They accept floats or numpy arrays.


def _finite(operation: str, value: Value) -> Value:
    if not np.all(np.isfinite(value)):
        raise DomainError(operation, "non-finite result")
    return value


def _exp(v: Value) -> Value:
    return _finite("exp", np.exp(v))


def _ln(v: Value) -> Value:
    if np.any(np.asarray(v) <= 0):
        raise DomainError("ln", "argument must be positive")
    return np.log(v)


def _sin(v: Value) -> Value:
    return np.sin(v)


def _cos(v: Value) -> Value:
    return np.cos(v)


def _sqrt(v: Value) -> Value:
    if np.any(np.asarray(v) < 0):
        raise DomainError("sqrt", "argument must be non-negative")
    return np.sqrt(v)


def _add(a: Value, b: Value) -> Value:
    return _finite("add", np.add(a, b))


def _sub(a: Value, b: Value) -> Value:
    return _finite("sub", np.subtract(a, b))


def _mul(a: Value, b: Value) -> Value:
    return _finite("mul", np.multiply(a, b))


def _div(a: Value, b: Value) -> Value:
    if np.any(np.asarray(b) == 0):
        raise DomainError("div", "division by zero")
    return _finite("div", np.divide(a, b))


def _pow(a: Value, b: Value) -> Value:
    base = np.asarray(a)
    exponent = np.asarray(b)
    fractional = np.mod(exponent, 1.0) != 0
    if np.any((base < 0) & fractional):
        raise DomainError("pow", "fractional power of a negative base")
    if np.any((base == 0) & (exponent < 0)):
        raise DomainError("pow", "zero raised to a negative power")
    return _finite("pow", np.power(a, b))


_UNARY: Dict[str, Callable[[Value], Value]] = {
    "exp": _exp,
    "ln": _ln,
    "sin": _sin,
    "cos": _cos,
    "sqrt": _sqrt,
}

_BINARY: Dict[str, Callable[[Value, Value], Value]] = {
    "add": _add,
    "sub": _sub,
    "mul": _mul,
    "div": _div,
    "pow": _pow,
}


# Smart constructors: local folding only, no canonicalization.


def _is_const(e: Expr, value: Optional[float] = None) -> bool:
    return e.op == "const" and (value is None or e.value == value)


def _fold(operation: Callable[..., Value], *values: float) -> Optional[Expr]:
    try:
        with np.errstate(all="ignore"):
            return const(float(operation(*values)))
    except DomainError:
        return None


def neg(a: Expr) -> Expr:
    if a.op == "const":
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    if a.op == "sub":
        return Expr("sub", (a.args[1], a.args[0]))
    return Expr("neg", (a,))


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if a.op == "const" and b.op == "const":
        return const(a.value + b.value)
    if b.op == "neg":
        return sub(a, b.args[0])
    if a.op == "neg":
        return sub(b, a.args[0])
    return Expr("add", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if a == b:
        return ZERO
    if a.op == "const" and b.op == "const":
        return const(a.value - b.value)
    if b.op == "neg":
        return add(a, b.args[0])
    return Expr("sub", (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if a.op == "const" and b.op == "const":
        return const(a.value * b.value)
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(b, -1.0):
        return neg(a)
    if a.op == "neg" and b.op == "neg":
        return mul(a.args[0], b.args[0])
    if a.op == "neg":
        return neg(mul(a.args[0], b))
    if b.op == "neg":
        return neg(mul(a, b.args[0]))
    return Expr("mul", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Expr("div", (a, b))
    if _is_const(a, 0.0):
        return ZERO
    if a == b:
        return ONE
    if a.op == "const" and b.op == "const":
        return const(a.value / b.value)
    if a.op == "neg":
        return neg(div(a.args[0], b))
    if b.op == "neg":
        return neg(div(a, b.args[0]))
    return Expr("div", (a, b))


def power(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return ONE
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 1.0):
        return ONE
    if a.op == "const" and b.op == "const":
        folded = _fold(_pow, a.value, b.value)
        if folded is not None:
            return folded
    return Expr("pow", (a, b))


def apply_function(name: str, a: Expr) -> Expr:
    if name not in _UNARY:
        raise ValueError(f"Unknown function '{name}'")
    if a.op == "const":
        folded = _fold(_UNARY[name], a.value)
        if folded is not None:
            return folded
    return Expr(name, (a,))


def exp(a: Any) -> Expr:
    return apply_function("exp", as_expr(a))


def ln(a: Any) -> Expr:
    return apply_function("ln", as_expr(a))


def sin(a: Any) -> Expr:
    return apply_function("sin", as_expr(a))


def cos(a: Any) -> Expr:
    return apply_function("cos", as_expr(a))


def sqrt(a: Any) -> Expr:
    return apply_function("sqrt", as_expr(a))


_BUILDERS: Dict[str, Callable[..., Expr]] = {
    "neg": neg,
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "pow": power,
    "exp": exp,
    "ln": ln,
    "sin": sin,
    "cos": cos,
    "sqrt": sqrt,
}


def rebuild(op: str, args: Sequence[Expr]) -> Expr:
    return _BUILDERS[op](*args)


# Evaluation


def _eval(e: Expr, env: Env) -> Value:
    op = e.op
    if op == "const":
        return e.value
    if op in SYMBOL_KINDS:
        try:
            return env[e.name]  # type: ignore[no-any-return]
        except KeyError:
            raise MissingSymbolError(e.name) from None
    if op == "neg":
        return np.negative(_eval(e.args[0], env))
    if op in _UNARY:
        return _UNARY[op](_eval(e.args[0], env))
    return _BINARY[op](_eval(e.args[0], env), _eval(e.args[1], env))


def evaluate(e: Expr, pt: Point) -> float:
    """Evaluate at a single point. Domain violations raise DomainError."""
    with np.errstate(all="ignore"):
        return float(_eval(e, pt))


def evaluate_batch(e: Expr, env: Env, size: int) -> np.ndarray:
    """Evaluate over arrays of sample values, broadcasting constants to ``size``."""
    with np.errstate(all="ignore"):
        value = _eval(e, env)
    return np.broadcast_to(np.asarray(value, dtype=float), (size,)).copy()


def _compile(e: Expr) -> Callable[[Env], Value]:
    op = e.op
    if op == "const":
        constant = e.value
        return lambda env: constant
    if op in SYMBOL_KINDS:
        name = e.name

        def load(env: Env) -> Value:
            try:
                return env[name]  # type: ignore[no-any-return]
            except KeyError:
                raise MissingSymbolError(name) from None

        return load
    if op == "neg":
        inner = _compile(e.args[0])
        return lambda env: -inner(env)
    if op in _UNARY:
        unary = _UNARY[op]
        arg = _compile(e.args[0])
        return lambda env: unary(arg(env))
    binary = _BINARY[op]
    left = _compile(e.args[0])
    right = _compile(e.args[1])
    return lambda env: binary(left(env), right(env))


def compile_expr(e: Expr) -> Callable[[Env], Value]:
    """Turn an expression into a closure tree for repeated evaluation."""
    compiled = _compile(e)

    def run(env: Env) -> Value:
        with np.errstate(all="ignore"):
            return compiled(env)

    return run


# Calculus


def depends_on(e: Expr, symbol: str) -> bool:
    if e.op in SYMBOL_KINDS:
        return e.name == symbol
    return any(depends_on(arg, symbol) for arg in e.args)


def free_symbols(e: Expr) -> FrozenSet[str]:
    if e.op in SYMBOL_KINDS:
        return frozenset((e.name,))
    found: FrozenSet[str] = frozenset()
    for arg in e.args:
        found = found | free_symbols(arg)
    return found


def diff(e: Expr, s: str) -> Expr:
    """Exact partial derivative with respect to the symbol ``s``."""
    op = e.op
    if op == "const":
        return ZERO
    if op in SYMBOL_KINDS:
        return ONE if e.name == s else ZERO
    if not depends_on(e, s):
        return ZERO

    if op == "neg":
        return neg(diff(e.args[0], s))
    if op in _UNARY:
        inner = e.args[0]
        d_inner = diff(inner, s)
        if op == "exp":
            return mul(e, d_inner)
        if op == "ln":
            return div(d_inner, inner)
        if op == "sin":
            return mul(cos(inner), d_inner)
        if op == "cos":
            return neg(mul(sin(inner), d_inner))
        return div(d_inner, mul(TWO, e))

    a, b = e.args
    da = diff(a, s)
    db = diff(b, s)
    if op == "add":
        return add(da, db)
    if op == "sub":
        return sub(da, db)
    if op == "mul":
        return add(mul(da, b), mul(a, db))
    if op == "div":
        return sub(div(da, b), div(mul(a, db), power(b, TWO)))

    # pow
    if db.is_zero():
        return mul(mul(b, power(a, sub(b, ONE))), da)
    return mul(e, add(mul(db, ln(a)), div(mul(b, da), a)))


def grad(e: Expr, chart: Chart) -> Tuple[Expr, ...]:
    """Spatial gradient; time is never included."""
    return tuple(diff(e, name) for name in chart.coords)


def simplify(e: Expr) -> Expr:
    if not e.args:
        return e
    return rebuild(e.op, [simplify(arg) for arg in e.args])


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace symbols by expressions, folding as the tree is rebuilt."""
    if e.op in SYMBOL_KINDS:
        return mapping.get(e.name, e)
    if not e.args:
        return e
    return rebuild(e.op, [substitute(arg, mapping) for arg in e.args])


def bind(e: Expr, values: Mapping[str, float]) -> Expr:
    return substitute(e, {name: const(value) for name, value in values.items()})


# Printing

_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOLS = {"add": " + ", "sub": " - ", "mul": "*", "div": "/", "pow": "^"}


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _precedence(e: Expr) -> int:
    if e.op == "const":
        return 3 if e.value < 0 or math.copysign(1.0, e.value) < 0 else 5
    return _PRECEDENCE.get(e.op, 5)


def _wrap(e: Expr, minimum: int) -> str:
    text = to_source(e)
    return f"({text})" if _precedence(e) < minimum else text


def to_source(e: Expr) -> str:
    """Render in the input language; parsing the result gives an equal function."""
    op = e.op
    if op == "const":
        if math.copysign(1.0, e.value) < 0:
            return "-" + _format_number(-e.value)
        return _format_number(e.value)
    if op in SYMBOL_KINDS:
        return e.name
    if op == "neg":
        return "-" + _wrap(e.args[0], 3)
    if op in _UNARY:
        return f"{op}({to_source(e.args[0])})"
    a, b = e.args
    if op in ("add", "sub"):
        right_min = 1 if op == "add" else 2
        return _wrap(a, 1) + _SYMBOLS[op] + _wrap(b, right_min)
    if op in ("mul", "div"):
        return _wrap(a, 2) + _SYMBOLS[op] + _wrap(b, 3)
    return _wrap(a, 5) + "^" + _wrap(b, 3)


def function_equal(
    a: Expr,
    b: Expr,
    points: Iterable[Point],
    rtol: float = 1e-12,
) -> bool:
    """Numeric function-equality test at the given points."""
    for pt in points:
        left = evaluate(a, pt)
        right = evaluate(b, pt)
        if abs(left - right) > rtol * max(1.0, abs(left), abs(right)):
            return False
    return True
