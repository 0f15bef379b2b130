"""Exception hierarchy for lastmult."""

from typing import Any, Dict, Iterable, Optional


class LastMultError(Exception):
    """Base class for every error raised by lastmult."""


class ExprError(LastMultError, ValueError):
    """Invalid expression input."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UndeclaredSymbolError(ExprError):
    def __init__(self, symbol: str, offset: Optional[int] = None):
        self.symbol = symbol
        self.offset = offset
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"Undeclared symbol '{symbol}'{where}")


class MissingSymbolError(ExprError, KeyError):
    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(f"No value supplied for symbol '{symbol}'")

    def __str__(self) -> str:
        return str(self.args[0])


class DomainError(LastMultError, ArithmeticError):
    """Evaluation left the real domain of an operation."""

    def __init__(self, operation: str, detail: str = ""):
        self.operation = operation
        message = f"Domain error in {operation}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class FormError(LastMultError, ValueError):
    """Invalid degree or shape for a form operation."""


class ChartMismatchError(FormError):
    def __init__(self, left: Iterable[str], right: Iterable[str]):
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(
            f"Chart mismatch: ({', '.join(self.left)}) vs ({', '.join(self.right)})"
        )


class DegenerateStructureError(LastMultError, ValueError):
    """A structure that must be non-degenerate vanishes at a sample point."""

    def __init__(self, message: str, point: Optional[Dict[str, float]] = None):
        self.point = point or {}
        super().__init__(message)


class SingularTransformError(DegenerateStructureError):
    pass


class QuadratureError(LastMultError, ArithmeticError):
    pass


class SingularPathError(QuadratureError):
    pass


class PathDependenceError(QuadratureError):
    def __init__(self, first: float, second: float, tolerance: float):
        self.first = first
        self.second = second
        self.tolerance = tolerance
        super().__init__(
            f"Line integral depends on the path: {first!r} vs {second!r} "
            f"(tolerance {tolerance:g})"
        )


class ModelFormatError(LastMultError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class UnknownModelError(LastMultError, KeyError):
    def __init__(self, name: str, available: Iterable[str]):
        self.name = name
        self.available = tuple(available)
        super().__init__(
            f"Unknown model '{name}'. Available: {', '.join(self.available)}"
        )

    def __str__(self) -> str:
        return str(self.args[0])


class IntegrationError(LastMultError, RuntimeError):
    def __init__(self, message: str, time: float, state: Any = None):
        self.time = time
        self.state = state
        super().__init__(f"{message} (t={time:.17g})")
