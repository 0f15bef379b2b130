"""lastmult core module."""

from .errors import (
    ChartMismatchError,
    DegenerateStructureError,
    DomainError,
    ExprError,
    ExprSyntaxError,
    FormError,
    IntegrationError,
    LastMultError,
    MissingSymbolError,
    ModelFormatError,
    PathDependenceError,
    QuadratureError,
    SingularPathError,
    SingularTransformError,
    UndeclaredSymbolError,
    UnknownModelError,
)
from .expr import Chart, Expr, compile_expr, diff, evaluate, substitute, to_source
from .forms import DifferentialForm, VectorField, differential, interior, lie_derivative, wedge
from .logger import configure_logging, get_logger
from .parser import parse
from .registry import register_runner
from .stats import ResidualStats, SampleBatch, residual_stats, sample_points
from .types import Check, CheckRecord, Report, ResidualRecord


__all__ = [
    "Chart",
    "Check",
    "CheckRecord",
    "ChartMismatchError",
    "DegenerateStructureError",
    "DifferentialForm",
    "DomainError",
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "FormError",
    "IntegrationError",
    "LastMultError",
    "MissingSymbolError",
    "ModelFormatError",
    "PathDependenceError",
    "QuadratureError",
    "Report",
    "ResidualRecord",
    "ResidualStats",
    "SampleBatch",
    "SingularPathError",
    "SingularTransformError",
    "UndeclaredSymbolError",
    "UnknownModelError",
    "VectorField",
    "compile_expr",
    "configure_logging",
    "diff",
    "differential",
    "evaluate",
    "get_logger",
    "interior",
    "lie_derivative",
    "parse",
    "register_runner",
    "residual_stats",
    "sample_points",
    "substitute",
    "to_source",
    "wedge",
]
