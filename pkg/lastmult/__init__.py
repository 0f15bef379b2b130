"""Jacobi last multiplier verification engine and simulator."""

from .core import Chart, DifferentialForm, Expr, VectorField, configure_logging, parse
from .dynamics import Trajectory, integrate
from .models import ModelSpec, get_model, list_models, load_model
from .verify import CheckRunner, verify_model


__version__ = "0.1.0"

# Main exports
__all__ = [
    "Chart",
    "CheckRunner",
    "DifferentialForm",
    "Expr",
    "ModelSpec",
    "Trajectory",
    "VectorField",
    "configure_logging",
    "get_model",
    "integrate",
    "list_models",
    "load_model",
    "parse",
    "verify_model",
]
