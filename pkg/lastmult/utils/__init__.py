"""lastmult utilities package."""

from .formatting import ReportFormatter
from .validation import ConfigValidator


__all__ = [
    "ConfigValidator",
    "ReportFormatter",
]
