"""Verification suites, the concurrent check runner and JSON reports."""

from .checks import CheckResult, ResidualCheck, SharedResiduals
from .report import build_report, verify_model
from .runner import CheckRunner
from .suites import (
    build_checks,
    conformal_checks,
    multiplier_checks,
    nambu_checks,
    symplectic_checks,
    transform_checks,
)


__all__ = [
    "CheckResult",
    "CheckRunner",
    "ResidualCheck",
    "SharedResiduals",
    "build_checks",
    "build_report",
    "conformal_checks",
    "multiplier_checks",
    "nambu_checks",
    "symplectic_checks",
    "transform_checks",
    "verify_model",
]
