from typing import Mapping, Optional, Sequence

from ..core.logger import get_logger
from ..core.stats import sample_points
from ..core.types import Report
from ..models.model import ModelSpec
from ..utils.validation import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    ConfigValidator,
)
from .checks import CheckResult
from .runner import CheckRunner
from .suites import build_checks


logger = get_logger(__name__)

_validator = ConfigValidator()


def build_report(
    model: str,
    params: Mapping[str, float],
    seed: int,
    results: Sequence[CheckResult],
) -> Report:
    """Report with checks ordered by name; it passes only if every check passes."""
    ordered = sorted(results, key=lambda result: result.name)
    return {
        "model": model,
        "params": dict(sorted(params.items())),
        "seed": seed,
        "checks": [result.to_record() for result in ordered],
        "pass": all(result.passed for result in ordered),
    }


def verify_model(
    spec: ModelSpec,
    params: Optional[Mapping[str, float]] = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerance: float = DEFAULT_TOLERANCE,
    runner: Optional[CheckRunner] = None,
) -> Report:
    samples = _validator.validate_samples(samples)
    seed = _validator.validate_seed(seed)
    tolerance = _validator.validate_tolerance(tolerance)
    values = spec.parameters(params)

    pts = sample_points(spec.chart, samples, seed, values, spec.sample_domain())
    checks = build_checks(spec, pts, tolerance)
    log = logger.bind(model=spec.name, samples=samples, seed=seed)
    log.info("verification_started", checks=len(checks))

    if runner is None:
        with CheckRunner(tolerance=tolerance) as own:
            results = own.run(checks)
    else:
        results = runner.run(checks)

    report = build_report(spec.name, values, seed, results)
    log.info("verification_finished", passed=report["pass"])
    return report


__all__ = ["build_report", "verify_model"]
