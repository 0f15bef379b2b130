"""Residual statistics and seeded sample batches."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from ..utils.validation import DEFAULT_DOMAIN, DEFAULT_TIME_WINDOW, DEFAULT_TOLERANCE
from .expr import Chart, Expr, evaluate_batch
from .types import ResidualRecord


Sample = Union[float, np.ndarray]


@dataclass(frozen=True)
class SampleBatch:
    """Sample values keyed by symbol; parameters may be scalars."""

    size: int
    values: Mapping[str, Sample]

    def evaluate(self, e: Expr) -> np.ndarray:
        return evaluate_batch(e, self.values, self.size)

    def point(self, index: int) -> Dict[str, float]:
        result: Dict[str, float] = {}
        for name in sorted(self.values):
            value = self.values[name]
            if isinstance(value, np.ndarray):
                result[name] = float(value[index])
            else:
                result[name] = float(value)
        return result

    def points(self) -> Iterable[Dict[str, float]]:
        for index in range(self.size):
            yield self.point(index)

    def with_values(self, extra: Mapping[str, Sample]) -> "SampleBatch":
        merged = dict(self.values)
        merged.update(extra)
        return SampleBatch(self.size, merged)


@dataclass(frozen=True)
class ResidualStats:
    count: int
    max: float
    mean: float
    argmax: Dict[str, float]
    tolerance: float = DEFAULT_TOLERANCE
    components: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max <= self.tolerance

    def merge(self, other: "ResidualStats") -> "ResidualStats":
        """Combine two checks over the same points into one gate."""
        components = dict(self.components)
        components.update(other.components)
        winner = self if self.max >= other.max else other
        return ResidualStats(
            count=max(self.count, other.count),
            max=winner.max,
            mean=max(self.mean, other.mean),
            argmax=winner.argmax,
            tolerance=min(self.tolerance, other.tolerance),
            components=components,
        )

    def to_dict(self) -> ResidualRecord:
        return {
            "count": self.count,
            "max": self.max,
            "mean": self.mean,
            "argmax": dict(self.argmax),
            "pass": self.passed,
        }


def scaled_residual(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """|lhs - rhs| / max(1, |lhs|, |rhs|), elementwise."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.asarray(np.abs(lhs - rhs) / scale)


def residual_stats(
    pairs: Mapping[str, Tuple[np.ndarray, np.ndarray]],
    batch: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
    gated: Optional[Iterable[str]] = None,
) -> ResidualStats:
    """Reduce labelled (lhs, rhs) sample arrays to a single ResidualStats.

    Components outside ``gated`` are reported but do not enter max/mean.
    """
    gate = set(pairs) if gated is None else set(gated)
    components: Dict[str, float] = {}
    worst = np.zeros(batch.size)

    for label in sorted(pairs):
        lhs, rhs = pairs[label]
        residual = scaled_residual(lhs, rhs)
        residual = np.broadcast_to(residual, (batch.size,))
        components[label] = float(np.max(residual)) if batch.size else 0.0
        if label in gate:
            worst = np.maximum(worst, residual)

    if batch.size == 0:
        return ResidualStats(0, 0.0, 0.0, {}, tolerance, components)

    index = int(np.argmax(worst))
    return ResidualStats(
        count=batch.size,
        max=float(worst[index]),
        mean=float(np.mean(worst)),
        argmax=batch.point(index),
        tolerance=tolerance,
        components=components,
    )


def residual_values(
    lhs: Expr,
    rhs: Expr,
    batch: SampleBatch,
    tolerance: float = DEFAULT_TOLERANCE,
    label: str = "value",
) -> ResidualStats:
    return residual_stats(
        {label: (batch.evaluate(lhs), batch.evaluate(rhs))}, batch, tolerance
    )


def sample_points(
    chart: Chart,
    n: int,
    seed: int,
    params: Optional[Mapping[str, float]] = None,
    domain: Optional[Mapping[str, Tuple[float, float]]] = None,
    time_range: Tuple[float, float] = DEFAULT_TIME_WINDOW,
) -> SampleBatch:
    """Draw ``n`` seeded points, coordinates first in chart order, then time."""
    rng = np.random.default_rng(seed)
    domain = domain or {}
    values: Dict[str, Sample] = {}

    for name in chart.coords:
        lo, hi = domain.get(name, DEFAULT_DOMAIN)
        values[name] = rng.uniform(lo, hi, n)

    if chart.time is not None:
        lo, hi = domain.get(chart.time, time_range)
        values[chart.time] = rng.uniform(lo, hi, n)

    bound = dict(chart.defaults)
    bound.update(params or {})
    for name in chart.params:
        if name in bound:
            values[name] = float(bound[name])

    return SampleBatch(n, values)
