import math
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Generic, Optional, TypeVar

from ..core.stats import ResidualStats
from ..core.types import CheckRecord


K = TypeVar("K")


@dataclass(frozen=True)
class ResidualCheck:
    """A named identity with a human-readable anchor and a deferred computation."""

    name: str
    anchor: str
    compute: Callable[[], ResidualStats]

    def run(self) -> ResidualStats:
        return self.compute()


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    stats: ResidualStats
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.stats.passed

    def to_record(self) -> CheckRecord:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "samples": self.stats.count,
            "max": self.stats.max,
            "mean": self.stats.mean,
            "argmax": dict(sorted(self.stats.argmax.items())),
            "pass": self.passed,
        }

    @classmethod
    def failed(cls, name: str, anchor: str, error: str, tolerance: float) -> "CheckResult":
        stats = ResidualStats(0, math.inf, math.inf, {}, tolerance)
        return cls(name, anchor, stats, error)


class SharedResiduals(Generic[K]):
    """Computes a group of residuals once and hands them out by key."""

    def __init__(self, compute: Callable[[], Dict[K, ResidualStats]]):
        self._compute = compute
        self._value: Optional[Dict[K, ResidualStats]] = None
        self._lock = threading.Lock()

    def get(self, key: K) -> ResidualStats:
        with self._lock:
            if self._value is None:
                self._value = self._compute()
            return self._value[key]

    def check(self, name: str, anchor: str, key: K) -> ResidualCheck:
        return ResidualCheck(name, anchor, lambda: self.get(key))


__all__ = ["CheckResult", "ResidualCheck", "SharedResiduals"]
