"""Input validation utilities for lastmult."""

import math
import re
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple


VALID_LOG_LEVELS: Set[str] = {
    "DEBUG",
    "INFO",
    "WARNING",
    "WARN",
    "ERROR",
    "CRITICAL",
    "FATAL",
}

VALID_METHODS: Set[str] = {"rk4", "rk45"}
VALID_MONITORS: Set[str] = {"drift", "evolution", "conformal", "logdet"}
VALID_FRAMES: Set[str] = {"source", "standard"}

DEFAULT_LOG_LEVEL: str = "WARNING"
DEFAULT_SAMPLES: int = 500
DEFAULT_SEED: int = 42
DEFAULT_TOLERANCE: float = 1e-9
DEFAULT_DOMAIN: Tuple[float, float] = (0.5, 2.0)
DEFAULT_TIME_WINDOW: Tuple[float, float] = (0.0, 1.0)
DEFAULT_STEP: float = 1e-3
QUADRATURE_TOLERANCE: float = 1e-9
RECONSTRUCTION_TOLERANCE: float = 1e-7
MAX_SAMPLES: int = 1_000_000

PARAMETER_PATTERN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\s*$")


class ConfigValidator:
    def __init__(self, max_samples: Optional[int] = None):
        self.max_samples = max_samples or MAX_SAMPLES

    def validate_log_level(self, level: str) -> str:
        level_upper = level.strip().upper()

        if not level_upper:
            raise ValueError("Log level cannot be empty")

        if level_upper not in VALID_LOG_LEVELS:
            raise ValueError(
                f"Invalid log level '{level}'. Must be one of: {', '.join(sorted(VALID_LOG_LEVELS))}"
            )

        return self._normalize_log_level(level_upper)

    def validate_samples(self, samples: int) -> int:
        if isinstance(samples, bool) or not isinstance(samples, int):
            raise ValueError(f"Sample count must be an integer, got {samples!r}")

        if samples < 1:
            raise ValueError("Sample count must be at least 1")

        if samples > self.max_samples:
            raise ValueError(
                f"Sample count too large ({samples}). Maximum allowed: {self.max_samples}"
            )

        return samples

    def validate_seed(self, seed: int) -> int:
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ValueError(f"Seed must be a non-negative integer, got {seed!r}")

        return seed

    def validate_tolerance(self, tolerance: float) -> float:
        tolerance = float(tolerance)

        if not math.isfinite(tolerance) or tolerance <= 0:
            raise ValueError(f"Tolerance must be a finite positive number, got {tolerance!r}")

        return tolerance

    def validate_parameters(
        self, overrides: Iterable[str], declared: Iterable[str]
    ) -> Dict[str, float]:
        """Parse ``k=v`` overrides against the declared parameter names."""
        known = set(declared)
        result: Dict[str, float] = {}

        for item in overrides:
            match = PARAMETER_PATTERN.match(item)
            if match is None:
                raise ValueError(f"Invalid parameter override '{item}'. Expected k=v")

            name, raw = match.groups()
            if name not in known:
                raise ValueError(
                    f"Unknown parameter '{name}'. Declared: {', '.join(sorted(known)) or 'none'}"
                )

            result[name] = self.parse_real(raw, f"parameter '{name}'")

        return result

    def validate_point(self, raw: str, coords: Sequence[str]) -> Dict[str, float]:
        """Parse a comma list into a coordinate point of the expected arity."""
        parts = [part for part in raw.split(",") if part.strip()]

        if len(parts) != len(coords):
            raise ValueError(
                f"Expected {len(coords)} values ({', '.join(coords)}), got {len(parts)}"
            )

        return {
            name: self.parse_real(part, f"coordinate '{name}'")
            for name, part in zip(coords, parts)
        }

    def validate_time_window(
        self, t0: float, t1: float, dt: float
    ) -> Tuple[float, float, float]:
        t0, t1, dt = float(t0), float(t1), float(dt)

        if not all(math.isfinite(value) for value in (t0, t1, dt)):
            raise ValueError("Time window values must be finite")

        if t1 <= t0:
            raise ValueError(f"End time must exceed start time ({t1} <= {t0})")

        if dt <= 0:
            raise ValueError(f"Step must be positive, got {dt}")

        return t0, t1, dt

    def validate_method(self, method: str) -> str:
        method = method.strip().lower()

        if method not in VALID_METHODS:
            raise ValueError(
                f"Invalid method '{method}'. Must be one of: {', '.join(sorted(VALID_METHODS))}"
            )

        return method

    def validate_monitors(self, monitors: Optional[Iterable[str]]) -> List[str]:
        if monitors is None:
            return []

        validated: List[str] = []
        for monitor in monitors:
            name = monitor.strip().lower()
            if name not in VALID_MONITORS:
                raise ValueError(
                    f"Invalid monitor '{monitor}'. Must be one of: {', '.join(sorted(VALID_MONITORS))}"
                )
            if name not in validated:
                validated.append(name)

        return validated

    def validate_frame(self, frame: str) -> str:
        frame = frame.strip().lower()

        if frame not in VALID_FRAMES:
            raise ValueError(
                f"Invalid frame '{frame}'. Must be one of: {', '.join(sorted(VALID_FRAMES))}"
            )

        return frame

    def validate_interval(self, name: str, lo: float, hi: float) -> Tuple[float, float]:
        lo, hi = float(lo), float(hi)

        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"Interval for '{name}' must be finite")

        if lo >= hi:
            raise ValueError(f"Interval for '{name}' is empty: [{lo}, {hi}]")

        return lo, hi

    def validate_domain(
        self, domain: Mapping[str, Tuple[float, float]]
    ) -> Dict[str, Tuple[float, float]]:
        return {
            name: self.validate_interval(name, lo, hi)
            for name, (lo, hi) in domain.items()
        }

    def parse_real(self, raw: str, what: str) -> float:
        try:
            value = float(raw.strip())
        except ValueError:
            raise ValueError(f"Invalid number for {what}: '{raw.strip()}'") from None

        if not math.isfinite(value):
            raise ValueError(f"Value for {what} must be finite")

        return value

    def _normalize_log_level(self, level: str) -> str:
        if level in ("FATAL", "CRITICAL"):
            return "CRITICAL"

        if level == "WARN":
            return "WARNING"

        return level
