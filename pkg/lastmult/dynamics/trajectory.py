from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..core.stats import Sample, SampleBatch
from ..utils.formatting import ReportFormatter


_formatter = ReportFormatter()


@dataclass(frozen=True)
class Trajectory:
    """States on a strictly increasing time grid plus named monitor series."""

    coords: Tuple[str, ...]
    times: np.ndarray
    states: np.ndarray
    time_symbol: Optional[str] = "t"
    params: Mapping[str, float] = field(default_factory=dict)
    monitors: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("Trajectory needs a non-empty 1-D time grid")
        if np.any(np.diff(times) <= 0):
            raise ValueError("Trajectory time grid must be strictly increasing")
        if states.shape != (times.size, len(self.coords)):
            raise ValueError(
                f"States shape {states.shape} does not match "
                f"{times.size} times x {len(self.coords)} coordinates"
            )
        for name, series in self.monitors.items():
            if np.asarray(series).shape != times.shape:
                raise ValueError(f"Monitor '{name}' does not match the time grid")
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "monitors", dict(self.monitors))

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def initial_state(self) -> Dict[str, float]:
        return dict(zip(self.coords, (float(v) for v in self.states[0])))

    @property
    def final_state(self) -> Dict[str, float]:
        return dict(zip(self.coords, (float(v) for v in self.states[-1])))

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.coords.index(name)]

    def batch(self) -> SampleBatch:
        """Grid points as a sample batch: coordinates, time and parameters."""
        values: Dict[str, Sample] = {
            name: self.states[:, i].copy() for i, name in enumerate(self.coords)
        }
        if self.time_symbol is not None:
            values[self.time_symbol] = self.times.copy()
        values.update(self.params)
        return SampleBatch(len(self), values)

    def with_monitor(self, name: str, series: np.ndarray) -> "Trajectory":
        monitors = dict(self.monitors)
        monitors[name] = np.asarray(series, dtype=float)
        return replace(self, monitors=monitors)

    def to_csv(self) -> str:
        """``t,<coords>,<monitors>`` with 17 significant digits."""
        header = ["t", *self.coords, *self.monitors]
        columns = [self.times]
        columns += [self.states[:, i] for i in range(len(self.coords))]
        columns += [np.asarray(series) for series in self.monitors.values()]
        return _formatter.format_csv(header, columns)


__all__ = ["Trajectory"]
