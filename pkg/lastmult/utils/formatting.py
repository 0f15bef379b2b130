"""Report and trajectory formatting utilities for lastmult."""

import json
import math
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np


class ReportFormatter:
    def __init__(self, indent: Optional[int] = 2):
        self.indent = indent

    def format_number(self, value: float) -> str:
        """Format a real with 17 significant digits."""
        return format(float(value), ".17g")

    def ensure_fields(self, fields: Optional[Mapping[str, Any]]) -> Dict[str, Any]:
        """Make a field mapping JSON-safe: numpy scalars become Python values."""
        if fields is None:
            return {}

        formatted_fields: Dict[str, Any] = {}
        for key, value in fields.items():
            if isinstance(key, str) and key.strip():
                formatted_key = key.strip()
                value = self._to_builtin(value)
                try:
                    json.dumps(value, allow_nan=False)
                    formatted_fields[formatted_key] = value
                except (TypeError, ValueError):
                    formatted_fields[formatted_key] = str(value)

        return formatted_fields

    def format_point(self, point: Mapping[str, float]) -> Dict[str, float]:
        return {name: float(point[name]) for name in sorted(point)}

    def format_report(self, report: Mapping[str, Any]) -> str:
        """Serialize a report deterministically (fixed key order, trailing newline)."""
        return json.dumps(self._to_builtin(report), indent=self.indent) + "\n"

    def format_csv(
        self,
        header: Sequence[str],
        columns: Sequence[np.ndarray],
    ) -> str:
        rows: List[str] = [",".join(header)]
        data = np.column_stack([np.asarray(column, dtype=float) for column in columns])
        for row in data:
            rows.append(",".join(self.format_number(value) for value in row))
        return "\n".join(rows) + "\n"

    def _to_builtin(self, value: Any) -> Any:
        if isinstance(value, Mapping):
            return {str(k): self._to_builtin(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self._to_builtin(v) for v in value]
        if isinstance(value, np.ndarray):
            return [self._to_builtin(v) for v in value.tolist()]
        if isinstance(value, (np.bool_, bool)):
            return bool(value)
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, (np.floating, float)):
            number = float(value)
            if math.isnan(number):
                return "nan"
            if math.isinf(number):
                return "inf" if number > 0 else "-inf"
            return number
        return value
