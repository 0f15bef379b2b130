"""Type definitions and protocols for lastmult core functionality."""

from typing import TYPE_CHECKING, Dict, List, Protocol, Tuple, TypedDict


if TYPE_CHECKING:
    from .stats import ResidualStats


Interval = Tuple[float, float]
ParamValues = Dict[str, float]

# "pass" is a keyword, hence the functional TypedDict syntax.
ResidualRecord = TypedDict(
    "ResidualRecord",
    {
        "count": int,
        "max": float,
        "mean": float,
        "argmax": Dict[str, float],
        "pass": bool,
    },
)

CheckRecord = TypedDict(
    "CheckRecord",
    {
        "name": str,
        "anchor": str,
        "samples": int,
        "max": float,
        "mean": float,
        "argmax": Dict[str, float],
        "pass": bool,
    },
)

Report = TypedDict(
    "Report",
    {
        "model": str,
        "params": ParamValues,
        "seed": int,
        "checks": List[CheckRecord],
        "pass": bool,
    },
)


class Check(Protocol):
    """A named residual check that can run on any worker thread."""

    name: str
    anchor: str

    def run(self) -> "ResidualStats":
        """Compute the residual statistics."""
        ...

