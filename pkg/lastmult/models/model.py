"""Model records: dynamics plus every structure published for it."""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

from ..core.errors import FormError
from ..core.expr import ONE, Chart, Expr, substitute
from ..core.forms import VectorField
from ..core.types import Interval, ParamValues
from ..structures.ham2d import ConformalData2D, conformal_field_2d, hamiltonian_field_2d
from ..structures.jlm import CoordinateTransform, MultiplierData
from ..structures.nambu3d import (
    ConformalParams,
    HamiltonianPair,
    NambuData,
    conformal_nambu_field,
    nambu_field,
)
from ..utils.validation import ConfigValidator


_validator = ConfigValidator()


@dataclass(frozen=True)
class CanonicalBlock:
    """Canonical (q, p) or standard (u, v, w) coordinates.

    ``hamiltonians`` are written in the target chart: one for planar models,
    a pair for three-dimensional ones.
    """

    kind: str
    transform: CoordinateTransform
    hamiltonians: Tuple[Expr, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("canonical", "standard"):
            raise ValueError(f"Unknown coordinate block '{self.kind}'")
        object.__setattr__(self, "hamiltonians", tuple(self.hamiltonians))

    @property
    def chart(self) -> Chart:
        return self.transform.target_chart

    def pulled_back(self) -> Tuple[Expr, ...]:
        """Target Hamiltonians rewritten in source coordinates."""
        mapping = self.transform.as_mapping()
        return tuple(substitute(h, mapping) for h in self.hamiltonians)

    def target_field(self) -> VectorField:
        """Spatial field generated in the target chart (time-dependent in general)."""
        chart = self.chart
        if chart.dimension == 2:
            (K,) = self.hamiltonians
            return hamiltonian_field_2d(K, ONE, chart)
        H1, H2 = self.hamiltonians
        return nambu_field(HamiltonianPair(H1, H2), NambuData(chart))


@dataclass(frozen=True)
class ConformalBlock2D:
    """Omega, theta, Liouville field and scaling for a planar conformal form."""

    data: ConformalData2D
    hamiltonian: Expr

    @property
    def factor(self) -> Expr:
        return self.data.scale

    @property
    def density(self) -> Expr:
        return self.data.density

    def field(self) -> VectorField:
        return conformal_field_2d(self.hamiltonian, self.data.scale, self.data)


@dataclass(frozen=True)
class ConformalBlock3D:
    """Linear scalings and the Hamiltonian pair of a conformal Nambu form."""

    params: ConformalParams
    pair: HamiltonianPair

    @property
    def factor(self) -> Expr:
        return self.params.total

    @property
    def density(self) -> Expr:
        return ONE

    def field(self) -> VectorField:
        return conformal_nambu_field(self.pair.H1, self.pair.H2, self.params)


ConformalBlock = Union[ConformalBlock2D, ConformalBlock3D]


@dataclass(frozen=True)
class ModelSpec:
    name: str
    chart: Chart
    dynamics: VectorField
    multiplier: Expr
    aux: Tuple[Expr, ...] = ()
    hamiltonians: Tuple[Expr, ...] = ()
    canonical: Optional[CanonicalBlock] = None
    conformal: Optional[ConformalBlock] = None
    domain: Mapping[str, Interval] = field(default_factory=dict)
    derived: Mapping[str, Expr] = field(default_factory=dict)
    errata: Tuple[str, ...] = ()
    description: str = ""

    def __post_init__(self) -> None:
        dimension = self.chart.dimension
        if dimension not in (2, 3):
            raise FormError(f"Model '{self.name}' must be 2- or 3-dimensional")
        if self.dynamics.chart.coords != self.chart.coords:
            raise FormError(f"Dynamics of '{self.name}' live on another chart")
        if self.hamiltonians and len(self.hamiltonians) != dimension - 1:
            raise FormError(
                f"Model '{self.name}' needs {dimension - 1} Hamiltonian(s), "
                f"got {len(self.hamiltonians)}"
            )
        # MultiplierData validates the auxiliary functions
        object.__setattr__(self, "aux", self.multiplier_data().aux)
        object.__setattr__(self, "hamiltonians", tuple(self.hamiltonians))
        object.__setattr__(self, "errata", tuple(self.errata))

    @property
    def dimension(self) -> int:
        return self.chart.dimension

    @property
    def has_hamiltonian(self) -> bool:
        return bool(self.hamiltonians)

    @property
    def hamiltonian(self) -> Expr:
        if self.dimension != 2 or not self.hamiltonians:
            raise FormError(f"Model '{self.name}' has no planar Hamiltonian")
        return self.hamiltonians[0]

    @property
    def pair(self) -> HamiltonianPair:
        if self.dimension != 3 or not self.hamiltonians:
            raise FormError(f"Model '{self.name}' has no Hamiltonian pair")
        return HamiltonianPair(*self.hamiltonians)

    def multiplier_data(self) -> MultiplierData:
        return MultiplierData(self.chart, self.dynamics, self.multiplier, tuple(self.aux))

    def parameters(self, overrides: Optional[Mapping[str, float]] = None) -> ParamValues:
        """Defaults merged with ``overrides``, sorted by name."""
        values: Dict[str, float] = dict(self.chart.defaults)
        for name in self.chart.params:
            values.setdefault(name, 1.0)
        if overrides:
            unknown = set(overrides) - set(self.chart.params)
            if unknown:
                raise ValueError(
                    f"Unknown parameter(s) for '{self.name}': {', '.join(sorted(unknown))}"
                )
            values.update(overrides)
        return dict(sorted(values.items()))

    def sample_domain(self) -> Dict[str, Interval]:
        return _validator.validate_domain(self.domain)


__all__ = [
    "CanonicalBlock",
    "ConformalBlock",
    "ConformalBlock2D",
    "ConformalBlock3D",
    "ModelSpec",
]
