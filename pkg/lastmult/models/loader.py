"""Reader and writer for the line-oriented model file format.

A model file is UTF-8 text made of ``[section]`` headers followed by
``key = value`` lines; ``#`` starts a comment. Sections::

    [model]      name, dim, vars, time (default t), params (a=1, b, ...),
                 description
    [derived]    parameter expressions, substituted at load time
    [domain]     sample boxes, e.g. ``x = 0.5, 2``
    [dynamics]   one expression per coordinate
    [structure]  multiplier, psi, phi[, varphi], H or H1 + H2
    [canonical]  planar target coordinates (q, p, ...) and optional H
    [standard]   three-dimensional target coordinates and optional H1, H2
    [conformal]  planar: omega, theta_<c>, Z_<c>, scale, H
                 three-dimensional: a1, a2, a3, F1, F2
    [errata]     free text, one note per line
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..core.errors import ExprError, FormError, ModelFormatError
from ..core.expr import ZERO, Chart, Expr, free_symbols, substitute, to_source
from ..core.forms import DifferentialForm, VectorField
from ..core.logger import get_logger
from ..core.parser import parse
from ..structures.ham2d import ConformalData2D, area_form
from ..structures.jlm import CoordinateTransform
from ..structures.nambu3d import ConformalParams, HamiltonianPair
from ..utils.validation import ConfigValidator
from .model import CanonicalBlock, ConformalBlock, ConformalBlock2D, ConformalBlock3D, ModelSpec


logger = get_logger(__name__)

SECTIONS: Tuple[str, ...] = (
    "model",
    "derived",
    "domain",
    "dynamics",
    "structure",
    "canonical",
    "standard",
    "conformal",
    "errata",
)
REQUIRED_SECTIONS: Tuple[str, ...] = ("model", "dynamics", "structure")
AUX_KEYS: Tuple[str, ...] = ("psi", "phi", "varphi")
HAMILTONIAN_KEYS: Tuple[str, ...] = ("H", "H1", "H2")

_validator = ConfigValidator()


@dataclass
class _Section:
    name: str
    line: int
    entries: Dict[str, Tuple[str, int]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def get(self, key: str) -> Optional[Tuple[str, int]]:
        return self.entries.get(key)

    def require(self, key: str) -> Tuple[str, int]:
        entry = self.entries.get(key)
        if entry is None:
            raise ModelFormatError(f"Section [{self.name}] needs '{key}'", self.line)
        return entry


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _split_sections(text: str) -> Dict[str, _Section]:
    sections: Dict[str, _Section] = {}
    current: Optional[_Section] = None

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue

        if line.startswith("["):
            if not line.endswith("]"):
                raise ModelFormatError(f"Malformed section header '{line}'", number)
            name = line[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ModelFormatError(f"Unknown section [{name}]", number)
            if name in sections:
                raise ModelFormatError(f"Duplicate section [{name}]", number)
            current = _Section(name, number)
            sections[name] = current
            continue

        if current is None:
            raise ModelFormatError("Content before the first section", number)

        if current.name == "errata":
            current.notes.append(line[2:].strip() if line.startswith("- ") else line)
            continue

        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ModelFormatError(f"Expected 'key = value', got '{line}'", number)
        if not value:
            raise ModelFormatError(f"Empty value for '{key}'", number)
        if key in current.entries:
            raise ModelFormatError(f"Duplicate key '{key}' in [{current.name}]", number)
        current.entries[key] = (value, number)

    for name in REQUIRED_SECTIONS:
        if name not in sections:
            raise ModelFormatError(f"Missing required section [{name}]")

    return sections


def _names(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_params(value: str, line: int) -> Tuple[Tuple[str, ...], Dict[str, float]]:
    names: List[str] = []
    defaults: Dict[str, float] = {}
    for item in _names(value):
        name, sep, raw = item.partition("=")
        name = name.strip()
        try:
            defaults[name] = _validator.parse_real(raw, f"parameter '{name}'") if sep else 1.0
        except ValueError as exc:
            raise ModelFormatError(str(exc), line) from exc
        names.append(name)
    return tuple(names), defaults


class _Reader:
    """Builds a ModelSpec from split sections; every error carries a line."""

    def __init__(self, sections: Dict[str, _Section]):
        self.sections = sections
        self.derived: Dict[str, Expr] = {}

    def section(self, name: str) -> Optional[_Section]:
        return self.sections.get(name)

    def expr(self, entry: Tuple[str, int], chart: Chart) -> Expr:
        source, line = entry
        try:
            parsed = parse(source, chart.with_params(tuple(self.derived)))
        except ExprError as exc:
            raise ModelFormatError(str(exc), line) from exc
        return substitute(parsed, self.derived)

    def optional_expr(self, section: _Section, key: str, chart: Chart) -> Optional[Expr]:
        entry = section.get(key)
        return None if entry is None else self.expr(entry, chart)

    def read_chart(self) -> Tuple[str, Chart, str]:
        header = self.sections["model"]
        name = header.require("name")[0]
        vars_value, vars_line = header.require("vars")
        coords = _names(vars_value)

        dim_value, dim_line = header.require("dim")
        try:
            dim = int(dim_value)
        except ValueError:
            raise ModelFormatError(f"dim must be an integer, got '{dim_value}'", dim_line) from None
        if dim != len(coords):
            raise ModelFormatError(
                f"dim = {dim} but {len(coords)} coordinate(s) declared", vars_line
            )

        time_entry = header.get("time")
        time: Optional[str] = "t"
        if time_entry is not None:
            time = None if time_entry[0].lower() == "none" else time_entry[0]

        params: Tuple[str, ...] = ()
        defaults: Dict[str, float] = {}
        params_entry = header.get("params")
        if params_entry is not None:
            params, defaults = _parse_params(*params_entry)

        try:
            chart = Chart(tuple(coords), time, params, defaults)
        except ValueError as exc:
            raise ModelFormatError(str(exc), vars_line) from exc

        description_entry = header.get("description")
        description = description_entry[0] if description_entry else ""
        return name, chart, description

    def read_derived(self, chart: Chart) -> None:
        section = self.section("derived")
        if section is None:
            return
        allowed = set(chart.params)
        for key, entry in section.entries.items():
            if chart.declares(key) or key in self.derived:
                raise ModelFormatError(f"Derived name '{key}' is already declared", entry[1])
            value = self.expr(entry, chart)
            stray = free_symbols(value) - allowed
            if stray:
                raise ModelFormatError(
                    f"Derived '{key}' may only use parameters, found {', '.join(sorted(stray))}",
                    entry[1],
                )
            self.derived[key] = value

    def read_domain(self, chart: Chart) -> Dict[str, Tuple[float, float]]:
        section = self.section("domain")
        if section is None:
            return {}
        domain: Dict[str, Tuple[float, float]] = {}
        for key, (value, line) in section.entries.items():
            if key not in chart.axes:
                raise ModelFormatError(f"Domain given for unknown axis '{key}'", line)
            bounds = _names(value)
            if len(bounds) != 2:
                raise ModelFormatError(f"Domain of '{key}' needs 'lo, hi'", line)
            try:
                domain[key] = _validator.validate_interval(key, float(bounds[0]), float(bounds[1]))
            except ValueError as exc:
                raise ModelFormatError(str(exc), line) from exc
        return domain

    def read_dynamics(self, chart: Chart) -> VectorField:
        section = self.sections["dynamics"]
        for key, (_, line) in section.entries.items():
            if key not in chart.coords:
                raise ModelFormatError(f"Dynamics given for unknown coordinate '{key}'", line)
        components = tuple(self.expr(section.require(name), chart) for name in chart.coords)
        return VectorField(chart, components)

    def read_structure(self, chart: Chart) -> Tuple[Expr, Tuple[Expr, ...], Tuple[Expr, ...]]:
        section = self.sections["structure"]
        multiplier = self.expr(section.require("multiplier"), chart)
        aux = tuple(
            self.optional_expr(section, key, chart) or ZERO
            for key in AUX_KEYS[: chart.dimension]
        )
        keys = ("H",) if chart.dimension == 2 else ("H1", "H2")
        return multiplier, aux, self.hamiltonians(section, keys, chart)

    def hamiltonians(
        self, section: _Section, keys: Sequence[str], chart: Chart
    ) -> Tuple[Expr, ...]:
        found = [self.optional_expr(section, key, chart) for key in keys]
        present = [h for h in found if h is not None]
        if present and len(present) != len(keys):
            raise ModelFormatError(
                f"Section [{section.name}] needs all of {', '.join(keys)} or none", section.line
            )
        return tuple(present)

    def read_canonical(self, chart: Chart) -> Optional[CanonicalBlock]:
        kind = "canonical" if chart.dimension == 2 else "standard"
        other = "standard" if kind == "canonical" else "canonical"
        if self.section(other) is not None:
            raise ModelFormatError(
                f"Section [{other}] does not apply to a {chart.dimension}D model",
                self.sections[other].line,
            )
        section = self.section(kind)
        if section is None:
            return None

        targets = [key for key in section.entries if key not in HAMILTONIAN_KEYS]
        if len(targets) != chart.dimension:
            raise ModelFormatError(
                f"Section [{kind}] needs {chart.dimension} coordinates, got {len(targets)}",
                section.line,
            )
        maps = tuple(self.expr(section.entries[name], chart) for name in targets)
        try:
            transform = CoordinateTransform(chart, tuple(targets), maps)
            target_chart = transform.target_chart
        except (ValueError, FormError) as exc:
            raise ModelFormatError(str(exc), section.line) from exc

        keys = ("H",) if chart.dimension == 2 else ("H1", "H2")
        return CanonicalBlock(kind, transform, self.hamiltonians(section, keys, target_chart))

    def read_conformal(self, chart: Chart) -> Optional[ConformalBlock]:
        section = self.section("conformal")
        if section is None:
            return None

        if chart.dimension == 3:
            a1, a2, a3 = (self.expr(section.require(key), chart) for key in ("a1", "a2", "a3"))
            F1 = self.expr(section.require("F1"), chart)
            F2 = self.expr(section.require("F2"), chart)
            return ConformalBlock3D(ConformalParams(chart, a1, a2, a3), HamiltonianPair(F1, F2))

        theta = DifferentialForm.zero(chart, 1)
        liouville = []
        for name in chart.coords:
            coefficient = self.optional_expr(section, f"theta_{name}", chart) or ZERO
            theta = theta + DifferentialForm.basis(chart, (name,), False, coefficient)
            liouville.append(self.optional_expr(section, f"Z_{name}", chart) or ZERO)
        data = ConformalData2D(
            chart,
            area_form(chart, self.expr(section.require("omega"), chart)),
            theta,
            VectorField(chart, tuple(liouville)),
            self.expr(section.require("scale"), chart),
        )
        return ConformalBlock2D(data, self.expr(section.require("H"), chart))


def loads_model(text: str, source: str = "<string>") -> ModelSpec:
    """Parse a model from text; raises ModelFormatError with a line number."""
    reader = _Reader(_split_sections(text))
    name, chart, description = reader.read_chart()
    reader.read_derived(chart)
    domain = reader.read_domain(chart)
    dynamics = reader.read_dynamics(chart)
    multiplier, aux, hamiltonians = reader.read_structure(chart)
    errata_section = reader.section("errata")

    try:
        spec = ModelSpec(
            name=name,
            chart=chart,
            dynamics=dynamics,
            multiplier=multiplier,
            aux=aux,
            hamiltonians=hamiltonians,
            canonical=reader.read_canonical(chart),
            conformal=reader.read_conformal(chart),
            domain=domain,
            derived=dict(reader.derived),
            errata=tuple(errata_section.notes) if errata_section else (),
            description=description,
        )
    except FormError as exc:
        raise ModelFormatError(str(exc)) from exc

    logger.debug("model_loaded", model=name, source=source, dimension=chart.dimension)
    return spec


def load_model(path: Union[str, Path]) -> ModelSpec:
    path = Path(path)
    return loads_model(path.read_text(encoding="utf-8"), source=str(path))


def _number(value: float) -> str:
    return format(value, ".17g")


def dump_model(spec: ModelSpec) -> str:
    """Serialize ``spec``; ``loads_model`` of the result is function-equal."""
    chart = spec.chart
    lines = ["[model]", f"name = {spec.name}", f"dim = {chart.dimension}"]
    lines.append(f"vars = {', '.join(chart.coords)}")
    lines.append(f"time = {chart.time or 'none'}")
    if chart.params:
        params = ", ".join(
            f"{name}={_number(chart.defaults.get(name, 1.0))}" for name in chart.params
        )
        lines.append(f"params = {params}")
    if spec.description:
        lines.append(f"description = {spec.description}")

    if spec.domain:
        lines += ["", "[domain]"]
        lines += [f"{key} = {_number(lo)}, {_number(hi)}" for key, (lo, hi) in spec.domain.items()]

    lines += ["", "[dynamics]"]
    lines += [
        f"{name} = {to_source(component)}"
        for name, component in zip(chart.coords, spec.dynamics.components)
    ]

    lines += ["", "[structure]", f"multiplier = {to_source(spec.multiplier)}"]
    lines += [f"{key} = {to_source(value)}" for key, value in zip(AUX_KEYS, spec.aux)]
    keys = ("H",) if chart.dimension == 2 else ("H1", "H2")
    lines += [f"{key} = {to_source(h)}" for key, h in zip(keys, spec.hamiltonians)]

    if spec.canonical is not None:
        block = spec.canonical
        lines += ["", f"[{block.kind}]"]
        lines += [
            f"{name} = {to_source(m)}"
            for name, m in zip(block.transform.targets, block.transform.maps)
        ]
        lines += [f"{key} = {to_source(h)}" for key, h in zip(keys, block.hamiltonians)]

    conformal = spec.conformal
    if isinstance(conformal, ConformalBlock3D):
        cp = conformal.params
        lines += [
            "",
            "[conformal]",
            f"a1 = {to_source(cp.a1)}",
            f"a2 = {to_source(cp.a2)}",
            f"a3 = {to_source(cp.a3)}",
            f"F1 = {to_source(conformal.pair.H1)}",
            f"F2 = {to_source(conformal.pair.H2)}",
        ]
    elif isinstance(conformal, ConformalBlock2D):
        data = conformal.data
        lines += ["", "[conformal]", f"omega = {to_source(data.density)}"]
        lines += [f"theta_{c} = {to_source(data.theta.coefficient((c,)))}" for c in chart.coords]
        lines += [
            f"Z_{c} = {to_source(z)}" for c, z in zip(chart.coords, data.liouville.components)
        ]
        lines += [f"scale = {to_source(data.scale)}", f"H = {to_source(conformal.hamiltonian)}"]

    if spec.errata:
        lines += ["", "[errata]"]
        lines += [f"- {note}" for note in spec.errata]

    return "\n".join(lines) + "\n"


__all__ = ["dump_model", "load_model", "loads_model"]
