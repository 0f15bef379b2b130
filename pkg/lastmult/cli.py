"""Command-line front end: ``lastmult list|verify|integrate|reconstruct``."""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, NoReturn, Optional, Sequence, TextIO, Tuple

import numpy as np

from . import __version__
from .core.errors import (
    DomainError,
    ExprError,
    FormError,
    IntegrationError,
    ModelFormatError,
    UnknownModelError,
)
from .core.expr import Expr, evaluate
from .core.forms import VectorField
from .core.logger import configure_logging, get_logger
from .dynamics import (
    EVOLUTION_ATOL,
    EVOLUTION_RTOL,
    RK45_ATOL,
    RK45_RTOL,
    Trajectory,
    conformal_factor_series,
    evolution_series,
    first_integral_series,
    integrate,
    integrate_variational,
)
from .models import ModelSpec, get_model, list_models, load_model
from .structures.jlm import reconstruct_hamiltonian_2d
from .utils.formatting import ReportFormatter
from .utils.validation import (
    DEFAULT_LOG_LEVEL,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_STEP,
    DEFAULT_TOLERANCE,
    ConfigValidator,
)
from .verify import verify_model


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

RECONSTRUCTION_AGREEMENT = 1e-6

logger = get_logger(__name__)

_validator = ConfigValidator()
_formatter = ReportFormatter()

# errors caused by bad input: unknown model, malformed file, bad flag value
INPUT_ERRORS = (
    UnknownModelError,
    ModelFormatError,
    ExprError,
    FormError,
    OSError,
    ValueError,
)


class UsageError(Exception):
    """Raised by the parser instead of exiting, so ``main`` owns exit codes."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", help="name of a built-in model")
    source.add_argument("--file", type=Path, help="path to a model file")
    parser.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="K=V",
        help="override a model parameter (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lastmult",
        description="Verify and simulate Jacobi last multiplier structures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=DEFAULT_LOG_LEVEL,
        help=f"log level for stderr diagnostics (default {DEFAULT_LOG_LEVEL})",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    commands.add_parser("list", help="list built-in models")

    verify = commands.add_parser("verify", help="run every applicable residual check")
    _add_model_arguments(verify)
    verify.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    verify.add_argument("--out", type=Path, help="report path (default stdout)")

    run = commands.add_parser("integrate", help="integrate a model and write a CSV trajectory")
    _add_model_arguments(run)
    run.add_argument("--init", required=True, help="initial state as a comma list")
    run.add_argument("--t0", type=float, default=0.0)
    run.add_argument("--t1", type=float, default=1.0)
    run.add_argument("--dt", type=float, default=DEFAULT_STEP)
    run.add_argument("--method", default="rk45", help="rk4 or rk45 (default rk45)")
    run.add_argument(
        "--monitor",
        action="append",
        default=[],
        help="drift, evolution, conformal or logdet (repeatable)",
    )
    run.add_argument(
        "--frame",
        default="source",
        help="integrate in source coordinates or in the canonical/standard ones",
    )
    run.add_argument("--out", type=Path, help="CSV path (default stdout)")

    rebuild = commands.add_parser(
        "reconstruct", help="rebuild a planar Hamiltonian difference by line integration"
    )
    _add_model_arguments(rebuild)
    rebuild.add_argument("--base", required=True, help="x,y or x,y,t (time defaults to 0)")
    rebuild.add_argument("--target", required=True, help="x,y")

    return parser


def _load(args: argparse.Namespace) -> Tuple[ModelSpec, Dict[str, float]]:
    spec = load_model(args.file) if args.file is not None else get_model(args.model)
    overrides = _validator.validate_parameters(args.param, spec.chart.params)
    return spec, spec.parameters(overrides)


def _write(text: str, path: Optional[Path], stdout: TextIO) -> None:
    if path is None:
        stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def cmd_list(args: argparse.Namespace, stdout: TextIO) -> int:
    for name in list_models():
        stdout.write(f"{name}\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, stdout: TextIO) -> int:
    spec, params = _load(args)
    report = verify_model(spec, params, args.samples, args.seed, args.tol)
    _write(_formatter.format_report(report), args.out, stdout)

    failed = [check["name"] for check in report["checks"] if not check["pass"]]
    if failed:
        logger.info("verify_exit", model=spec.name, failed=failed)
        return EXIT_FAILED
    return EXIT_OK


def _frame(spec: ModelSpec, frame: str) -> Tuple[VectorField, Tuple[Expr, ...]]:
    """Field to integrate and the Hamiltonians it carries, in the chosen frame."""
    if frame == "source":
        return spec.dynamics, spec.hamiltonians
    if spec.canonical is None:
        raise ValueError(f"Model '{spec.name}' has no canonical or standard coordinates")
    block = spec.canonical
    if not block.hamiltonians:
        raise ValueError(f"Model '{spec.name}' has no Hamiltonian in its target frame")
    return block.target_field(), block.hamiltonians


def _hamiltonian_labels(count: int) -> List[str]:
    return ["H"] if count == 1 else [f"H{i + 1}" for i in range(count)]


def _with_monitors(
    traj: Trajectory,
    spec: ModelSpec,
    frame: str,
    monitors: Sequence[str],
    hamiltonians: Sequence[Expr],
) -> Trajectory:
    labels = _hamiltonian_labels(len(hamiltonians))
    for monitor in monitors:
        if monitor in ("drift", "evolution") and not hamiltonians:
            raise ValueError(f"Monitor '{monitor}' needs a Hamiltonian; '{spec.name}' has none")
        if monitor == "drift":
            for label, H in zip(labels, hamiltonians):
                series = first_integral_series(traj, H)
                traj = traj.with_monitor(f"drift_{label}", series - series[0])
        elif monitor == "evolution":
            for label, H in zip(labels, hamiltonians):
                traj = traj.with_monitor(f"evolution_{label}", evolution_series(traj, H))
        elif monitor == "conformal":
            if spec.conformal is None or frame != "source":
                raise ValueError(
                    "Monitor 'conformal' needs a conformal block in the source frame"
                )
            block = spec.conformal
            traj = traj.with_monitor(
                "conformal",
                conformal_factor_series(traj, block.field(), block.factor, block.density),
            )
    return traj


def cmd_integrate(args: argparse.Namespace, stdout: TextIO) -> int:
    spec, params = _load(args)
    frame = _validator.validate_frame(args.frame)
    monitors = _validator.validate_monitors(args.monitor)
    method = _validator.validate_method(args.method)
    field, hamiltonians = _frame(spec, frame)
    x0 = _validator.validate_point(args.init, field.chart.coords)
    rtol, atol = (
        (EVOLUTION_RTOL, EVOLUTION_ATOL) if "evolution" in monitors else (RK45_RTOL, RK45_ATOL)
    )

    try:
        if "logdet" in monitors:
            traj, _ = integrate_variational(
                field, x0, args.t0, args.t1, args.dt, method, params, rtol, atol
            )
        else:
            traj = integrate(
                field, x0, args.t0, args.t1, args.dt, method, params, rtol, atol
            )
    except IntegrationError as e:
        sys.stderr.write(f"lastmult: integration failed: {e}\n")
        return EXIT_RUNTIME

    traj = _with_monitors(traj, spec, frame, monitors, hamiltonians)
    _write(traj.to_csv(), args.out, stdout)
    return EXIT_OK


def _base_point(raw: str, spec: ModelSpec) -> Dict[str, float]:
    chart = spec.chart
    arity = len([part for part in raw.split(",") if part.strip()])
    if chart.time is not None and arity == chart.dimension + 1:
        return _validator.validate_point(raw, (*chart.coords, chart.time))
    point = _validator.validate_point(raw, chart.coords)
    if chart.time is not None:
        point[chart.time] = 0.0
    return point


def cmd_reconstruct(args: argparse.Namespace, stdout: TextIO) -> int:
    spec, params = _load(args)
    if spec.dimension != 2:
        raise ValueError("Hamiltonian reconstruction supports planar models only")

    base = {**params, **_base_point(args.base, spec)}
    target = {**base, **_validator.validate_point(args.target, spec.chart.coords)}

    try:
        value = reconstruct_hamiltonian_2d(spec.multiplier_data(), base, target)
    except ArithmeticError as e:
        sys.stderr.write(f"lastmult: {e}\n")
        return EXIT_RUNTIME

    stdout.write(f"reconstructed = {_formatter.format_number(value)}\n")
    if not spec.has_hamiltonian:
        return EXIT_OK

    H = spec.hamiltonian
    try:
        expected = evaluate(H, target) - evaluate(H, base)
    except DomainError as e:
        sys.stderr.write(f"lastmult: registry Hamiltonian: {e}\n")
        return EXIT_RUNTIME
    difference = value - expected
    stdout.write(f"registry = {_formatter.format_number(expected)}\n")
    stdout.write(f"difference = {_formatter.format_number(difference)}\n")
    if not np.isfinite(difference) or abs(difference) > RECONSTRUCTION_AGREEMENT:
        logger.info("reconstruct_exit", model=spec.name, difference=difference)
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    "list": cmd_list,
    "verify": cmd_verify,
    "integrate": cmd_integrate,
    "reconstruct": cmd_reconstruct,
}


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    out = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level)
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        sys.stderr.write(f"lastmult: usage error: {e}\n")
    except INPUT_ERRORS as e:
        sys.stderr.write(f"lastmult: {e}\n")
    return EXIT_USAGE


__all__ = ["build_parser", "main"]
