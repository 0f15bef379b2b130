"""Tests for verification suites, the check runner and reports."""

import threading
from typing import Dict, Iterator, List

import numpy as np
import pytest

from lastmult.core.errors import DomainError
from lastmult.core.registry import active_runner_count
from lastmult.core.stats import ResidualStats, sample_points
from lastmult.models import get_model, list_models, loads_model
from lastmult.verify import (
    CheckResult,
    CheckRunner,
    ResidualCheck,
    SharedResiduals,
    build_checks,
    build_report,
    verify_model,
)


def passing(value: float = 0.0) -> ResidualStats:
    return ResidualStats(4, value, value / 2, {"x": 1.0})


class TestCheckRunner:
    """Test concurrent execution of residual checks."""

    @pytest.fixture
    def runner(self) -> Iterator[CheckRunner]:
        """A small runner, shut down after the test."""
        runner = CheckRunner(max_workers=2)
        yield runner
        runner.shutdown()

    def test_results_are_sorted_by_name(self, runner: CheckRunner) -> None:
        """Test that completion order does not leak into the results."""
        checks = [
            ResidualCheck(name, f"{name} = 0", lambda: passing())
            for name in ("nambu.volume", "jlm.multiplier", "conformal.exact")
        ]

        results = runner.run(checks)

        assert [r.name for r in results] == ["conformal.exact", "jlm.multiplier", "nambu.volume"]
        assert all(r.passed for r in results)

    def test_duplicate_names(self, runner: CheckRunner) -> None:
        """Test that two checks may not share a name."""
        checks = [ResidualCheck("a", "", lambda: passing()) for _ in range(2)]

        with pytest.raises(ValueError, match="Duplicate"):
            runner.run(checks)

    def test_erroring_check_fails_alone(self, runner: CheckRunner) -> None:
        """Test that a domain error becomes a failed result for that check only."""

        def broken() -> ResidualStats:
            raise DomainError("ln", "argument must be positive")

        results = runner.run(
            [ResidualCheck("bad", "ln(x)", broken), ResidualCheck("good", "0 = 0", passing)]
        )
        bad, good = results

        assert not bad.passed
        assert bad.error is not None and "ln" in bad.error
        assert bad.stats.max == float("inf")
        assert good.passed

    def test_unexpected_exception_fails_alone(self, runner: CheckRunner) -> None:
        """Test that any exception inside a check is recorded with its type."""

        def singular() -> ResidualStats:
            raise np.linalg.LinAlgError("Singular matrix")

        bad, good = runner.run(
            [ResidualCheck("reeb", "chi(xi) = eta", singular), ResidualCheck("zero", "", passing)]
        )

        assert not bad.passed
        assert bad.error == "LinAlgError: Singular matrix"
        assert bad.to_record()["samples"] == 0
        assert good.passed

    def test_failed_tolerance(self, runner: CheckRunner) -> None:
        """Test that a large residual fails."""
        (result,) = runner.run([ResidualCheck("loose", "", lambda: passing(1e-3))])

        assert not result.passed
        assert result.to_record()["pass"] is False

    def test_run_after_shutdown(self) -> None:
        """Test that a shut down runner refuses work."""
        runner = CheckRunner()
        runner.shutdown()
        runner.shutdown()

        with pytest.raises(RuntimeError):
            runner.run([ResidualCheck("a", "", passing)])

    def test_context_manager(self) -> None:
        """Test that leaving the block shuts the runner down."""
        with CheckRunner() as runner:
            assert runner.run([ResidualCheck("a", "", passing)])[0].passed

        with pytest.raises(RuntimeError):
            runner.run([ResidualCheck("a", "", passing)])

    def test_invalid_worker_count(self) -> None:
        """Test that at least one worker is required."""
        with pytest.raises(ValueError):
            CheckRunner(max_workers=0)

    def test_runners_are_registered(self) -> None:
        """Test that new runners join the shutdown registry."""
        runner = CheckRunner()

        assert active_runner_count() >= 1
        runner.shutdown()


class TestSharedResiduals:
    """Test once-only computation of grouped residuals."""

    def test_computes_once(self) -> None:
        """Test that concurrent readers share one computation."""
        calls: List[int] = []
        lock = threading.Lock()

        def compute() -> Dict[str, ResidualStats]:
            with lock:
                calls.append(1)
            return {"a": passing(), "b": passing(1.0)}

        shared = SharedResiduals(compute)
        checks = [shared.check("group.a", "", "a"), shared.check("group.b", "", "b")]

        with CheckRunner(max_workers=2) as runner:
            results = runner.run(checks)

        assert len(calls) == 1
        assert [r.passed for r in results] == [True, False]


class TestSuites:
    """Test which checks apply to which model."""

    def test_host_parasite_checks(self) -> None:
        """Test the planar check set with canonical and conformal blocks."""
        spec = get_model("host_parasite")
        pts = sample_points(spec.chart, 8, 1, spec.parameters())
        names = {check.name for check in build_checks(spec, pts)}

        assert names == {
            "jlm.multiplier",
            "jlm.exactness",
            "jlm.hamiltonian",
            "symplectic.hamilton",
            "symplectic.preservation",
            "transform.pullback",
            "transform.identity",
            "transform.flow",
            "cosymplectic.reeb_eta",
            "cosymplectic.reeb_omega",
            "cosymplectic.evolution_eta",
            "cosymplectic.evolution_omega",
            "cosymplectic.gradient_eta",
            "cosymplectic.gradient_omega",
            "conformal.dynamics",
            "conformal.exact",
            "conformal.liouville",
            "conformal.contraction",
            "conformal.scaling",
            "conformal.decomposition",
            "conformal.divergence",
        }

    def test_lu_checks(self) -> None:
        """Test the three-dimensional check set."""
        spec = get_model("lu")
        pts = sample_points(spec.chart, 8, 1, spec.parameters())
        checks = build_checks(spec, pts)
        names = [check.name for check in checks]

        assert names == sorted(names)
        assert {
            "jlm.multiplier",
            "jlm.matching",
            "nambu.form",
            "nambu.conservation",
            "nambu.volume",
            "nambu.jacobi",
            "nambu.fundamental",
            "nambu.derivation",
            "standard.evolution_eta",
            "standard.mu_H",
            "conformal.contraction",
            "conformal.divergence",
        } <= set(names)
        assert "jlm.exactness" not in names
        assert not any(name.startswith("symplectic.") for name in names)

    def test_model_without_hamiltonian(self, model_file_text: str) -> None:
        """Test that only the multiplier checks apply without H."""
        text = model_file_text.replace("H = exp(2*k*t)*(x^2 + y^2)/2\n", "")
        spec = loads_model(text)
        pts = sample_points(spec.chart, 8, 1, spec.parameters())

        assert [c.name for c in build_checks(spec, pts)] == ["jlm.exactness", "jlm.multiplier"]


class TestVerifyModel:
    """Test end-to-end verification reports."""

    @pytest.mark.parametrize("name", list_models())
    def test_catalog_models_pass(self, name: str) -> None:
        """Test that every built-in model satisfies its published identities."""
        report = verify_model(get_model(name), samples=64)
        failed = [check["name"] for check in report["checks"] if not check["pass"]]

        assert failed == []
        assert report["pass"] is True

    def test_fixture_model_passes(self, model_file_text: str) -> None:
        """Test the damped rotation with its time-dependent multiplier."""
        report = verify_model(loads_model(model_file_text), samples=64)
        assert report["pass"] is True

    def test_wrong_multiplier_fails(self, model_file_text: str) -> None:
        """Test that exp(k t) is rejected as a multiplier."""
        text = model_file_text.replace("multiplier = exp(2*k*t)", "multiplier = exp(k*t)")
        report = verify_model(loads_model(text), samples=64)
        failed = {check["name"] for check in report["checks"] if not check["pass"]}

        assert "jlm.multiplier" in failed
        assert report["pass"] is False

    def test_reports_are_deterministic(self) -> None:
        """Test that the same seed gives the same report."""
        spec = get_model("host_parasite")
        first = verify_model(spec, samples=32, seed=5)
        second = verify_model(spec, samples=32, seed=5)

        assert first == second
        assert first["seed"] == 5
        assert first["params"] == {"a": 1.0, "b": 1.0, "c": 1.0, "delta": 1.0}

    def test_parameter_overrides(self) -> None:
        """Test that overrides are reported and still verify."""
        report = verify_model(get_model("lu"), {"alpha": 10.0}, samples=32)

        assert report["params"]["alpha"] == 10.0
        assert report["pass"] is True

    def test_invalid_arguments(self) -> None:
        """Test sample count, seed and tolerance validation."""
        spec = get_model("harmonic")
        with pytest.raises(ValueError):
            verify_model(spec, samples=0)
        with pytest.raises(ValueError):
            verify_model(spec, seed=-1)
        with pytest.raises(ValueError):
            verify_model(spec, tolerance=0.0)

    def test_build_report(self) -> None:
        """Test report layout and the overall verdict."""
        good = CheckResult("b", "b = 0", passing())
        bad = CheckResult.failed("a", "a = 0", "boom", 1e-9)
        report = build_report("m", {"z": 1.0, "a": 2.0}, 7, [good, bad])

        assert list(report["params"]) == ["a", "z"]
        assert [check["name"] for check in report["checks"]] == ["a", "b"]
        assert report["checks"][0]["samples"] == 0
        assert report["pass"] is False
