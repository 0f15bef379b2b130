"""Tests for trajectory integration and invariant monitors."""

import math

import numpy as np
import pytest

from lastmult.core.errors import FormError, IntegrationError
from lastmult.core.expr import Chart
from lastmult.core.forms import VectorField
from lastmult.core.parser import parse
from lastmult.core.stats import sample_points
from lastmult.dynamics import (
    EVOLUTION_ATOL,
    EVOLUTION_RTOL,
    FlowField,
    Trajectory,
    conformal_factor_check,
    conformal_factor_series,
    evolution_consistency,
    evolution_series,
    first_integral_series,
    integrate,
    integrate_variational,
    monitor_first_integral,
    time_grid,
)
from lastmult.models import ConformalBlock2D, ConformalBlock3D, get_model
from lastmult.structures.nambu3d import NambuData, nambu_field


@pytest.fixture
def oscillator(plane: Chart) -> VectorField:
    """x' = y, y' = -x."""
    return VectorField(plane, (parse("y", plane), parse("-x", plane)))


class TestTimeGrid:
    """Test the uniform output grid."""

    def test_step_never_exceeds_dt(self) -> None:
        """Test that the grid ends exactly at t1."""
        grid = time_grid(0.0, 1.0, 0.3)

        assert grid.size == 5
        assert grid[0] == 0.0
        assert grid[-1] == 1.0
        assert np.all(np.diff(grid) <= 0.3)

    def test_exact_division(self) -> None:
        """Test that an exact multiple adds no extra step."""
        assert time_grid(0.0, 1.0, 0.25).size == 5

    @pytest.mark.parametrize(
        "t0,t1,dt",
        [(1.0, 1.0, 0.1), (1.0, 0.0, 0.1), (0.0, 1.0, 0.0), (0.0, 1.0, -0.1), (0.0, math.inf, 0.1)],
    )
    def test_invalid_windows(self, t0: float, t1: float, dt: float) -> None:
        """Test that empty windows and non-positive steps are rejected."""
        with pytest.raises(ValueError):
            time_grid(t0, t1, dt)


class TestIntegrate:
    """Test RK4 and RK45 integration."""

    def test_oscillator_returns_after_one_period(self, oscillator: VectorField) -> None:
        """Test the round trip over 2 pi with RK45."""
        traj = integrate(oscillator, {"x": 1.0, "y": 0.0}, 0.0, 2 * math.pi, 1e-3)

        assert traj.final_state["x"] == pytest.approx(1.0, abs=1e-7)
        assert traj.final_state["y"] == pytest.approx(0.0, abs=1e-7)
        assert traj.times[-1] == 2 * math.pi

    def test_sequence_initial_state(self, oscillator: VectorField) -> None:
        """Test positional initial values and their arity."""
        traj = integrate(oscillator, [1.0, 0.0], 0.0, 0.5, 0.1, method="rk4")
        assert traj.initial_state == {"x": 1.0, "y": 0.0}

        with pytest.raises(ValueError):
            integrate(oscillator, [1.0], 0.0, 0.5, 0.1)
        with pytest.raises(ValueError):
            integrate(oscillator, {"x": 1.0}, 0.0, 0.5, 0.1)

    def test_unknown_method(self, oscillator: VectorField) -> None:
        """Test that only rk4 and rk45 are accepted."""
        with pytest.raises(ValueError, match="rk4"):
            integrate(oscillator, [1.0, 0.0], 0.0, 1.0, 0.1, method="euler")

    def test_invalid_solver_tolerance(self, oscillator: VectorField) -> None:
        """Test that rk45 tolerances must be positive."""
        with pytest.raises(ValueError, match="Tolerance"):
            integrate(oscillator, [1.0, 0.0], 0.0, 1.0, 0.1, rtol=0.0)

    def test_rk4_matches_rk45(self) -> None:
        """Test that both methods agree on the Lu system over a short window."""
        spec = get_model("lu")
        x0 = {"x": 1.0, "y": 1.0, "z": 1.0}
        params = spec.parameters()

        fine = integrate(spec.dynamics, x0, 0.0, 0.1, 1e-4, "rk4", params)
        adaptive = integrate(spec.dynamics, x0, 0.0, 0.1, 1e-4, "rk45", params)

        np.testing.assert_allclose(fine.states[-1], adaptive.states[-1], rtol=1e-6, atol=1e-8)

    def test_rk4_is_fourth_order(self, oscillator: VectorField) -> None:
        """Test that halving the step divides the error by about 16."""

        def error(dt: float) -> float:
            traj = integrate(oscillator, [1.0, 0.0], 0.0, 1.0, dt, method="rk4")
            exact = np.array([math.cos(1.0), -math.sin(1.0)])
            return float(np.max(np.abs(traj.states[-1] - exact)))

        ratio = error(0.1) / error(0.05)
        assert 14.0 < ratio < 18.0

    def test_singular_field_reports_time(self) -> None:
        """Test that x' = 1/(1 - t) fails at the step that reaches t = 1."""
        chart = Chart(("x",), "t")
        X = VectorField(chart, (parse("1/(1 - t)", chart),))

        with pytest.raises(IntegrationError) as exc_info:
            integrate(X, [0.0], 0.0, 2.0, 0.5, method="rk4")

        assert exc_info.value.time == 0.5
        assert "(t=" in str(exc_info.value)

    def test_missing_parameter(self) -> None:
        """Test that an unbound parameter is a usage error."""
        chart = Chart(("x",), "t", ("k",))
        X = VectorField(chart, (parse("-k*x", chart),))

        with pytest.raises(ValueError, match="'k'"):
            integrate(X, [1.0], 0.0, 1.0, 0.1)

        traj = integrate(X, [1.0], 0.0, 1.0, 0.1, params={"k": 1.0})
        assert traj.final_state["x"] == pytest.approx(math.exp(-1.0), rel=1e-8)

    def test_flow_field_jacobian(self, oscillator: VectorField) -> None:
        """Test the compiled Jacobian."""
        flow = FlowField(oscillator)
        np.testing.assert_array_equal(
            flow.jacobian(0.0, np.array([0.3, 0.4])), [[0.0, 1.0], [-1.0, 0.0]]
        )


class TestVariational:
    """Test the tangent flow and log-determinant monitor."""

    def test_lu_log_determinant(self) -> None:
        """Test log|det Phi(t)| = -19 t for the Lu system."""
        spec = get_model("lu")
        traj, jacobians = integrate_variational(
            spec.dynamics, [1.0, 1.0, 1.0], 0.0, 0.1, 1e-3, params=spec.parameters()
        )

        assert jacobians.shape == (len(traj), 3, 3)
        np.testing.assert_allclose(jacobians[0], np.eye(3))
        assert traj.monitors["logdet"][-1] == pytest.approx(-1.9, abs=1e-4)

    def test_area_preserving_oscillator(self, oscillator: VectorField) -> None:
        """Test that a divergence-free field keeps det Phi = 1."""
        traj, _ = integrate_variational(oscillator, [1.0, 0.0], 0.0, 1.0, 1e-2)
        assert np.max(np.abs(traj.monitors["logdet"])) < 1e-8


class TestMonitors:
    """Test first integral, evolution and conformal monitors."""

    def test_first_integral_drift(self, plane: Chart, oscillator: VectorField) -> None:
        """Test that the energy of the oscillator is conserved."""
        traj = integrate(oscillator, [1.0, 0.5], 0.0, 5.0, 1e-2)
        H = parse("(x^2 + y^2)/2", plane)

        stats = monitor_first_integral(traj, H, tolerance=1e-7)
        assert stats.passed
        assert first_integral_series(traj, H)[0] == pytest.approx(0.625)

    def test_drift_detects_non_integral(self, plane: Chart, oscillator: VectorField) -> None:
        """Test that x alone is not conserved."""
        traj = integrate(oscillator, [1.0, 0.5], 0.0, 1.0, 1e-2)
        assert not monitor_first_integral(traj, parse("x", plane)).passed

    def test_evolution_consistency(self) -> None:
        """Test dK/dt = K_t along the canonical host-parasite flow."""
        spec = get_model("host_parasite")
        block = spec.canonical
        assert block is not None
        (K,) = block.hamiltonians

        traj = integrate(
            block.target_field(), {"q": 0.0, "p": 1.0}, 0.0, 1.0, 1e-3, params=spec.parameters()
        )
        stats = evolution_consistency(traj, K, tolerance=1e-5)

        assert stats.passed
        assert stats.count == len(traj) - 4
        assert evolution_series(traj, K).shape == traj.times.shape

    @pytest.mark.parametrize("name", ["lu", "qi"])
    def test_standard_flow_evolution_consistency(self, name: str) -> None:
        """Test dH/dt = H_t for both Hamiltonians along the standard-coordinate flow."""
        spec = get_model(name)
        block = spec.canonical
        assert block is not None

        traj = integrate(
            block.target_field(),
            [1.0, 1.0, 1.0],
            0.0,
            0.5,
            5e-4,
            params=spec.parameters(),
            rtol=EVOLUTION_RTOL,
            atol=EVOLUTION_ATOL,
        )

        for H in block.hamiltonians:
            stats = evolution_consistency(traj, H, tolerance=1e-5)
            assert stats.passed, stats.max

    def test_reduced_host_parasite_drift(self) -> None:
        """Test that H = -a/y - b ln y - delta/x is conserved by the flow with c = 0."""
        spec = get_model("host_parasite")
        block = spec.conformal
        assert isinstance(block, ConformalBlock2D)
        params = spec.parameters({"c": 0.0})

        traj = integrate(spec.dynamics, [1.0, 2.0], 0.0, 1.0, 1e-2, params=params)

        assert monitor_first_integral(traj, block.hamiltonian, tolerance=1e-6).passed

    @pytest.mark.parametrize("name", ["lu", "qi"])
    def test_nambu_pair_drift(self, name: str) -> None:
        """Test that both members of a Nambu pair are conserved along its field."""
        spec = get_model(name)
        block = spec.conformal
        assert isinstance(block, ConformalBlock3D)
        X = nambu_field(block.pair, NambuData(spec.chart))

        traj = integrate(X, [1.0, 1.0, 1.0], 0.0, 1.0, 1e-2, params=spec.parameters())

        assert monitor_first_integral(traj, block.pair.H1, tolerance=1e-6).passed
        assert monitor_first_integral(traj, block.pair.H2, tolerance=1e-6).passed

    def test_evolution_needs_enough_points(self, plane: Chart, oscillator: VectorField) -> None:
        """Test the minimum stencil size."""
        traj = integrate(oscillator, [1.0, 0.0], 0.0, 0.2, 0.1)
        with pytest.raises(ValueError, match="at least"):
            evolution_consistency(traj, parse("x", plane))

    @pytest.mark.parametrize("name,expected", [("lu", -19.0), ("qi", -3.0)])
    def test_conformal_factor(self, name: str, expected: float) -> None:
        """Test div X = a1 + a2 + a3 for the chaotic models."""
        spec = get_model(name)
        pts = sample_points(spec.chart, 32, 3, spec.parameters())

        assert conformal_factor_check(spec.dynamics, expected, pts).passed
        assert not conformal_factor_check(spec.dynamics, expected + 1.0, pts).passed

    def test_conformal_factor_series(self, oscillator: VectorField) -> None:
        """Test the divergence residual along a trajectory."""
        traj = integrate(oscillator, [1.0, 0.0], 0.0, 1.0, 0.1)
        np.testing.assert_allclose(conformal_factor_series(traj, oscillator, 0.0), 0.0)

    def test_conformal_factor_rejects_extended_fields(self, oscillator: VectorField) -> None:
        """Test that only spatial fields have a conformal factor."""
        pts = sample_points(oscillator.chart, 4, 1)
        with pytest.raises(FormError):
            conformal_factor_check(oscillator.lift(), 0.0, pts)


class TestTrajectory:
    """Test the trajectory record and its CSV form."""

    def test_csv_layout(self, oscillator: VectorField) -> None:
        """Test the header, monitor columns and number format."""
        traj = integrate(oscillator, [1.0, 0.0], 0.0, 0.2, 0.1)
        csv = traj.with_monitor("drift_H", np.zeros(len(traj))).to_csv()
        lines = csv.splitlines()

        assert lines[0] == "t,x,y,drift_H"
        assert lines[1] == "0,1,0,0"
        assert len(lines) == len(traj) + 1
        assert csv.endswith("\n")

    def test_validation(self) -> None:
        """Test grid and shape checks."""
        with pytest.raises(ValueError):
            Trajectory(("x",), np.array([0.0, 0.0]), np.zeros((2, 1)))
        with pytest.raises(ValueError):
            Trajectory(("x", "y"), np.array([0.0, 1.0]), np.zeros((2, 1)))
        traj = Trajectory(("x",), np.array([0.0, 1.0]), np.zeros((2, 1)))
        with pytest.raises(ValueError):
            traj.with_monitor("bad", np.zeros(3))

    def test_batch_carries_time_and_parameters(self) -> None:
        """Test the sample batch built from a trajectory."""
        traj = Trajectory(("x",), np.array([0.0, 1.0]), np.ones((2, 1)), params={"k": 2.0})
        batch = traj.batch()

        assert batch.size == 2
        assert batch.values["k"] == 2.0
        np.testing.assert_array_equal(batch.values["t"], [0.0, 1.0])
