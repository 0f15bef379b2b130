"""Tests for configuration validation and report formatting."""

import json
import math

import numpy as np
import pytest

from lastmult.utils.formatting import ReportFormatter
from lastmult.utils.validation import MAX_SAMPLES, ConfigValidator


class TestConfigValidator:
    """Test validation of command-line and API settings."""

    @pytest.fixture
    def validator(self) -> ConfigValidator:
        """Validator with the default limits."""
        return ConfigValidator()

    @pytest.mark.parametrize(
        "level,expected",
        [
            ("debug", "DEBUG"),
            (" INFO ", "INFO"),
            ("warn", "WARNING"),
            ("fatal", "CRITICAL"),
            ("CRITICAL", "CRITICAL"),
        ],
    )
    def test_valid_log_levels(self, validator: ConfigValidator, level: str, expected: str) -> None:
        """Test that aliases normalize to logging level names."""
        assert validator.validate_log_level(level) == expected

    @pytest.mark.parametrize("level", ["", "  ", "TRACE", "verbose"])
    def test_invalid_log_levels(self, validator: ConfigValidator, level: str) -> None:
        """Test that empty and unknown levels are rejected."""
        with pytest.raises(ValueError, match="Log level cannot be empty|Invalid log level"):
            validator.validate_log_level(level)

    def test_samples(self, validator: ConfigValidator) -> None:
        """Test the sample count bounds."""
        assert validator.validate_samples(1) == 1
        assert validator.validate_samples(MAX_SAMPLES) == MAX_SAMPLES

        for bad in (0, -5, MAX_SAMPLES + 1, True, 2.5):
            with pytest.raises(ValueError, match="Sample count"):
                validator.validate_samples(bad)  # type: ignore[arg-type]

    def test_custom_sample_limit(self) -> None:
        """Test a lowered maximum."""
        with pytest.raises(ValueError, match="Maximum allowed: 10"):
            ConfigValidator(max_samples=10).validate_samples(11)

    def test_seed(self, validator: ConfigValidator) -> None:
        """Test that seeds are non-negative integers."""
        assert validator.validate_seed(0) == 0
        for bad in (-1, False, 1.0):
            with pytest.raises(ValueError, match="Seed"):
                validator.validate_seed(bad)  # type: ignore[arg-type]

    def test_tolerance(self, validator: ConfigValidator) -> None:
        """Test that tolerances are finite and positive."""
        assert validator.validate_tolerance(1e-6) == 1e-6
        for bad in (0.0, -1e-9, math.inf, math.nan):
            with pytest.raises(ValueError, match="Tolerance"):
                validator.validate_tolerance(bad)

    def test_parameter_overrides(self, validator: ConfigValidator) -> None:
        """Test k=v parsing against declared names."""
        result = validator.validate_parameters(["a=2", " delta = -0.5 "], ("a", "b", "delta"))
        assert result == {"a": 2.0, "delta": -0.5}

    @pytest.mark.parametrize(
        "override,message",
        [
            ("a", "Expected k=v"),
            ("a=1=2", "Invalid number"),
            ("mass=1", "Unknown parameter 'mass'"),
            ("a=inf", "finite"),
            ("a=x", "Invalid number for parameter 'a'"),
        ],
    )
    def test_invalid_parameter_overrides(
        self, validator: ConfigValidator, override: str, message: str
    ) -> None:
        """Test malformed, unknown and non-finite overrides."""
        with pytest.raises(ValueError, match=message):
            validator.validate_parameters([override], ("a",))

    def test_no_declared_parameters(self, validator: ConfigValidator) -> None:
        """Test the message for a model without parameters."""
        with pytest.raises(ValueError, match="Declared: none"):
            validator.validate_parameters(["k=1"], ())

    def test_point(self, validator: ConfigValidator) -> None:
        """Test comma lists with the expected arity."""
        assert validator.validate_point("1, 2.5,-3", ("x", "y", "z")) == {
            "x": 1.0,
            "y": 2.5,
            "z": -3.0,
        }
        with pytest.raises(ValueError, match="Expected 2 values"):
            validator.validate_point("1,2,3", ("x", "y"))
        with pytest.raises(ValueError, match="coordinate 'y'"):
            validator.validate_point("1,nan", ("x", "y"))

    def test_time_window(self, validator: ConfigValidator) -> None:
        """Test start, end and step validation."""
        assert validator.validate_time_window(0, 1, 0.1) == (0.0, 1.0, 0.1)

        with pytest.raises(ValueError, match="End time"):
            validator.validate_time_window(1.0, 1.0, 0.1)
        with pytest.raises(ValueError, match="Step"):
            validator.validate_time_window(0.0, 1.0, 0.0)
        with pytest.raises(ValueError, match="finite"):
            validator.validate_time_window(0.0, math.inf, 0.1)

    def test_method(self, validator: ConfigValidator) -> None:
        """Test the supported integrators."""
        assert validator.validate_method(" RK4 ") == "rk4"
        with pytest.raises(ValueError, match="rk4, rk45"):
            validator.validate_method("euler")

    def test_monitors(self, validator: ConfigValidator) -> None:
        """Test monitor names, case and de-duplication."""
        assert validator.validate_monitors(None) == []
        assert validator.validate_monitors(["Drift", "logdet", "drift"]) == ["drift", "logdet"]
        with pytest.raises(ValueError, match="Invalid monitor 'energy'"):
            validator.validate_monitors(["energy"])

    def test_frame(self, validator: ConfigValidator) -> None:
        """Test the integration frames."""
        assert validator.validate_frame("Standard") == "standard"
        with pytest.raises(ValueError, match="Invalid frame"):
            validator.validate_frame("canonical")

    def test_domain(self, validator: ConfigValidator) -> None:
        """Test sampling intervals."""
        assert validator.validate_domain({"x": (0.5, 2)}) == {"x": (0.5, 2.0)}
        with pytest.raises(ValueError, match="empty"):
            validator.validate_interval("x", 2.0, 2.0)
        with pytest.raises(ValueError, match="finite"):
            validator.validate_interval("x", -math.inf, 0.0)


class TestReportFormatter:
    """Test JSON and CSV rendering."""

    @pytest.fixture
    def formatter(self) -> ReportFormatter:
        """Formatter with the default indent."""
        return ReportFormatter()

    def test_format_number(self, formatter: ReportFormatter) -> None:
        """Test 17 significant digits without trailing zeros."""
        assert formatter.format_number(0.0) == "0"
        assert formatter.format_number(1.5) == "1.5"
        assert formatter.format_number(0.1) == "0.10000000000000001"
        assert float(formatter.format_number(math.pi)) == math.pi

    def test_ensure_fields(self, formatter: ReportFormatter) -> None:
        """Test that numpy values and odd keys are cleaned for logging."""
        fields = formatter.ensure_fields(
            {
                " max ": np.float64(2.5),
                "count": np.int64(3),
                "passed": np.bool_(True),
                "point": np.array([1.0, 2.0]),
                "": "dropped",
                "worst": math.inf,
                "obj": object,
            }
        )

        assert fields["max"] == 2.5
        assert type(fields["count"]) is int
        assert fields["passed"] is True
        assert fields["point"] == [1.0, 2.0]
        assert fields["worst"] == "inf"
        assert isinstance(fields["obj"], str)
        assert "" not in fields
        assert formatter.ensure_fields(None) == {}

    def test_format_report(self, formatter: ReportFormatter) -> None:
        """Test that non-finite statistics serialize as strings."""
        text = formatter.format_report(
            {"model": "m", "checks": [{"max": math.inf, "mean": math.nan}], "pass": False}
        )
        data = json.loads(text)

        assert text.endswith("\n")
        assert data["checks"][0] == {"max": "inf", "mean": "nan"}
        assert list(data) == ["model", "checks", "pass"]

    def test_format_point(self, formatter: ReportFormatter) -> None:
        """Test sorted coordinate keys."""
        assert list(formatter.format_point({"y": 1, "t": 0, "x": 2})) == ["t", "x", "y"]

    def test_format_csv(self, formatter: ReportFormatter) -> None:
        """Test header and rows."""
        text = formatter.format_csv(("t", "x"), (np.array([0.0, 0.5]), np.array([1.0, -2.0])))
        assert text == "t,x\n0,1\n0.5,-2\n"
