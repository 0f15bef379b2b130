"""Shared test fixtures for lastmult tests."""

from typing import Dict, Iterator

import pytest

from lastmult.core.expr import Chart
from lastmult.core.logger import configure_logging
from lastmult.core.stats import SampleBatch, sample_points


@pytest.fixture(autouse=True)
def default_logging() -> Iterator[None]:
    """Tests that reconfigure logging or capture stderr leave the default behind."""
    yield
    configure_logging()


@pytest.fixture
def plane() -> Chart:
    """Planar chart (x, y) with time t and no parameters."""
    return Chart(("x", "y"), "t")


@pytest.fixture
def space() -> Chart:
    """Three-dimensional chart (x, y, z) with time t."""
    return Chart(("x", "y", "z"), "t")


@pytest.fixture
def plane_points(plane: Chart) -> SampleBatch:
    """Seeded points in the default positive box."""
    return sample_points(plane, 64, seed=7)


@pytest.fixture
def space_points(space: Chart) -> SampleBatch:
    """Seeded points in the default positive box."""
    return sample_points(space, 64, seed=11)


@pytest.fixture
def unit_point() -> Dict[str, float]:
    """The point (1, 1, 1) at t = 0."""
    return {"x": 1.0, "y": 1.0, "z": 1.0, "t": 0.0}


@pytest.fixture
def model_file_text() -> str:
    """A small planar model in the model file format."""
    return """
# damped rotation with a time-dependent multiplier
[model]
name = damped_rotation
dim = 2
vars = x, y
params = k=0.5

[dynamics]
x = y - k*x
y = -x - k*y

[structure]
multiplier = exp(2*k*t)
psi = -k*x
phi = -k*y
H = exp(2*k*t)*(x^2 + y^2)/2
"""
