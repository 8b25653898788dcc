# Run: $ python -m pytest --disable-warnings

import numpy as np
import pytest
from typer.testing import CliRunner

from codimflow.models.clouds import PointCloud
from codimflow.models.flows import AnalyticFlow
from codimflow.models.utils.enums import FlowFamily
from codimflow.numerics.reifenberg import koch_like_curve
from codimflow.numerics.shapes import FlowShape, SegmentShape
from codimflow.schemas.flows import GridSpec
from codimflow.schemas.reports import Provenance
from core.config import app



@pytest.fixture(name="rng")
def rng_fixture():
    """Return a freshly seeded generator, so every test draws the same numbers."""

    return np.random.default_rng(20240601)



# Grids

@pytest.fixture(name="grid2d", scope="session")
def grid2d_fixture():
    """Return the box [-1.5, 1.5]² with spacing 1/16."""

    return GridSpec.box([-1.5, -1.5], [1.5, 1.5], 1 / 16)



@pytest.fixture(name="line_grid", scope="session")
def line_grid_fixture():
    """Return the box [-1, 1]² with spacing 1/8; the x-axis runs through nodes."""

    return GridSpec.box([-1.0, -1.0], [1.0, 1.0], 1 / 8)



# Shapes and clouds

@pytest.fixture(name="unit_circle", scope="session")
def unit_circle_fixture():
    return AnalyticFlow(family=FlowFamily.SPHERE, n=2, k=1, radius=1.0)



@pytest.fixture(name="circle_shape", scope="session")
def circle_shape_fixture(unit_circle):
    return FlowShape(n=2, k=1, flows=[unit_circle])



@pytest.fixture(name="x_axis", scope="session")
def x_axis_fixture():
    """Return the x-axis of R² as a static shape."""

    line = AnalyticFlow(family=FlowFamily.PLANE, n=2, k=1)
    return FlowShape(n=2, k=1, flows=[line])



@pytest.fixture(name="segment_cloud", scope="session")
def segment_cloud_fixture():
    """Return the unit segment on the x-axis sampled every 0.001."""

    shape = SegmentShape(n=2, k=1, start=np.array([0.0, 0.0]), end=np.array([1.0, 0.0]))
    return shape.sample(0.001)



@pytest.fixture(name="circle_cloud", scope="session")
def circle_cloud_fixture():
    """Return the unit circle sampled every 0.0004 (resolution below r/16 at r = 0.008)."""

    count = int(np.ceil(2 * np.pi / 0.0004))
    angle = 2 * np.pi * np.arange(count) / count
    return PointCloud(n=2, k=1, points=np.stack([np.cos(angle), np.sin(angle)], axis=-1))



@pytest.fixture(name="koch_cloud", scope="session")
def koch_cloud_fixture():
    return koch_like_curve(0.1, 5)



# Artifacts

@pytest.fixture(name="provenance", scope="session")
def provenance_fixture():
    return Provenance(version="1.0.0", config_sha256="0" * 64, seed=0)



@pytest.fixture(name="runner", scope="session")
def runner_fixture():
    """Return a command-line runner of the application."""

    return CliRunner()



@pytest.fixture(name="cli")
def cli_fixture(runner):
    """Return a function invoking the application with the given arguments."""

    def invoke(*args:str):
        return runner.invoke(app, list(args))

    return invoke



@pytest.fixture(name="out")
def out_fixture(tmp_path):
    """Return an empty output directory."""

    return tmp_path / "run"
