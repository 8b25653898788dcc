import numpy as np
import pytest

from codimflow.models.clouds import PointCloud
from codimflow.models.flows import AnalyticFlow
from codimflow.models.utils.enums import FlowFamily
from codimflow.numerics.levelset import (
    avoidance_check,
    comparison_check,
    contraction_check,
    evolve,
    extinction_estimate,
    hausdorff,
    init_distance,
    offset_grid,
    run_flow,
    stable_dt,
    step,
    zero_set,
)
from codimflow.numerics.shapes import FlowShape
from codimflow.schemas.flows import FlowConfig, GridSpec
from codimflow.schemas.reports import DiagnosticRow
from core.errors import DomainError



# Initialization tests

def test_init_distance_circle(circle_shape, grid2d):
    u = init_distance(circle_shape, grid2d)
    radius = np.linalg.norm(u.coordinates, axis=-1)
    assert u.cap == pytest.approx(0.5)
    assert np.allclose(u.data, np.minimum(np.abs(radius - 1), u.cap))
    assert not u.data.flags.writeable


def test_init_distance_from_cloud(grid2d):
    cloud = PointCloud(n=2, k=0, points=[[0.0, 0.0]])
    u = init_distance(cloud, grid2d, cap=0.5)
    assert u.data.min() == 0.0
    assert u.data.max() == pytest.approx(0.5)


def test_init_distance_shape_outside_grid(grid2d):
    big = AnalyticFlow(family=FlowFamily.SPHERE, n=2, k=1, radius=2.0)
    with pytest.raises(DomainError):
        init_distance(FlowShape(n=2, k=1, flows=[big]), grid2d)


def test_init_distance_cap_above_margin(circle_shape, grid2d):
    with pytest.raises(DomainError):
        init_distance(circle_shape, grid2d, cap=0.8)


def test_init_distance_dimension_mismatch(circle_shape):
    grid = GridSpec.box([-1.5] * 3, [1.5] * 3, 0.25)
    with pytest.raises(DomainError):
        init_distance(circle_shape, grid)



# Step tests

def test_stable_dt_of_a_line(x_axis, line_grid):
    u = init_distance(x_axis, line_grid)
    assert stable_dt(u) == pytest.approx(line_grid.h ** 2 / 10)


def test_line_is_stationary(x_axis, line_grid):
    u = init_distance(x_axis, line_grid)
    moved = step(u, 1, stable_dt(u), eps_grad=u.h)
    off_line = np.abs(u.coordinates[..., 1]) >= u.h
    assert moved.time == pytest.approx(stable_dt(u))
    assert np.array_equal(moved.data[off_line], u.data[off_line])
    assert np.abs(moved.data - u.data).max() < u.h ** 2


def test_plane_is_stationary_in_space():
    plane = FlowShape(n=3, k=2, flows=[AnalyticFlow(family=FlowFamily.PLANE, n=3, k=2)])
    u = init_distance(plane, GridSpec.box([-1.0] * 3, [1.0] * 3, 1 / 8))
    moved = step(u, 2, stable_dt(u), eps_grad=u.h)
    off_plane = np.abs(u.coordinates[..., 2]) >= u.h
    assert np.array_equal(moved.data[off_plane], u.data[off_plane])
    assert np.abs(moved.data - u.data).max() < u.h ** 2


def test_line_is_stationary_in_space():
    line = FlowShape(n=3, k=1, flows=[AnalyticFlow(family=FlowFamily.PLANE, n=3, k=1)])
    u = init_distance(line, GridSpec.box([-1.0] * 3, [1.0] * 3, 1 / 8))
    moved = step(u, 1, stable_dt(u), eps_grad=u.h)
    radius = np.linalg.norm(u.coordinates[..., 1:], axis=-1)
    inside = (radius >= u.h) & (radius <= u.cap - 2 * u.h)
    assert np.abs(moved.data[inside] - u.data[inside]).max() <= 1e-12
    assert np.abs(moved.data - u.data).max() < u.h


def test_step_needs_gradient_floor(x_axis, line_grid):
    u = init_distance(x_axis, line_grid)
    with pytest.raises(DomainError):
        step(u, 1, 1e-4, eps_grad=0.0)


def test_step_keeps_values_in_range(circle_shape, grid2d):
    u = init_distance(circle_shape, grid2d)
    for _ in range(5):
        u = step(u, 1, stable_dt(u), eps_grad=u.h)
    assert u.data.min() >= 0.0
    assert u.data.max() <= u.cap


def test_evolve_lands_on_requested_times(circle_shape, grid2d):
    u = init_distance(circle_shape, grid2d)
    grids = evolve(u, 1, [0.0, 0.005, 0.01])
    assert [grid.time for grid in grids] == [0.0, 0.005, 0.01]



# Measurement tests

def test_zero_set_of_circle(circle_shape, grid2d, unit_circle):
    u = init_distance(circle_shape, grid2d)
    band = zero_set(u)
    angle = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
    circle = PointCloud(n=2, k=1, points=np.stack([np.cos(angle), np.sin(angle)], axis=-1))
    assert band.k == 1
    assert hausdorff(band, circle) <= 1.5 * grid2d.h + 1e-3


def test_hausdorff_of_empty_cloud():
    empty = PointCloud(n=2, k=0, points=np.zeros((0, 2)))
    other = PointCloud(n=2, k=0, points=[[0.0, 0.0]])
    with pytest.raises(DomainError):
        hausdorff(empty, other)


def test_hausdorff_is_symmetric():
    a = PointCloud(n=2, k=0, points=[[0.0, 0.0], [1.0, 0.0]])
    b = PointCloud(n=2, k=0, points=[[0.0, 0.0]])
    assert hausdorff(a, b) == hausdorff(b, a) == pytest.approx(1.0)



# Flow tests

def _circle_config(**fields) -> FlowConfig:
    document = {
        "n": 2, "k": 1,
        "grid": {"lower": [-1.5, -1.5], "upper": [1.5, 1.5], "h": 1 / 16},
        "shape": {"kind": "sphere", "radius": 1.0},
        "t_end": 0.3,
    }
    document.update(fields)
    return FlowConfig.model_validate(document)


def test_shrinking_circle_radius():
    record = run_flow(_circle_config())
    expected = np.sqrt(1 - 2 * 0.3)
    measured = record.diagnostics[-1].measured_radius
    assert record.final.time == pytest.approx(0.3)
    assert measured == pytest.approx(expected, abs=0.06)
    assert record.diagnostics[-1].components == 1
    assert record.boundary_ok is True


def test_radius_error_shrinks_under_refinement():
    errors = []
    for h in (1 / 8, 1 / 32):
        record = run_flow(_circle_config(grid={"lower": [-1.5, -1.5], "upper": [1.5, 1.5], "h": h},
                                         t_end=0.1))
        errors.append(abs(record.diagnostics[-1].measured_radius - np.sqrt(1 - 2 * 0.1)))
    assert errors[1] < errors[0]
    assert errors[1] < 1 / 32


def test_codimension_two_circle_radius():
    h = 1 / 16
    cfg = FlowConfig.model_validate({
        "n": 3, "k": 1,
        "grid": {"lower": [-1.25, -1.25, -0.5], "upper": [1.25, 1.25, 0.5], "h": h},
        "shape": {"kind": "sphere", "radius": 1.0},
        "t_end": 0.2, "snapshots": [0.1],
    })
    record = run_flow(cfg)
    series = record.radius_series()
    assert [grid.time for grid in record.snapshots] == [0.0, 0.1, 0.2]
    assert series[-1][0] == pytest.approx(0.2)
    for t, radius in series:
        assert radius == pytest.approx(np.sqrt(1 - 2 * t), abs=2 * h)
    assert record.diagnostics[-1].components == 1
    assert record.boundary_ok is True


def test_run_flow_is_deterministic():
    cfg = _circle_config(t_end=0.02, snapshots=[0.01])
    first, second = run_flow(cfg), run_flow(cfg)
    assert [grid.time for grid in first.snapshots] == [0.0, 0.01, 0.02]
    assert np.array_equal(first.final.data, second.final.data)
    assert [row.t for row in first.diagnostics] == [row.t for row in second.diagnostics]


def _unit_sphere_config(n:int, k:int, h:float, t_end:float) -> FlowConfig:
    return FlowConfig.model_validate({
        "n": n, "k": k,
        "grid": {"lower": [-1.25] * n, "upper": [1.25] * n, "h": h},
        "shape": {"kind": "sphere", "radius": 1.0},
        "t_end": t_end, "stop_at_extinction": True,
    })


def test_unit_circle_extinction():
    h = 1 / 32
    record = run_flow(_unit_sphere_config(2, 1, h, 0.6))
    assert record.extinction_time is not None
    # The band empties once min u passes 1.5h, at about (1 + 1.5h)² / 2.
    assert 0.5 < record.extinction_time < 0.5 + 2 * h + 0.01
    assert record.extinction_estimate == pytest.approx(0.5, abs=0.025)
    assert record.final.time < 0.6
    assert record.diagnostics[-1].zero_count == 0


def test_unit_circle_survives_before_extinction():
    record = run_flow(_unit_sphere_config(2, 1, 1 / 32, 0.45))
    assert record.extinction_time is None
    assert record.extinction_estimate is None
    assert record.diagnostics[-1].zero_count > 0


def test_two_sphere_extinction():
    record = run_flow(_unit_sphere_config(3, 2, 1 / 16, 0.35))
    assert record.extinction_time is not None
    assert record.extinction_time > 0.25
    assert record.extinction_estimate == pytest.approx(0.25, abs=0.0125)


def test_extinction_estimate_extrapolates_the_rise():
    h, band = 1 / 32, 1.5 / 32
    rows = []
    for t in np.arange(0.0, 0.56, 0.001):
        rise = np.sqrt(2 * t) - 1
        min_u = rise if rise > 0.3 * h else 0.3 * h
        rows.append(DiagnosticRow(t=float(t), min_u=float(min_u), zero_count=int(min_u < band),
                                  components=int(min_u < band), dt=0.001, wall_ms=0.0))
    assert extinction_estimate(rows, band) == pytest.approx(0.5, abs=2e-3)
    assert extinction_estimate(rows[:400], band) is None


def test_redistance_diagnostic():
    record = run_flow(_circle_config(t_end=0.01, redistance_diagnostic=True))
    assert 0.0 < record.gradient_deviation[0.0] < 1.0
    assert record.gradient_deviation[0.01] < 1.0



# Check tests

def test_avoidance_outside_circle(circle_shape, grid2d):
    report = avoidance_check(circle_shape, np.array([0.6, 0.0]), 1, 0.05, grid2d)
    assert report.passed
    assert report.metrics["R"] == pytest.approx(0.4)
    assert report.metrics["lhs"] >= report.metrics["rhs"]


def test_avoidance_near_codimension_two_circle():
    circle = AnalyticFlow(family=FlowFamily.SPHERE, n=3, k=1, radius=1.0)
    shape = FlowShape(n=3, k=1, flows=[circle])
    grid = GridSpec.box([-1.5, -1.5, -0.75], [1.5, 1.5, 0.75], 1 / 16)
    report = avoidance_check(shape, np.array([1.0, 0.0, 0.3]), 1, 0.02, grid)
    assert report.passed
    assert report.metrics["R"] == pytest.approx(0.3)
    assert report.metrics["lhs"] >= report.metrics["rhs"]


def test_avoidance_needs_positive_bound(circle_shape, grid2d):
    with pytest.raises(DomainError):
        avoidance_check(circle_shape, np.array([0.9, 0.0]), 1, 0.05, grid2d)


def test_avoidance_needs_room(circle_shape, grid2d):
    with pytest.raises(DomainError):
        avoidance_check(circle_shape, np.array([0.0, 1.4]), 1, 0.01, grid2d)


def test_comparison_of_offset_grids(circle_shape, grid2d):
    u0 = init_distance(circle_shape, grid2d)
    report = comparison_check(u0, offset_grid(u0, 0.05), 1, 0.01)
    assert report.passed


def test_comparison_needs_ordered_data(circle_shape, grid2d):
    u0 = init_distance(circle_shape, grid2d)
    with pytest.raises(DomainError):
        comparison_check(offset_grid(u0, 0.05), u0, 1, 0.01)


def test_contraction_of_offset_grids(circle_shape, grid2d):
    u0 = init_distance(circle_shape, grid2d)
    report = contraction_check(u0, offset_grid(u0, 0.05), 1, 0.01)
    assert report.passed
    assert report.metrics["initial"] == pytest.approx(0.05)
    assert report.series[0]["t"] == 0.0
