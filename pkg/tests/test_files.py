import numpy as np
import pytest
from pydantic import ValidationError

from codimflow.dependencies.context import apply_overrides, parse_value
from codimflow.models.clouds import PointCloud
from codimflow.models.grids import ScalarGrid
from codimflow.numerics.levelset import init_distance
from codimflow.schemas.experiments import GraphflowConfig, VerifyConfig
from codimflow.schemas.flows import FlowConfig, GridSpec, ShapeSpec, SliceSpec
from codimflow.schemas.reports import CheckReport
from codimflow.utils.files import CLOUD_FORMAT, parse_header, read_cloud, read_grid, write_cloud, write_grid
from codimflow.utils.raster import extract_slice, gray_levels, slice_axes, write_slice
from codimflow.utils.reports import config_hash, emit_report, write_csv
from core.errors import ConfigError



# Cloud and grid file tests

def test_cloud_file_keeps_boundary(tmp_path, segment_cloud, provenance):
    path = write_cloud(tmp_path / "segment.txt", segment_cloud, provenance)
    header = path.read_text().splitlines()[0]
    assert header.startswith(f"{CLOUD_FORMAT}; n=2; k=1; boundary=2; tool=codimflow")
    cloud = read_cloud(path)
    assert np.array_equal(cloud.points, segment_cloud.points)
    assert np.array_equal(cloud.boundary, segment_cloud.boundary)


def test_cloud_file_without_boundary(tmp_path):
    cloud = PointCloud(n=3, k=1, points=[[0.1, 0.2, 0.3], [1 / 3, 0.0, -2.5]])
    loaded = read_cloud(write_cloud(tmp_path / "cloud.txt", cloud))
    assert loaded.boundary is None
    assert np.array_equal(loaded.points, cloud.points)


def test_parse_header_rejects_other_formats():
    with pytest.raises(ConfigError):
        parse_header("codimflow-grid v1; n=2", CLOUD_FORMAT)
    with pytest.raises(ConfigError):
        parse_header(f"{CLOUD_FORMAT}; n", CLOUD_FORMAT)


def test_read_missing_cloud(tmp_path):
    with pytest.raises(ConfigError):
        read_cloud(tmp_path / "missing.txt")


def test_grid_file(tmp_path, circle_shape, grid2d, provenance):
    u = init_distance(circle_shape, grid2d)
    loaded = read_grid(write_grid(tmp_path / "u.txt", u, provenance))
    assert loaded.same_grid(u)
    assert loaded.cap == u.cap
    assert np.array_equal(loaded.data, u.data)



# Report tests

def test_write_csv_starts_with_provenance(tmp_path, provenance):
    path = write_csv(tmp_path / "rows.csv", [{"a": 1, "b": True}, {"a": 0.5, "c": None}], provenance)
    lines = path.read_text().splitlines()
    assert lines[0] == f"# provenance: {provenance.fields()}"
    assert lines[1] == "a,b,c"
    assert lines[2] == "1,true,"
    assert lines[3] == "0.5,,"


def test_emit_report(tmp_path, provenance):
    reports = [
        CheckReport(check="tube", case="circle", metrics={"max_error": 0.5}, bounds={"max_error": 1.0},
                    passed=True, series=[{"offset": 0.2}]),
        CheckReport(check="pde", case="circle", metrics={"max_residual": 2.0}, bounds={"max_residual": 1.0},
                    passed=False),
    ]
    summary = emit_report(tmp_path, reports, provenance, config={"b": 1, "a": 2})
    assert summary.checks == 2
    assert summary.failed == 1
    assert not summary.passed
    for name in ("results.csv", "tube_circle.csv", "summary.txt", "config.effective.json"):
        assert (tmp_path / name).exists()
    assert "checks: 2  passed: 1  failed: 1" in (tmp_path / "summary.txt").read_text()


def test_worst_ratio():
    report = CheckReport(check="x", metrics={"a": 0.5, "b": True, "c": -3.0},
                         bounds={"a": 1.0, "b": 1.0, "c": 2.0}, passed=False)
    assert report.worst_ratio() == pytest.approx(1.5)
    assert CheckReport(check="x", passed=True).worst_ratio() is None


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})



# Raster tests

def test_gray_levels():
    assert gray_levels(np.array([0.0, 0.25, 0.5, 1.0]), 0.5).tolist() == [0, 128, 255, 255]


def test_slice_axes_of_three_dimensional_grid():
    grid = ScalarGrid(n=3, shape=(3, 4, 5), origin=np.zeros(3), h=0.1, data=np.zeros(60), cap=1.0)
    with pytest.raises(ConfigError):
        slice_axes(grid, SliceSpec())
    with pytest.raises(ConfigError):
        slice_axes(grid, SliceSpec(axes=[1, 1]))
    assert slice_axes(grid, SliceSpec(axes=[2, 0])) == (2, 0)
    assert extract_slice(grid, SliceSpec(axes=[2, 0])).shape == (5, 3)
    assert extract_slice(grid, SliceSpec(axes=[0, 1], index=[0, 0, 4])).shape == (3, 4)



def test_write_slice(tmp_path, circle_shape, grid2d, provenance):
    u = init_distance(circle_shape, grid2d)
    paths = write_slice(tmp_path / "slice.pgm", u, SliceSpec(), provenance, png=True)
    lines = paths[0].read_text().splitlines()
    assert lines[0] == "P2"
    assert lines[1].startswith("# provenance: tool=codimflow")
    assert lines[4] == "49 49"
    assert lines[5] == "255"
    assert paths[1].suffix == ".png"



# Schema tests

def _flow_document(**fields) -> dict:
    document = {
        "n": 2, "k": 1,
        "grid": {"lower": [-1.0, -1.0], "upper": [1.0, 1.0], "h": 0.125},
        "shape": {"kind": "sphere", "radius": 0.5},
        "t_end": 0.1,
    }
    document.update(fields)
    return document


def test_grid_box():
    grid = GridSpec.box([-1.0, -0.5], [1.0, 0.5], 0.25)
    assert grid.shape == [9, 5]
    assert np.allclose(grid.upper, [1.0, 0.5])


def test_grid_box_whole_cells():
    with pytest.raises(ValidationError):
        GridSpec.box([0.0, 0.0], [1.0, 1.0], 0.3)


def test_flow_config_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        FlowConfig.model_validate(_flow_document(colour="red"))


def test_flow_config_checks_dimensions():
    with pytest.raises(ValidationError):
        FlowConfig.model_validate(_flow_document(k=2))
    with pytest.raises(ValidationError):
        FlowConfig.model_validate(_flow_document(snapshots=[0.5]))


def test_flow_config_defaults():
    cfg = FlowConfig.model_validate(_flow_document(snapshots=[0.05, 0.01]))
    assert cfg.snapshots == [0.01, 0.05]
    assert cfg.gradient_floor == 0.125
    assert cfg.band == pytest.approx(0.1875)


def test_shape_spec_needs_kind_fields():
    with pytest.raises(ValidationError):
        ShapeSpec.model_validate({"kind": "segment", "start": [0.0, 0.0]})
    with pytest.raises(ValidationError):
        ShapeSpec.model_validate({"kind": "koch", "theta": 1.0})


def test_experiment_configs():
    assert VerifyConfig.model_validate({"t_range": [0.09, 0.01]}).t_range == [0.01, 0.09]
    with pytest.raises(ValidationError):
        GraphflowConfig.model_validate({"experiment": "small_data", "eps": 0.1})



# Override tests

def test_parse_value():
    assert parse_value("0.5") == 0.5
    assert parse_value("[1, 2]") == [1, 2]
    assert parse_value("true") is True
    assert parse_value("circle") == "circle"


def test_apply_overrides():
    document = {"grid": {"h": 0.1}, "times": [0.1, 0.2]}
    apply_overrides(document, ["grid.h=0.05", "times.1=0.3", "shape.kind=sphere"])
    assert document == {"grid": {"h": 0.05}, "times": [0.1, 0.3], "shape": {"kind": "sphere"}}


def test_apply_overrides_through_scalar():
    with pytest.raises(ConfigError):
        apply_overrides({"grid": 1.0}, ["grid.h.x=0.05"])