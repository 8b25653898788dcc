import numpy as np
import pytest

from codimflow.models.grids import GraphField
from codimflow.models.records import GraphHistory
from codimflow.models.utils.enums import FlowFamily
from codimflow.numerics.graphflow import (
    epsilon_ladder,
    extension_law_check,
    graph_flow,
    graph_step,
    holder_seminorm_report,
    interpolation_check,
    inverse_metric,
    linearization_check,
    max_graph_dt,
    nonlinearity_measure,
    second_fundamental_form,
    small_data_estimate_experiment,
    small_data_initial,
)
from core.errors import DomainError



def _graph(profile, lower:float=-0.5, h:float=0.01, k:int=1) -> GraphField:
    """Sample a profile on [lower, -lower]^k; the profile returns (..., m)."""

    count = int(round(-2 * lower / h)) + 1
    axis = lower + h * np.arange(count)
    X = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1)
    values = profile(X)
    return GraphField(k=k, m=values.shape[-1], origin=np.full(k, lower),
                      shape=values.shape[:-1], h=h, values=values)



def _arc(X, radius:float=2.0):
    return (np.sqrt(radius ** 2 - (X ** 2).sum(axis=-1)) - radius)[..., None]



# Metric tests

def test_inverse_metric_of_flat_graph():
    assert np.allclose(inverse_metric(np.zeros((1, 1))).entries, [[1.0]])
    assert np.allclose(inverse_metric(np.zeros((2, 3))).entries, np.eye(2))


def test_inverse_metric_of_unit_slope():
    assert inverse_metric(np.array([[1.0]])).entries[0, 0] == pytest.approx(0.5)


def test_inverse_metric_of_a_stack(rng):
    du = rng.standard_normal((5, 2, 2))
    metric = np.eye(2) + du @ np.swapaxes(du, -1, -2)
    assert np.allclose(inverse_metric(du) @ metric, np.eye(2))


def test_inverse_metric_needs_a_block():
    with pytest.raises(DomainError):
        inverse_metric(np.zeros(3))



# Step tests

def test_graph_step_limit():
    u = _graph(_arc)
    assert max_graph_dt(u) == pytest.approx(0.01 ** 2 / 4)
    with pytest.raises(DomainError):
        graph_step(u, 1e-4)


def test_graph_step_keeps_boundary():
    u = _graph(_arc)
    moved = graph_step(u, max_graph_dt(u))
    assert moved.values[0, 0] == u.values[0, 0]
    assert moved.values[-1, 0] == u.values[-1, 0]
    assert moved.values[50, 0] < u.values[50, 0]


def test_graph_flow_snapshots():
    u = _graph(_arc)
    history = graph_flow(u, 0.001, snapshots=[0.0005])
    assert [field.time for field in history.snapshots] == pytest.approx([0.0, 0.0005, 0.001])
    assert history.steps == len(history.gradient_norms) - 1



# Second fundamental form tests

def test_curvature_of_circle_arc():
    sample = second_fundamental_form(_graph(_arc), [0.0])
    assert sample.norm == pytest.approx(0.5, rel=1e-3)


def test_curvature_of_affine_graph():
    u = _graph(lambda X: (0.3 * X[..., 0] + 0.1)[..., None])
    assert second_fundamental_form(u, [0.1]).norm == pytest.approx(0.0, abs=1e-10)


def test_curvature_of_tilted_arc_in_codimension_two():
    u = _graph(lambda X: _arc(X) * np.array([0.6, 0.8]))
    assert second_fundamental_form(u, [0.0]).norm == pytest.approx(0.5, rel=1e-3)


def test_curvature_of_sphere_cap():
    u = _graph(_arc, h=0.02, k=2)
    sample = second_fundamental_form(u, [0.0, 0.0])
    assert sample.norm == pytest.approx(np.sqrt(2) / 2, rel=1e-3)
    assert sample.form.shape == (2, 2, 3)


def test_curvature_near_boundary():
    with pytest.raises(DomainError):
        second_fundamental_form(_graph(_arc), [-0.49])



# Interpolation tests

def test_interpolation_bound():
    report = interpolation_check(1.0, 0.01)
    assert report.passed
    assert report.metrics["circle_bound"] == pytest.approx(0.14249, abs=1e-5)
    assert report.metrics["max_slope"] <= np.sqrt(0.03)
    assert report.metrics["extremal_slope"] == pytest.approx(report.metrics["circle_bound"], rel=0.02)


def test_interpolation_guard():
    with pytest.raises(DomainError):
        interpolation_check(1.0, 0.05)
    with pytest.raises(DomainError):
        interpolation_check(0.0, 0.01)



# Small data tests

def test_small_data_initial_bounds(rng):
    u0 = small_data_initial(0.02, 0.05, rng)
    du = np.gradient(u0.values[:, 0], u0.h)
    assert np.abs(du).max() <= 0.02 * 1.05
    assert np.abs(u0.values).max() <= 0.02 * np.sqrt(0.05) + 1e-15
    assert u0.values[0, 0] == pytest.approx(0.0, abs=1e-15)


def test_small_data_estimate():
    report = small_data_estimate_experiment(0.02, 0.05, trials=20)
    assert report.passed
    assert report.metrics["aborted"] == 0
    assert len(report.series) == 20
    assert report.metrics["max_ratio"] <= 2.0


def test_small_data_outside_range():
    with pytest.raises(DomainError):
        small_data_estimate_experiment(0.1, 0.05, trials=1)
    with pytest.raises(DomainError):
        small_data_estimate_experiment(0.02, 0.5, trials=1)



# Seminorm and nonlinearity tests

def test_holder_seminorms():
    u0 = small_data_initial(0.02, 0.05, np.random.default_rng(0))
    history = graph_flow(u0, 0.001, snapshots=[0.0005])
    seminorms = holder_seminorm_report(history)
    assert seminorms.samples > 0
    assert seminorms.pairs > 0
    assert seminorms.holder_du >= 0.0
    assert seminorms.weighted_d2u >= 0.0


def test_holder_seminorms_need_snapshots():
    u0 = small_data_initial(0.02, 0.05, np.random.default_rng(0))
    with pytest.raises(DomainError):
        holder_seminorm_report(GraphHistory(snapshots=[u0]))


def test_nonlinearity_is_cubic():
    small = small_data_initial(0.01, 0.05, np.random.default_rng(0))
    large = small_data_initial(0.02, 0.05, np.random.default_rng(0))
    ratio = nonlinearity_measure(large).sup_weighted / nonlinearity_measure(small).sup_weighted
    assert 6.0 < ratio < 10.0


def test_epsilon_ladder():
    report = epsilon_ladder()
    assert [row["eps"] for row in report.series] == [0.04, 0.02, 0.01]
    assert report.metrics["nonlinearity_sublinear"] is True
    assert report.metrics["seminorms_monotone"] is True
    assert report.metrics["holder_sublinear"] is True
    assert report.metrics["ratio_nonincreasing"] is True
    assert report.passed
    holder = [row["n_holder_over_eps"] for row in report.series]
    assert holder[0] > holder[1] > holder[2]



# Linearization and extension tests

def test_linearization():
    assert linearization_check().passed
    assert linearization_check(m=2).passed


def test_extension_law_of_plane():
    report = extension_law_check(FlowFamily.PLANE)
    assert report.passed
    assert report.metrics["alpha"] == 0.0


def test_extension_law_needs_a_sphere():
    with pytest.raises(DomainError):
        extension_law_check(FlowFamily.CYLINDER, k=2, n=3)


def test_extension_law_of_circle():
    report = extension_law_check(FlowFamily.SPHERE, k=1)
    assert report.passed
    assert report.metrics["C_error"] <= 0.05
    assert report.metrics["alpha"] == pytest.approx(1.0, abs=0.1)
    assert not any("shrunk" in note for note in report.notes)


def test_extension_law_of_two_sphere():
    report = extension_law_check(FlowFamily.SPHERE, k=2, n=3, h=1 / 16)
    assert report.passed
    assert report.metrics["fitted_C"] == pytest.approx(2.0, abs=0.05)
    assert report.metrics["alpha"] == pytest.approx(np.sqrt(2), abs=0.15)
    assert not any("shrunk" in note for note in report.notes)
