import numpy as np
import pytest

from codimflow.models.flows import TubeSample
from codimflow.models.utils.enums import FlowFamily, VerifyFamily
from codimflow.numerics.shapes import SegmentShape, flow_distance
from codimflow.numerics.smoothcheck import (
    alpha_constant,
    curvature_bound_until,
    distance_pde_residual,
    distance_rate,
    family_flow,
    multiscale_uniform_estimates,
    operator_property_suite,
    random_tube_samples,
    subsolution_residual,
    tube_curvature_check,
    tube_geometry,
    tube_suite,
    uniqueness_sandwich_experiment,
)
from core.errors import DomainError



# Family tests

def test_family_flow():
    assert family_flow(VerifyFamily.CIRCLE).family == FlowFamily.SPHERE
    assert (family_flow(VerifyFamily.SPHERE).n, family_flow(VerifyFamily.SPHERE).k) == (3, 2)
    assert (family_flow(VerifyFamily.CIRCLE3D).n, family_flow(VerifyFamily.CIRCLE3D).k) == (3, 1)
    cylinder = family_flow(VerifyFamily.CYLINDER)
    assert (cylinder.n, cylinder.k, cylinder.j) == (3, 2, 1)
    assert family_flow(VerifyFamily.PLANE).extinction_time == np.inf



# Tube tests

def test_tube_samples_sit_at_their_offset(rng):
    for family in VerifyFamily:
        flow = family_flow(family)
        for sample in random_tube_samples(flow, 10, 0.0, rng):
            distance = flow_distance(flow, sample.point[None], 0.0)[0]
            assert distance == pytest.approx(sample.offset, abs=1e-12)


def test_tube_geometry_of_circle():
    flow = family_flow(VerifyFamily.CIRCLE)
    r, direction, betas = tube_geometry(flow, np.array([[2.0, 0.0], [0.0, 0.5]]))
    assert np.allclose(r, [1.0, 0.5])
    assert np.allclose(direction, [[1.0, 0.0], [0.0, -1.0]])
    assert np.allclose(betas[:, 0], [1.0, -1.0])
    assert np.allclose(distance_rate(flow, np.array([[2.0, 0.0], [0.0, 0.5]])), [1.0, -1.0])


def test_tube_geometry_on_the_flow():
    flow = family_flow(VerifyFamily.CIRCLE)
    with pytest.raises(DomainError):
        tube_geometry(flow, np.array([[1.0, 0.0]]))
    with pytest.raises(DomainError):
        tube_geometry(flow, np.array([[0.0, 0.0]]))


def test_tube_curvature_of_circle():
    flow = family_flow(VerifyFamily.CIRCLE)
    sample = TubeSample(base=np.array([1.0, 0.0]), normal=np.array([1.0, 0.0]),
                        offset=0.25, betas=np.array([1.0]))
    report = tube_curvature_check(flow, sample)
    assert report.passed
    assert report.series[0]["predicted"] == pytest.approx(0.8)


def test_tube_offset_too_small():
    flow = family_flow(VerifyFamily.CIRCLE)
    sample = TubeSample(base=np.array([1.0, 0.0]), normal=np.array([1.0, 0.0]),
                        offset=0.001, betas=np.array([1.0]))
    with pytest.raises(DomainError):
        tube_curvature_check(flow, sample)


def test_tube_suite():
    for family in (VerifyFamily.CIRCLE, VerifyFamily.CIRCLE3D, VerifyFamily.CYLINDER):
        report = tube_suite(family_flow(family), count=10)
        assert report.passed, family



# Distance PDE tests

def test_distance_pde_of_circle():
    report = distance_pde_residual(family_flow(VerifyFamily.CIRCLE), np.array([[1.25, 0.0]]))
    assert report.passed
    assert report.series[0]["rhs"] == pytest.approx(0.2)
    assert report.series[0]["lhs"] == pytest.approx(0.2, abs=1e-5)


def test_distance_pde_of_plane_is_exact(rng):
    flow = family_flow(VerifyFamily.PLANE)
    points = np.array([sample.point for sample in random_tube_samples(flow, 10, 0.0, rng)])
    report = distance_pde_residual(flow, points)
    assert report.passed
    assert all(row["rhs"] == 0.0 for row in report.series)


def test_distance_pde_too_close():
    with pytest.raises(DomainError):
        distance_pde_residual(family_flow(VerifyFamily.CIRCLE), np.array([[1.001, 0.0]]))



# Subsolution tests

def test_alpha_constant():
    assert alpha_constant(0.08, 0.5, 1) == pytest.approx(0.12398, abs=1e-5)
    with pytest.raises(DomainError):
        alpha_constant(0.35, 0.0, 1)
    with pytest.raises(DomainError):
        alpha_constant(0.0, 0.0, 1)


def test_curvature_bound_until():
    circle = family_flow(VerifyFamily.CIRCLE)
    assert curvature_bound_until(circle, 0.35) == pytest.approx(0.098394, abs=1e-6)
    assert curvature_bound_until(family_flow(VerifyFamily.PLANE), 0.35) == np.inf


def test_subsolution_holds():
    report = subsolution_residual(family_flow(VerifyFamily.CIRCLE), 0.35, t_range=(0.01, 0.09))
    assert report.passed
    assert report.metrics["precondition_ok"] is True
    assert report.metrics["max_residual"] <= 0.0
    assert report.metrics["alpha"] is None


def test_subsolution_curvature_violation():
    report = subsolution_residual(family_flow(VerifyFamily.CIRCLE), 0.35, t_range=(0.01, 0.2))
    assert not report.passed
    assert report.notes[0] == "violation: curvature"
    assert report.metrics["t"] > curvature_bound_until(family_flow(VerifyFamily.CIRCLE), 0.35)


def test_subsolution_c1_violation():
    report = subsolution_residual(family_flow(VerifyFamily.CIRCLE), 0.4, t_range=(0.01, 0.09))
    assert not report.passed
    assert report.notes[0] == "violation: c1_squared"


def test_subsolution_past_extinction():
    with pytest.raises(DomainError):
        subsolution_residual(family_flow(VerifyFamily.CIRCLE), 0.3, t_range=(0.1, 0.5))



# Sandwich tests

def test_sandwich_needs_positive_times(unit_circle, grid2d):
    with pytest.raises(DomainError):
        uniqueness_sandwich_experiment(unit_circle, grid2d, [0.0])


def test_sandwich_past_extinction(unit_circle, grid2d):
    with pytest.raises(DomainError):
        uniqueness_sandwich_experiment(unit_circle, grid2d, [0.6])


def test_sandwich_of_shrinking_circle(unit_circle, grid2d):
    report = uniqueness_sandwich_experiment(unit_circle, grid2d, [0.05, 0.1])
    assert report.passed
    assert report.metrics["times"] == 2
    assert report.metrics["max_deficit"] <= 2 * grid2d.h
    assert report.metrics["max_hausdorff"] <= 2 * grid2d.h
    assert all(row["nodes_in_N"] > 0 for row in report.series)



# Multiscale and operator tests

def test_multiscale_of_circle(circle_cloud):
    report = multiscale_uniform_estimates(circle_cloud, [0.01, 0.008], h=1 / 32, horizon=0.2, times=3)
    assert report.passed
    assert report.metrics["scales"] == 2
    assert report.metrics["c1_ratio"] <= 2.0
    # |A|√t of the shrinking unit circle is about 0.58 at t = 0.2.
    assert 0.3 < report.metrics["c1_hat_max"] < 0.9
    assert all(row["error"] is None for row in report.series)
    assert len(report.series) == 6


def test_multiscale_with_a_coarse_cloud():
    coarse = SegmentShape(n=2, k=1, start=np.zeros(2), end=np.array([1.0, 0.0])).sample(0.05)
    report = multiscale_uniform_estimates(coarse, [0.1])
    assert not report.passed
    assert report.series[0]["error"] is not None


def test_multiscale_needs_scales(segment_cloud):
    with pytest.raises(DomainError):
        multiscale_uniform_estimates(segment_cloud, [])


def test_operator_properties():
    report = operator_property_suite(200)
    assert report.passed
    assert report.metrics["trials"] == 200
