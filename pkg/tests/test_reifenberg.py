import numpy as np
import pytest
from scipy.spatial.distance import pdist

from codimflow.numerics.reifenberg import (
    best_fit_plane,
    build_net,
    construct_approximation,
    cross_scale_graph_check,
    eigen_projection,
    eta,
    flatness,
    koch_like_curve,
    mollified_projection,
    profile_max,
    reifenberg_profile,
    verify_approx,
)
from codimflow.numerics.shapes import SegmentShape
from core.errors import DomainError, ResolutionError, SmallnessGuardError, SpectralGapError



# Flatness tests

def test_best_fit_plane_of_segment(segment_cloud):
    plane = best_fit_plane(segment_cloud, np.array([0.5, 0.0]), 0.1)
    assert np.allclose(np.abs(plane.tangent[:, 0]), [1.0, 0.0])
    assert np.allclose(plane.normal_projector, [[0.0, 0.0], [0.0, 1.0]])
    assert plane.residual == pytest.approx(0.0, abs=1e-12)


def test_best_fit_plane_needs_points(segment_cloud):
    with pytest.raises(DomainError):
        best_fit_plane(segment_cloud, np.array([0.5, 1.0]), 0.1)


def test_segment_is_flat(segment_cloud):
    assert flatness(segment_cloud, np.array([0.5, 0.0]), 0.1) < 0.02


def test_circle_flatness_grows_with_scale(circle_cloud):
    x = np.array([1.0, 0.0])
    value = flatness(circle_cloud, x, 0.1)
    assert 0.04 < value < 0.06
    assert flatness(circle_cloud, x, 0.02) < value


def test_profile_of_koch_curve(koch_cloud):
    rows = reifenberg_profile(koch_cloud, 0.25, levels=3)
    assert [row.scale for row in rows] == [0.25, 0.125, 0.0625]
    assert all(0.0 <= row.flatness < 1.0 for row in rows)
    assert profile_max(rows) == max(row.flatness for row in rows)


def test_profile_follows_bend_angle():
    gentle = profile_max(reifenberg_profile(koch_like_curve(0.05, 4), 0.25, levels=2))
    sharp = profile_max(reifenberg_profile(koch_like_curve(0.3, 4), 0.25, levels=2))
    assert gentle < sharp


def test_profile_too_coarse():
    coarse = SegmentShape(n=2, k=1, start=np.zeros(2), end=np.array([1.0, 0.0])).sample(0.05)
    with pytest.raises(ResolutionError):
        reifenberg_profile(coarse, 0.25, levels=3)



# Koch-like curve tests

def test_koch_without_bend_is_a_segment():
    curve = koch_like_curve(0.0, 3)
    assert np.allclose(curve.points[:, 1], 0.0)
    assert curve.points[:, 0].min() == pytest.approx(0.0)
    assert curve.points[:, 0].max() == pytest.approx(1.0)
    assert np.allclose(curve.boundary, [[0.0, 0.0], [1.0, 0.0]])


def test_koch_has_unit_diameter(koch_cloud):
    assert pdist(koch_cloud.points).max() == pytest.approx(1.0)
    assert koch_cloud.resolution <= 0.5 * 4.0 ** -5


def test_koch_in_three_dimensions():
    curve = koch_like_curve(0.2, 3, n=3)
    assert curve.n == 3
    assert np.abs(curve.points[:, 2]).max() > 0


def test_koch_invalid_arguments():
    with pytest.raises(DomainError):
        koch_like_curve(np.pi / 4, 3)
    with pytest.raises(DomainError):
        koch_like_curve(0.1, 3, n=4)
    with pytest.raises(DomainError):
        koch_like_curve(0.1, 11)



# Net and field tests

def test_build_net_is_a_packing(segment_cloud):
    net = build_net(segment_cloud, 0.05)
    assert pdist(net.centers).min() >= 0.05 / 3 - 1e-12
    assert net.projectors.shape == (len(net), 2, 2)


def test_build_net_too_coarse():
    coarse = SegmentShape(n=2, k=1, start=np.zeros(2), end=np.array([1.0, 0.0])).sample(0.01)
    with pytest.raises(ResolutionError):
        build_net(coarse, 0.05)


def test_eigen_projection():
    Q = eigen_projection(np.diag([0.0, 1.0]), 1)
    assert np.allclose(Q.entries, [[0.0, 0.0], [0.0, 1.0]])


def test_eigen_projection_without_gap():
    with pytest.raises(SpectralGapError):
        eigen_projection(np.diag([0.5, 0.5]), 1)


def test_mollified_field_of_segment(segment_cloud):
    net = build_net(segment_cloud, 0.05)
    O, total = mollified_projection(net, np.array([0.5, 0.0]))
    assert total > 0
    assert np.allclose(O.entries, [[0.0, 0.0], [0.0, 1.0]], atol=1e-12)
    assert np.allclose(eta(net, np.array([0.5, 0.01])), [0.0, 0.01], atol=1e-12)


def test_eta_far_from_cloud(segment_cloud):
    net = build_net(segment_cloud, 0.05)
    with pytest.raises(DomainError):
        eta(net, np.array([0.5, 1.0]))



# Construction tests

def test_approximation_of_segment(segment_cloud):
    approx = construct_approximation(segment_cloud, 0.05)
    assert not approx.cloud.empty
    assert np.abs(approx.cloud.points[:, 1]).max() < 1e-8
    assert approx.fail_fraction == 0.0
    assert approx.max_contributors <= 5 ** 2


def test_construction_guard(circle_cloud):
    with pytest.raises(SmallnessGuardError):
        construct_approximation(circle_cloud, 0.1)


def test_circle_acceptance(circle_cloud):
    r = 0.008
    approx = construct_approximation(circle_cloud, r)
    report = verify_approx(circle_cloud, approx.cloud, r, approx.seed_spacing, approx.delta)
    assert report.passed
    assert report.metrics["dH_ratio"] <= 0.02
    assert report.metrics["max_curvature_times_r"] <= 0.02
    assert report.metrics["connectivity_ok"] is True


@pytest.mark.parametrize("r", [4.0 ** -2, 4.0 ** -3])
def test_koch_acceptance(koch_cloud, r):
    approx = construct_approximation(koch_cloud, r, 0.1 * r, guard=0.3)
    assert 0.0 < approx.delta < 0.3
    report = verify_approx(koch_cloud, approx.cloud, r, approx.seed_spacing, approx.delta,
                           dh_tolerance=approx.delta, curvature_tolerance=3 * approx.delta)
    assert report.passed
    assert report.metrics["dH_ratio"] <= approx.delta
    assert report.metrics["connectivity_ok"] is True


def test_cross_scale_graph_of_segment(segment_cloud):
    report = cross_scale_graph_check(segment_cloud, 0.08)
    assert report.passed
    assert report.metrics["injective"] is True
