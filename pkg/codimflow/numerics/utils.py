"""
Shared numerical helpers: Hausdorff distances, grid interpolation, local
principal-component frames and quadratic-fit curvature of point clouds.

"""

import logging

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial import cKDTree

from codimflow.models.grids import ScalarGrid
from core.errors import DomainError, ResolutionError



logger = logging.getLogger(__name__)



# Distances

def directed_hausdorff(a:np.ndarray, b:np.ndarray, tree:cKDTree|None=None) -> float:
    """Return max over a of the distance to b."""

    tree = tree if tree is not None else cKDTree(b)
    distances, _ = tree.query(a)
    return float(distances.max())



def hausdorff_distance(a:np.ndarray, b:np.ndarray) -> float:
    """Exact symmetric Hausdorff distance of two finite point sets.

    Nearest neighbours come from KD-trees, which return the exact nearest
    point, so the value equals the quadratic scan.
    """

    if len(a) == 0 or len(b) == 0:
        raise DomainError("Hausdorff distance of an empty set", sizes=(len(a), len(b)))
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))



def interpolate(grid:ScalarGrid, points:np.ndarray) -> np.ndarray:
    """Multilinear interpolation of grid values at ambient points."""

    interpolator = RegularGridInterpolator(grid.axes(), grid.data, method="linear")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lower = grid.origin - 1e-12
    upper = grid.origin + grid.h * (np.asarray(grid.shape) - 1) + 1e-12
    if np.any(points < lower) or np.any(points > upper):
        raise DomainError("Interpolation point outside of the grid")
    return interpolator(points)



# Local frames

def pca_frame(points:np.ndarray, k:int, weights:np.ndarray|None=None
              ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Principal frame of a local sample.

    Returns (mean, tangent (n, k), normal (n, n - k), singular values).
    Raises ResolutionError when the sample spans fewer than k directions.
    """

    if len(points) < k + 1:
        raise ResolutionError("Too few points for a local frame",
                              points=len(points), k=k)
    if weights is None:
        weights = np.ones(len(points))
    mean = np.average(points, axis=0, weights=weights)
    centered = (points - mean) * np.sqrt(weights / weights.sum())[:, None]
    _, singular, vt = np.linalg.svd(centered, full_matrices=True)
    singular = np.pad(singular, (0, max(0, points.shape[1] - len(singular))))
    if k > 0 and singular[k - 1] <= 1e-12 * max(singular[0], 1e-300):
        raise ResolutionError("Degenerate local covariance", rank=int((singular > 0).sum()), k=k)
    return mean, vt[:k].T, vt[k:].T, singular



def quadratic_curvature(
    points:np.ndarray,
    center:np.ndarray,
    k:int,
    weights:np.ndarray|None=None
) -> float:
    """|A| at `center` from a least-squares quadratic fit of the sample.

    The sample is written as a graph over its principal k-plane; every normal
    coordinate is fitted by c + g·a + aᵀHa/2 and |A|² = Σ_j ‖H_j‖_F².
    """

    _, tangent, normal, _ = pca_frame(points, k, weights)
    local = points - center
    a, b = local @ tangent, local @ normal
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    columns = [np.ones(len(a))] + [a[:, i] for i in range(k)]
    columns += [(0.5 if i == j else 1.0) * a[:, i] * a[:, j] for i, j in pairs]
    design = np.stack(columns, axis=1)
    if len(a) < design.shape[1] + 1:
        raise ResolutionError("Too few points for a quadratic fit",
                              points=len(a), unknowns=design.shape[1])
    if weights is not None:
        root = np.sqrt(weights)[:, None]
        design, b = design * root, b * root
    coefficients, *_ = np.linalg.lstsq(design, b, rcond=None)
    hessians = np.zeros((normal.shape[1], k, k))
    for row, (i, j) in enumerate(pairs, start=1 + k):
        hessians[:, i, j] = hessians[:, j, i] = coefficients[row]
    return float(np.sqrt((hessians ** 2).sum()))



def cloud_curvature(
    points:np.ndarray,
    k:int,
    radius:float,
    centers:np.ndarray|None=None,
    weights:np.ndarray|None=None,
    min_points:int|None=None
) -> np.ndarray:
    """Quadratic-fit |A| at each center using the sample within `radius`.

    Centers whose ball holds too few points get NaN.
    """

    centers = points if centers is None else centers
    tree = cKDTree(points)
    needed = min_points or (k + 1) * (k + 2) // 2 + 2
    values = np.full(len(centers), np.nan)
    for index, neighbours in enumerate(tree.query_ball_point(centers, radius)):
        if len(neighbours) < needed:
            continue
        local_weights = None if weights is None else weights[neighbours]
        try:
            values[index] = quadratic_curvature(points[neighbours], centers[index], k, local_weights)
        except ResolutionError:
            continue
    return values



# Cutoff

def smoothstep(s:np.ndarray) -> np.ndarray:
    """Quintic smoothstep: 0 below 0, 1 above 1, C² in between."""

    s = np.clip(s, 0.0, 1.0)
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)



def cutoff(s:np.ndarray) -> np.ndarray:
    """phi(s): exactly 1 on [0, 1], exactly 0 on [2, inf), smooth between."""

    return 1.0 - smoothstep(np.asarray(s, dtype=float) - 1.0)
