from functools import cached_property

import numpy as np
from pydantic import field_validator, model_validator
from scipy.spatial import cKDTree

from codimflow.models.utils.base import Base, frozen_array



class PointCloud(Base):
    """Finite sample of a compact set X in R^n.

    Attributes:
      - n (int): ambient dimension.
      - k (int): intrinsic dimension tag.
      - points (ndarray): shape (N, n).
      - scales (ndarray): optional per-point scale annotations, shape (N,).
      - boundary (ndarray): boundary points of the sampled set (curve
        endpoints), shape (B, n); empty for closed sets.
    """

    n: int
    k: int
    points: np.ndarray
    scales: np.ndarray|None = None
    boundary: np.ndarray|None = None

    @field_validator("points", "boundary", mode="before")
    def validate_points(cls, value):
        if value is None:
            return None
        return frozen_array(np.atleast_2d(np.asarray(value, dtype=float)))

    @field_validator("scales", mode="before")
    def validate_scales(cls, value):
        return None if value is None else frozen_array(value)

    @model_validator(mode="after")
    def validate_cloud(self):
        if not 0 <= self.k < self.n:
            raise ValueError("The intrinsic dimension must satisfy 0 <= k < n.")
        if self.points.ndim != 2 or self.points.shape[1] != self.n:
            raise ValueError("Points must be an array of n-vectors.")
        if not np.isfinite(self.points).all():
            raise ValueError("Point coordinates must be finite.")
        if self.scales is not None and self.scales.shape != (len(self.points),):
            raise ValueError("Scale annotations need one value per point.")
        return self

    def __len__(self) -> int:
        return len(self.points)

    @property
    def empty(self) -> bool:
        return len(self.points) == 0

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.points)

    @cached_property
    def resolution(self) -> float:
        """Largest nearest-neighbour spacing of the sample."""

        if len(self.points) < 2:
            return 0.0
        distances, _ = self.tree.query(self.points, k=2)
        return float(distances[:, 1].max())

    def interior_mask(self, margin:float) -> np.ndarray:
        """Points farther than `margin` from the boundary of the set."""

        if self.boundary is None or len(self.boundary) == 0:
            return np.ones(len(self.points), dtype=bool)
        distances, _ = cKDTree(self.boundary).query(self.points)
        return distances > margin

    def subset(self, mask:np.ndarray) -> "PointCloud":
        scales = None if self.scales is None else self.scales[mask]
        return PointCloud(n=self.n, k=self.k, points=self.points[mask],
                          scales=scales, boundary=self.boundary)



class PlaneBasis(Base):
    """Affine k-plane through a base point with orthonormal frames.

    Attributes:
      - base (ndarray): point x the plane passes through.
      - tangent (ndarray): shape (n, k), orthonormal columns.
      - normal (ndarray): shape (n, n - k), orthonormal columns.
      - residual (float): largest distance of the fitted points to the plane.
    """

    base: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    residual: float = 0.0

    @model_validator(mode="after")
    def validate_frames(self):
        frame = np.hstack([self.tangent, self.normal])
        if frame.shape != (len(self.base), len(self.base)):
            raise ValueError("Tangent and normal frames must complete R^n.")
        if np.abs(frame.T @ frame - np.eye(len(self.base))).max() > 1e-10:
            raise ValueError("Plane frames must be orthonormal.")
        return self

    @property
    def normal_projector(self) -> np.ndarray:
        return self.normal @ self.normal.T

    @property
    def tangent_projector(self) -> np.ndarray:
        return self.tangent @ self.tangent.T



class NetPoints(Base):
    """Maximal r/6-packing of a cloud with a normal projector per center.

    Attributes:
      - scale (float): r.
      - k (int): intrinsic dimension.
      - centers (ndarray): shape (L, n), a subset of the input cloud.
      - projectors (ndarray): Q_i, shape (L, n, n).
      - planes (list[PlaneBasis]): fitted planes P_{p_i, r}.
    """

    scale: float
    k: int
    centers: np.ndarray
    projectors: np.ndarray
    planes: list[PlaneBasis]

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.centers)

    @property
    def n(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return len(self.centers)
