from functools import cached_property

import numpy as np
from pydantic import ValidationInfo, field_validator, model_validator

from codimflow.models.utils.base import Base, frozen_array
from codimflow.models.utils.enums import BoundaryMode



class ScalarGrid(Base):
    """Uniform n-dimensional grid carrying the level-set function u.

    Attributes:
      - n (int): ambient dimension, 2 to 4.
      - shape (tuple[int]): node counts per axis.
      - origin (ndarray): coordinates of node (0, ..., 0).
      - h (float): isotropic spacing.
      - data (ndarray): node values, shaped like `shape` (row-major).
      - time (float): flow time of the snapshot.
      - cap (float): truncation level of the distance field.
    """

    n: int
    shape: tuple[int, ...]
    origin: np.ndarray
    h: float
    data: np.ndarray
    time: float = 0.0
    cap: float

    @field_validator("origin", mode="before")
    def validate_origin(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def validate_grid(self):
        if not 2 <= self.n <= 4:
            raise ValueError("Grids are supported for 2 <= n <= 4.")
        if len(self.shape) != self.n or self.origin.shape != (self.n,):
            raise ValueError("Shape and origin must have n entries.")
        if self.h <= 0 or self.time < 0:
            raise ValueError("Spacing must be positive and time nonnegative.")
        if self.data.size != int(np.prod(self.shape)):
            raise ValueError("Data length must equal the product of the shape.")
        if not np.isfinite(self.data).all():
            raise ValueError("Grid values must be finite.")
        if self.data.min() < 0 or self.data.max() > self.cap * (1 + 1e-12):
            raise ValueError("Level-set values must lie in [0, cap].")
        return self

    @field_validator("data", mode="before")
    def validate_data(cls, value, info:ValidationInfo):
        data = np.asarray(value, dtype=float)
        shape = info.data.get("shape")
        if shape is not None and data.size == int(np.prod(shape)):
            data = data.reshape(shape)
        return frozen_array(data)

    def axes(self) -> list[np.ndarray]:
        """Node coordinates along each axis."""

        return [self.origin[i] + self.h * np.arange(m) for i, m in enumerate(self.shape)]

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape (*shape, n)."""

        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    @property
    def diameter(self) -> float:
        return float(self.h * np.linalg.norm(np.asarray(self.shape) - 1))

    def with_data(self, data:np.ndarray, time:float) -> "ScalarGrid":
        """Return a new snapshot on the same grid."""

        return ScalarGrid(n=self.n, shape=self.shape, origin=self.origin,
                          h=self.h, data=data, time=time, cap=self.cap)

    def same_grid(self, other:"ScalarGrid") -> bool:
        return (self.shape == other.shape and self.h == other.h
                and np.array_equal(self.origin, other.origin))



class GraphField(Base):
    """Vector valued graph u: B^k -> R^m sampled on a uniform grid.

    Attributes:
      - k (int): domain dimension, 1 or 2.
      - m (int): codimension n - k.
      - origin (ndarray): coordinates of the first node.
      - shape (tuple[int]): node counts per domain axis.
      - h (float): spacing.
      - values (ndarray): shape (*shape, m).
      - time (float): flow time.
      - boundary (BoundaryMode): frozen Dirichlet trace or periodic.
    """

    k: int
    m: int
    origin: np.ndarray
    shape: tuple[int, ...]
    h: float
    values: np.ndarray
    time: float = 0.0
    boundary: BoundaryMode = BoundaryMode.DIRICHLET

    @field_validator("origin", "values", mode="before")
    def validate_arrays(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def validate_field(self):
        if self.k not in (1, 2) or self.m < 1:
            raise ValueError("Graphs need k in {1, 2} and m >= 1.")
        if len(self.shape) != self.k or self.origin.shape != (self.k,):
            raise ValueError("Shape and origin must have k entries.")
        if self.values.shape != (*self.shape, self.m):
            raise ValueError("Values must have shape (*shape, m).")
        if not np.isfinite(self.values).all():
            raise ValueError("Graph values must be finite.")
        return self

    def axes(self) -> list[np.ndarray]:
        return [self.origin[i] + self.h * np.arange(s) for i, s in enumerate(self.shape)]

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape (*shape, k)."""

        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    @property
    def center(self) -> np.ndarray:
        return self.origin + 0.5 * self.h * (np.asarray(self.shape) - 1)

    @property
    def radius(self) -> float:
        """Half of the smallest domain extent."""

        return float(0.5 * self.h * (min(self.shape) - 1))

    def with_values(self, values:np.ndarray, time:float) -> "GraphField":
        return GraphField(k=self.k, m=self.m, origin=self.origin,
                          shape=self.shape, h=self.h, values=values,
                          time=time, boundary=self.boundary)



class CurvatureSample(Base):
    """Second fundamental form of a graph at one node.

    Attributes:
      - location (ndarray): domain point of the node.
      - norm (float): |A|, in 1/length.
      - form (ndarray): A(e_i, e_j) as ambient normal vectors, shape (k, k, n).
    """

    location: np.ndarray
    norm: float
    form: np.ndarray



class GraphPatch(Base):
    """Named graph over B^k(0, r) used by the interpolation check.

    Attributes:
      - name (str): generator of the patch.
      - field (GraphField): the graph, sampled on [-r, r]^k.
      - scale (float): r.
    """

    name: str
    field: GraphField
    scale: float
