import numpy as np
from pydantic import field_validator, model_validator

from codimflow.models.utils.base import Base, frozen_array
from codimflow.models.utils.enums import FlowFamily



class AnalyticFlow(Base):
    """Mean curvature flow with a closed-form radius law.

    The flow lives in the frame `orientation` (columns are the frame axes)
    translated to `center`. In that frame:
      - sphere: the k-sphere of radius rho(t) in the span of the first k+1
        axes, rho(t) = sqrt(R^2 - 2kt).
      - cylinder: S^j(rho(t)) in the first j+1 axes times the flat factor
        spanned by the next k-j axes, rho(t) = sqrt(R^2 - 2jt).
      - plane: the span of the first k axes (k = 0 is a point); static.
    """

    family: FlowFamily
    n: int
    k: int
    radius: float = 1.0
    j: int|None = None
    center: np.ndarray|None = None
    orientation: np.ndarray|None = None

    @field_validator("center", "orientation", mode="before")
    def validate_arrays(cls, value):
        return None if value is None else frozen_array(value)

    @model_validator(mode="after")
    def validate_flow(self):
        if not 0 <= self.k < self.n:
            raise ValueError("The flow dimension must satisfy 0 <= k < n.")
        if self.family == FlowFamily.SPHERE and (self.k < 1 or self.radius <= 0):
            raise ValueError("A sphere needs k >= 1 and a positive radius.")
        if self.family == FlowFamily.CYLINDER:
            if self.j is None or not 1 <= self.j < self.k:
                raise ValueError("A cylinder needs 1 <= j < k.")
            if self.radius <= 0:
                raise ValueError("A cylinder needs a positive radius.")
        if self.center is not None and self.center.shape != (self.n,):
            raise ValueError("The center must be an n-vector.")
        if self.orientation is not None:
            q = self.orientation
            if q.shape != (self.n, self.n) or np.abs(q.T @ q - np.eye(self.n)).max() > 1e-10:
                raise ValueError("The orientation must be an orthogonal matrix.")
        return self

    @property
    def sphere_dim(self) -> int:
        """Dimension j of the round factor (0 for planes)."""

        if self.family == FlowFamily.SPHERE:
            return self.k
        if self.family == FlowFamily.CYLINDER:
            return self.j
        return 0

    @property
    def extinction_time(self) -> float:
        j = self.sphere_dim
        return np.inf if j == 0 else self.radius ** 2 / (2 * j)

    def rho(self, t) -> np.ndarray:
        """Radius of the round factor at time t."""

        j = self.sphere_dim
        t = np.asarray(t, dtype=float)
        if j == 0:
            return np.full_like(t, np.inf)
        if np.any(t >= self.extinction_time):
            raise ValueError("The analytic flow is extinct at the requested time.")
        return np.sqrt(self.radius ** 2 - 2 * j * t)

    def curvature_norm(self, t) -> np.ndarray:
        """|A| of M_t, constant along M_t for these families."""

        j = self.sphere_dim
        if j == 0:
            return np.zeros_like(np.asarray(t, dtype=float))
        return np.sqrt(j) / self.rho(t)

    def to_frame(self, x:np.ndarray) -> np.ndarray:
        """Coordinates of ambient points in the flow frame."""

        y = np.asarray(x, dtype=float)
        if self.center is not None:
            y = y - self.center
        if self.orientation is not None:
            y = y @ self.orientation
        return y

    def from_frame(self, y:np.ndarray) -> np.ndarray:
        x = np.asarray(y, dtype=float)
        if self.orientation is not None:
            x = x @ self.orientation.T
        if self.center is not None:
            x = x + self.center
        return x



class TubeSample(Base):
    """Point x + s·nu of the tubular neighbourhood of M_t.

    Attributes:
      - base (ndarray): x in M_t.
      - normal (ndarray): unit normal nu at x.
      - offset (float): s.
      - betas (ndarray): principal values <A(v_i, v_i), -nu>, one per
        tangent direction.
    """

    base: np.ndarray
    normal: np.ndarray
    offset: float
    betas: np.ndarray

    @model_validator(mode="after")
    def validate_sample(self):
        if self.offset <= 0:
            raise ValueError("The tube offset must be positive.")
        if np.any(np.abs(self.betas) * self.offset >= 1):
            raise ValueError("The tube offset exceeds the normal injectivity radius.")
        return self

    @property
    def point(self) -> np.ndarray:
        return self.base + self.offset * self.normal
