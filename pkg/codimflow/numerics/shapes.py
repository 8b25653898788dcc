"""
Initial sets of the level-set runs and their exact distance functions.

Spheres, planes, points and cylinders are analytic flows frozen at a time t;
segments and clouds are static. Every shape answers `distance()` for arrays
of points, reports its bounding box (None when unbounded) and samples itself
as a PointCloud.

"""

import logging
from pathlib import Path

import numpy as np
from scipy.special import gamma

from codimflow.models.clouds import PointCloud
from codimflow.models.flows import AnalyticFlow
from codimflow.models.utils.base import Base
from codimflow.models.utils.enums import FlowFamily, ShapeKind
from codimflow.numerics.geomlin import sphere_directions
from codimflow.numerics.reifenberg import koch_like_curve
from codimflow.schemas.flows import ShapeSpec
from codimflow.utils.files import read_cloud
from core.errors import ConfigError, DomainError



logger = logging.getLogger(__name__)



# Analytic flows

def _split(flow:AnalyticFlow) -> tuple[int, int]:
    """Return (end of the round coordinates, start of the normal ones)."""

    j = flow.sphere_dim
    if j == 0:
        return 0, flow.k
    return j + 1, flow.k + 1


def flow_distance(flow:AnalyticFlow, points:np.ndarray, t:float=0.0) -> np.ndarray:
    """Distance from points to M_t."""

    y = flow.to_frame(points)
    round_end, normal_start = _split(flow)
    normal = np.linalg.norm(y[..., normal_start:], axis=-1)
    if round_end == 0:
        return normal
    radial = np.linalg.norm(y[..., :round_end], axis=-1) - flow.rho(t)
    return np.sqrt(radial ** 2 + normal ** 2)



def sphere_surface(dim:int, radius:float) -> float:
    """Area of the round dim-sphere of the given radius."""

    return float(2 * np.pi ** ((dim + 1) / 2) / gamma((dim + 1) / 2) * radius ** dim)



def round_samples(dim:int, radius:float, spacing:float) -> np.ndarray:
    """Quasi-uniform samples of the dim-sphere in R^(dim + 1)."""

    if dim == 1:
        count = max(8, int(np.ceil(2 * np.pi * radius / spacing)))
        angle = 2 * np.pi * np.arange(count) / count
        return radius * np.stack([np.cos(angle), np.sin(angle)], axis=-1)
    count = max(4 * dim ** 2, int(np.ceil(sphere_surface(dim, radius) / spacing ** dim)))
    return radius * np.array(sphere_directions(dim + 1, count))



def sample_flow(
    flow:AnalyticFlow,
    t:float,
    spacing:float,
    lower:np.ndarray|None=None,
    upper:np.ndarray|None=None,
    extent:float=1.0
) -> PointCloud:
    """Sample M_t with the given spacing, cropped to the box when given.

    Flat directions are sampled over [-extent, extent], or over the box
    diagonal when a box is given.
    """

    _, normal_start = _split(flow)
    j = flow.sphere_dim
    flat = flow.k - j
    if lower is not None and upper is not None:
        extent = float(np.linalg.norm(np.asarray(upper) - np.asarray(lower)))
    parts = []
    if j > 0:
        parts.append(round_samples(j, float(flow.rho(t)), spacing))
    if flat > 0:
        axis = np.arange(-extent, extent + 0.5 * spacing, spacing)
        mesh = np.meshgrid(*([axis] * flat), indexing="ij")
        parts.append(np.stack([m.ravel() for m in mesh], axis=-1))
    if not parts:
        parts.append(np.zeros((1, 0)))

    local = parts[0]
    for part in parts[1:]:
        local = np.hstack([
            np.repeat(local, len(part), axis=0),
            np.tile(part, (len(local), 1)),
        ])
    frame = np.zeros((len(local), flow.n))
    frame[:, :normal_start] = local
    points = flow.from_frame(frame)
    if lower is not None and upper is not None:
        inside = np.all((points >= lower) & (points <= upper), axis=1)
        points = points[inside]
    return PointCloud(n=flow.n, k=flow.k, points=points.reshape(-1, flow.n))



# Shapes

class Shape(Base):
    n: int
    k: int

    def distance(self, points:np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounds(self) -> tuple[np.ndarray, np.ndarray]|None:
        raise NotImplementedError

    def sample(self, spacing:float, lower=None, upper=None) -> PointCloud:
        raise NotImplementedError

    @property
    def radial_frame(self) -> tuple[np.ndarray, np.ndarray]|None:
        """(center, basis of the span of the round factor) of a single
        sphere or cylinder; None otherwise."""

        return None


class FlowShape(Shape):
    """Union of analytic flows frozen at time t."""

    flows: list[AnalyticFlow]
    t: float = 0.0

    def distance(self, points:np.ndarray) -> np.ndarray:
        return np.min([flow_distance(flow, points, self.t) for flow in self.flows], axis=0)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]|None:
        boxes = []
        for flow in self.flows:
            if flow.k - flow.sphere_dim > 0:
                return None
            center = flow.center if flow.center is not None else np.zeros(self.n)
            reach = float(flow.rho(self.t)) if flow.sphere_dim else 0.0
            boxes.append((center - reach, center + reach))
        return (np.min([box[0] for box in boxes], axis=0),
                np.max([box[1] for box in boxes], axis=0))

    def sample(self, spacing:float, lower=None, upper=None) -> PointCloud:
        clouds = [sample_flow(flow, self.t, spacing, lower, upper) for flow in self.flows]
        return PointCloud(n=self.n, k=self.k, points=np.vstack([c.points for c in clouds]))

    @property
    def radial_frame(self) -> tuple[np.ndarray, np.ndarray]|None:
        if len(self.flows) != 1 or self.flows[0].sphere_dim == 0:
            return None
        flow = self.flows[0]
        center = flow.center if flow.center is not None else np.zeros(self.n)
        frame = flow.orientation if flow.orientation is not None else np.eye(self.n)
        return center, frame[:, : flow.sphere_dim + 1]


class SegmentShape(Shape):
    """Straight segment between two points."""

    start: np.ndarray
    end: np.ndarray

    def distance(self, points:np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        direction = self.end - self.start
        s = ((points - self.start) @ direction) / (direction @ direction)
        nearest = self.start + np.clip(s, 0.0, 1.0)[..., None] * direction
        return np.linalg.norm(points - nearest, axis=-1)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.minimum(self.start, self.end), np.maximum(self.start, self.end)

    def sample(self, spacing:float, lower=None, upper=None) -> PointCloud:
        length = float(np.linalg.norm(self.end - self.start))
        count = max(2, int(np.ceil(length / spacing)) + 1)
        s = np.linspace(0.0, 1.0, count)[:, None]
        points = self.start + s * (self.end - self.start)
        return PointCloud(n=self.n, k=1, points=points,
                          boundary=np.stack([self.start, self.end]))


class CloudShape(Shape):
    """Finite sample; distances are exact nearest-point distances."""

    cloud: PointCloud

    def distance(self, points:np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        distances, _ = self.cloud.tree.query(points.reshape(-1, self.n))
        return distances.reshape(points.shape[:-1])

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.cloud.points.min(axis=0), self.cloud.points.max(axis=0)

    def sample(self, spacing:float, lower=None, upper=None) -> PointCloud:
        return self.cloud



def build_shape(spec:ShapeSpec, n:int, k:int, base_dir:Path|None=None) -> Shape:
    """Build the shape described by a config entry.

    Args:
      - spec (ShapeSpec): shape descriptor.
      - n (int): ambient dimension.
      - k (int): default dimension of spheres, planes and cylinders.
      - base_dir (Path): directory cloud paths are relative to.
    """

    dim = spec.k if spec.k is not None else k
    center = spec.center if spec.center is not None else np.zeros(n)
    options = dict(n=n, center=center, orientation=spec.orientation)
    try:
        if spec.kind == ShapeKind.POINT:
            flows = [AnalyticFlow(family=FlowFamily.PLANE, k=0, **options)]
            return FlowShape(n=n, k=0, flows=flows)
        if spec.kind == ShapeKind.SPHERE:
            flows = [AnalyticFlow(family=FlowFamily.SPHERE, k=dim, radius=spec.radius, **options)]
            return FlowShape(n=n, k=dim, flows=flows)
        if spec.kind == ShapeKind.SPHERES:
            flows = [AnalyticFlow(family=FlowFamily.SPHERE, k=dim, radius=radius, **options)
                     for radius in spec.radii]
            return FlowShape(n=n, k=dim, flows=flows)
        if spec.kind == ShapeKind.PLANE:
            flows = [AnalyticFlow(family=FlowFamily.PLANE, k=dim, **options)]
            return FlowShape(n=n, k=dim, flows=flows)
        if spec.kind == ShapeKind.CYLINDER:
            flows = [AnalyticFlow(family=FlowFamily.CYLINDER, k=dim, j=spec.j,
                                  radius=spec.radius, **options)]
            return FlowShape(n=n, k=dim, flows=flows)
    except ValueError as error:
        raise DomainError("Invalid analytic shape", kind=spec.kind.value, reason=str(error))

    if spec.kind == ShapeKind.SEGMENT:
        if len(spec.start) != n or len(spec.end) != n:
            raise DomainError("Segment endpoints must be n-vectors", n=n)
        return SegmentShape(n=n, k=1, start=np.asarray(spec.start, dtype=float),
                            end=np.asarray(spec.end, dtype=float))
    if spec.kind == ShapeKind.KOCH:
        curve = koch_like_curve(spec.theta, spec.depth, n)
        points = np.asarray(center) + spec.radius * curve.points
        boundary = np.asarray(center) + spec.radius * curve.boundary
        return CloudShape(n=n, k=1, cloud=PointCloud(n=n, k=1, points=points, boundary=boundary))
    path = Path(spec.path)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    cloud = read_cloud(path)
    if cloud.n != n:
        raise DomainError("Cloud dimension does not match the flow", cloud_n=cloud.n, n=n)
    return CloudShape(n=n, k=cloud.k, cloud=cloud)



def source_cloud(
    spec:ShapeSpec,
    n:int,
    k:int,
    spacing:float|None=None,
    base_dir:Path|None=None,
    lower=None,
    upper=None
) -> PointCloud:
    """Point cloud X described by a config entry. Analytic shapes and
    segments are sampled with `spacing`; Koch curves and cloud files are
    used as they are."""

    shape = build_shape(spec, n, k, base_dir)
    if spacing is None and not isinstance(shape, CloudShape):
        raise ConfigError("Sampling this shape needs a spacing", kind=spec.kind.value)
    cloud = shape.sample(spacing, lower, upper)
    logger.info("Source cloud %s: %d points in R^%d", spec.kind.value, len(cloud.points), n)
    return cloud
