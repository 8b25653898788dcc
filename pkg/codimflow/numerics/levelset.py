"""
Explicit finite-difference solver for the level-set equation

    u_t = F(∇u, ∇²u)

of k-dimensional mean curvature flow, started from the truncated distance
to the initial set. The zero set of u is the evolving set X_t.

Each step is a pure map from the old grid to a new one:
  - central differences build ∇u and ∇²u at interior nodes;
  - F is evaluated where |∇u| >= eps_grad, and one end of the degenerate
    envelope (the lower one by default) is used below the gradient floor;
  - boundary nodes copy the update of their nearest interior node;
  - values are clamped to [0, cap].

"""

import logging
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import ndimage

from codimflow.models.clouds import PointCloud
from codimflow.models.grids import ScalarGrid
from codimflow.models.records import FlowRecord
from codimflow.models.utils.enums import EnvelopeEnd
from codimflow.numerics.geomlin import ENVELOPE_DIRECTIONS, f_degenerate_envelope, f_operator
from codimflow.numerics.shapes import CloudShape, Shape, build_shape
from codimflow.numerics.utils import hausdorff_distance, interpolate
from codimflow.schemas.flows import FlowConfig, GridSpec
from codimflow.schemas.reports import CheckReport, DiagnosticRow
from core.errors import DomainError, NumericalError



logger = logging.getLogger(__name__)

COMPARISON_TOLERANCE = 1e-9



# Finite differences

def _shifted(data:np.ndarray, offsets:tuple[int, ...]) -> np.ndarray:
    return data[tuple(slice(1 + o, m - 1 + o) for o, m in zip(offsets, data.shape))]


def _unit(n:int, axis:int, sign:int=1, other:int|None=None, other_sign:int=0) -> tuple[int, ...]:
    offsets = [0] * n
    offsets[axis] = sign
    if other is not None:
        offsets[other] = other_sign
    return tuple(offsets)


def derivatives(data:np.ndarray, h:float) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient and Hessian at the interior nodes.

    Returns arrays of shape (*inner, n) and (*inner, n, n).
    """

    n = data.ndim
    center = _shifted(data, (0,) * n)
    grad = np.empty(center.shape + (n,))
    hess = np.empty(center.shape + (n, n))
    for a in range(n):
        plus, minus = _shifted(data, _unit(n, a, 1)), _shifted(data, _unit(n, a, -1))
        grad[..., a] = (plus - minus) / (2 * h)
        hess[..., a, a] = (plus - 2 * center + minus) / h ** 2
        for b in range(a):
            corner = lambda sa, sb: _shifted(data, _unit(n, a, sa, b, sb))
            cross = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4 * h ** 2)
            hess[..., a, b] = hess[..., b, a] = cross
    return grad, hess



def speed(
    grad:np.ndarray,
    hess:np.ndarray,
    k:int,
    eps_grad:float,
    envelope:EnvelopeEnd=EnvelopeEnd.LOWER,
    n_dirs:int=ENVELOPE_DIRECTIONS
) -> np.ndarray:
    """Right-hand side F(∇u, ∇²u) at every interior node.

    F(p, 0) = 0, so only nodes with a nonzero Hessian are evaluated.
    """

    values = np.zeros(grad.shape[:-1])
    active = np.abs(hess).max(axis=(-2, -1)) > 0
    regular = active & (np.linalg.norm(grad, axis=-1) >= eps_grad)
    if regular.any():
        values[regular] = f_operator(k, grad[regular], hess[regular])
    degenerate = active & ~regular
    if degenerate.any():
        low, high = f_degenerate_envelope(k, hess[degenerate], n_dirs)
        values[degenerate] = low if envelope == EnvelopeEnd.LOWER else high
    return values



def _auto_dt(grad:np.ndarray, hess:np.ndarray, eps_grad:float, h:float) -> float:
    n = grad.shape[-1]
    regular = np.linalg.norm(grad, axis=-1) >= eps_grad
    largest = np.sqrt((hess[regular] ** 2).sum(axis=(-2, -1))).max() if regular.any() else 0.0
    scale = max(1.0, h * largest)
    return h ** 2 / (5 * n * scale)


def stable_dt(u:ScalarGrid, eps_grad:float|None=None) -> float:
    """Stable explicit step h²/(5·n·Λ), Λ = max(1, h·max‖∇²u‖_F) taken over
    the nodes with |∇u| >= eps_grad."""

    grad, hess = derivatives(u.data, u.h)
    return _auto_dt(grad, hess, eps_grad if eps_grad is not None else u.h, u.h)



def _advance(u:ScalarGrid, increment:np.ndarray, dt:float, new_time:float) -> ScalarGrid:
    data = u.data + dt * np.pad(increment, 1, mode="edge")
    bad = ~np.isfinite(data)
    if bad.any():
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NumericalError("Non-finite value produced by a step", node=node, time=u.time)
    return u.with_data(np.clip(data, 0.0, u.cap), new_time)



def step(
    u:ScalarGrid,
    k:int,
    dt:float,
    eps_grad:float,
    envelope:EnvelopeEnd=EnvelopeEnd.LOWER,
    n_dirs:int=ENVELOPE_DIRECTIONS
) -> ScalarGrid:
    """One explicit Euler step of the level-set equation."""

    if not eps_grad > 0:
        raise DomainError("The gradient floor must be positive", eps_grad=eps_grad)
    grad, hess = derivatives(u.data, u.h)
    return _advance(u, speed(grad, hess, k, eps_grad, envelope, n_dirs), dt, u.time + dt)



# Marching

@dataclass
class Scheme:
    """Settings shared by every step of a run."""

    k: int
    eps_grad: float
    envelope: EnvelopeEnd = EnvelopeEnd.LOWER
    n_dirs: int = ENVELOPE_DIRECTIONS
    dt: float|None = None

    @classmethod
    def for_grid(cls, u:ScalarGrid, k:int, **options) -> "Scheme":
        eps_grad = options.pop("eps_grad", None)
        return cls(k=k, eps_grad=eps_grad if eps_grad is not None else u.h, **options)


def march(u:ScalarGrid, scheme:Scheme, targets:list[float]) -> Iterator[tuple[ScalarGrid, float, float, bool]]:
    """Step u through the target times.

    Yields (grid, dt, wall_ms, reached) after every step; `reached` is true
    when the step landed on a target time.
    """

    for target in sorted(targets):
        while u.time < target - 1e-12:
            start = time.perf_counter()
            grad, hess = derivatives(u.data, u.h)
            dt = scheme.dt if scheme.dt is not None else _auto_dt(grad, hess, scheme.eps_grad, u.h)
            remaining = target - u.time
            new_time = target if dt >= remaining else u.time + dt
            dt = min(dt, remaining)
            increment = speed(grad, hess, scheme.k, scheme.eps_grad, scheme.envelope, scheme.n_dirs)
            u = _advance(u, increment, dt, new_time)
            wall_ms = 1000 * (time.perf_counter() - start)
            yield u, dt, wall_ms, new_time == target



def evolve(u:ScalarGrid, k:int, times:list[float], **options) -> list[ScalarGrid]:
    """Flow u and return the grids at the requested times."""

    scheme = Scheme.for_grid(u, k, **options)
    grids = [u] if 0.0 in times else []
    for grid, _, _, reached in march(u, scheme, [t for t in times if t > 0]):
        if reached:
            grids.append(grid)
    return grids



# Initialization and measurement

def grid_coordinates(grid:GridSpec) -> np.ndarray:
    axes = [grid.origin[i] + grid.h * np.arange(m) for i, m in enumerate(grid.shape)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)



def shape_margin(shape:Shape, grid:GridSpec) -> float|None:
    """Distance between the shape's bounding box and the grid boundary."""

    box = shape.bounds()
    if box is None:
        return None
    return float(min((box[0] - grid.lower).min(), (grid.upper - box[1]).min()))



def init_distance(shape:Shape|PointCloud, grid:GridSpec, cap:float|str="auto") -> ScalarGrid:
    """Truncated distance u₀ = min(dist(·, X), cap) sampled at the nodes.

    "auto" caps at a quarter of the grid diameter, reduced to the margin
    between the shape's bounding box and the grid boundary.
    """

    if isinstance(shape, PointCloud):
        if shape.empty:
            raise DomainError("Cannot initialize from an empty cloud")
        shape = CloudShape(n=shape.n, k=shape.k, cloud=shape)
    if shape.n != grid.n:
        raise DomainError("Shape and grid dimensions differ", shape_n=shape.n, grid_n=grid.n)

    diameter = grid.h * float(np.linalg.norm(np.asarray(grid.shape) - 1))
    margin = shape_margin(shape, grid)
    if margin is not None and margin <= 0:
        raise DomainError("The grid does not contain the shape", margin=margin)
    if cap == "auto":
        cap = 0.25 * diameter
        if margin is not None and cap > margin:
            logger.warning("Cap reduced from %.4g to the grid margin %.4g", cap, margin)
            cap = margin
    elif margin is not None and cap > margin + 1e-12:
        raise DomainError("The grid must contain the shape's bounding box plus cap",
                          cap=cap, margin=margin)
    if not cap > 2 * grid.h:
        raise DomainError("The cap must exceed 2h", cap=cap, h=grid.h)

    distances = shape.distance(grid_coordinates(grid))
    data = np.clip(np.where(distances < 1e-14, 0.0, distances), 0.0, cap)
    return ScalarGrid(n=grid.n, shape=tuple(grid.shape), origin=grid.origin,
                      h=grid.h, data=data, cap=float(cap))



def offset_grid(u:ScalarGrid, c:float) -> ScalarGrid:
    """u + c with the cap raised by c (an ordered copy of u)."""

    return ScalarGrid(n=u.n, shape=u.shape, origin=u.origin, h=u.h,
                      data=u.data + c, time=u.time, cap=u.cap + c)



def zero_set(u:ScalarGrid, threshold:float|None=None, k:int|None=None) -> PointCloud:
    """Nodes with u < threshold (1.5h by default); empty after extinction."""

    threshold = threshold if threshold is not None else 1.5 * u.h
    mask = u.data < threshold
    k = k if k is not None else u.n - 1
    return PointCloud(n=u.n, k=k, points=u.coordinates[mask].reshape(-1, u.n))



def hausdorff(a:PointCloud, b:PointCloud) -> float:
    """Exact symmetric Hausdorff distance of two clouds."""

    if a.empty or b.empty:
        raise DomainError("Hausdorff distance needs two nonempty clouds")
    return hausdorff_distance(a.points, b.points)



def measured_radius(u:ScalarGrid, threshold:float, frame:tuple[np.ndarray, np.ndarray]) -> float|None:
    """Mean in-span radius of the zero band, weighted by threshold - u."""

    mask = u.data < threshold
    if not mask.any():
        return None
    center, basis = frame
    radii = np.linalg.norm((u.coordinates[mask] - center) @ basis, axis=-1)
    return float(np.average(radii, weights=threshold - u.data[mask]))



def band_components(u:ScalarGrid, threshold:float) -> int:
    """Connected components of the zero band (nodes touching at corners
    count as connected)."""

    structure = ndimage.generate_binary_structure(u.n, u.n)
    _, count = ndimage.label(u.data < threshold, structure=structure)
    return int(count)



def gradient_deviation(u:ScalarGrid, threshold:float) -> float|None:
    """Mean ||∇u| - 1| over the interior zero-band nodes."""

    grad, _ = derivatives(u.data, u.h)
    mask = _shifted(u.data, (0,) * u.n) < threshold
    if not mask.any():
        return None
    return float(np.abs(np.linalg.norm(grad[mask], axis=-1) - 1).mean())



def _boundary_distance(u:ScalarGrid, threshold:float) -> float|None:
    index = np.argwhere(u.data < threshold)
    if len(index) == 0:
        return None
    upper = np.asarray(u.shape) - 1 - index
    return float(u.h * min(index.min(), upper.min()))



def extinction_estimate(rows:list[DiagnosticRow], threshold:float) -> float|None:
    """Back-extrapolate the post-extinction rise of min u to u = 0.

    The fit uses the rows from the last one with min u <= threshold/2 up to
    the first row with an empty zero band. Below threshold/2 min u is still
    dominated by the distance from the nodes to the vanishing set.
    """

    end = next((i for i, row in enumerate(rows) if row.zero_count == 0), None)
    if end is None:
        return None
    low = [i for i in range(end) if rows[i].min_u <= 0.5 * threshold]
    start = low[-1] + 1 if low else 0
    if end - start < 1:
        start = max(start - 1, 0)
    window = rows[start:end + 1]
    values = np.array([row.min_u for row in window])
    if len(window) < 2 or np.ptp(values) == 0:
        return rows[end].t
    _, intercept = np.polyfit(values, [row.t for row in window], 1)
    return float(intercept)



# Runs

def run_flow(cfg:FlowConfig, shape:Shape|None=None, base_dir=None) -> FlowRecord:
    """Run the level-set flow described by `cfg`.

    Records a diagnostic row per step and keeps the grids at the snapshot
    times. The run is deterministic given the configuration.
    """

    shape = shape if shape is not None else build_shape(cfg.shape, cfg.n, cfg.k, base_dir)
    u = init_distance(shape, cfg.grid, cfg.cap)
    scheme = Scheme(k=cfg.k, eps_grad=cfg.gradient_floor, envelope=cfg.envelope,
                    n_dirs=cfg.n_dirs, dt=None if cfg.dt == "auto" else cfg.dt)
    if scheme.dt is not None and scheme.dt > stable_dt(u, scheme.eps_grad):
        logger.warning("Fixed dt %.3g is above the stable step %.3g",
                       scheme.dt, stable_dt(u, scheme.eps_grad))
    band, frame = cfg.band, shape.radial_frame
    bounded = shape.bounds() is not None
    logger.info("Flow start: n=%d k=%d grid=%s h=%.4g cap=%.4g t_end=%.4g",
                cfg.n, cfg.k, tuple(cfg.grid.shape), cfg.grid.h, u.cap, cfg.t_end)

    def diagnose(grid:ScalarGrid, dt:float, wall_ms:float) -> DiagnosticRow:
        return DiagnosticRow(
            t=grid.time, min_u=float(grid.data.min()),
            zero_count=int((grid.data < band).sum()),
            components=band_components(grid, band),
            measured_radius=measured_radius(grid, band, frame) if frame else None,
            dt=dt, wall_ms=wall_ms,
        )

    snapshot_times = set(cfg.snapshots) | {cfg.t_end}
    snapshots, rows = [u], [diagnose(u, 0.0, 0.0)]
    deviation = {}
    if cfg.redistance_diagnostic:
        deviation[0.0] = gradient_deviation(u, band)
    extinction, boundary_ok = None, (True if bounded else None)

    for grid, dt, wall_ms, reached in march(u, scheme, sorted(snapshot_times)):
        row = diagnose(grid, dt, wall_ms)
        rows.append(row)
        logger.debug("t=%.5f dt=%.3g min_u=%.4g band=%d", row.t, dt, row.min_u, row.zero_count)
        if bounded:
            distance = _boundary_distance(grid, band)
            if distance is not None and distance < u.cap - band - 1e-12:
                if boundary_ok:
                    logger.warning("Zero band within cap of the grid boundary at t=%.4g", row.t)
                boundary_ok = False
        if extinction is None and row.zero_count == 0:
            extinction = row.t
            logger.info("Extinction at t=%.5f", extinction)
        if reached and grid.time in snapshot_times and grid.time > 0:
            snapshots.append(grid)
            if cfg.redistance_diagnostic:
                deviation[grid.time] = gradient_deviation(grid, band)
        if extinction is not None and cfg.stop_at_extinction:
            if snapshots[-1] is not grid:
                snapshots.append(grid)
            break

    estimate = extinction_estimate(rows, band) if extinction is not None else None
    logger.info("Flow end: t=%.5f steps=%d extinction=%s estimate=%s",
                rows[-1].t, len(rows) - 1, extinction, estimate)
    return FlowRecord(
        k=cfg.k, threshold=band, snapshots=snapshots, diagnostics=rows,
        extinction_time=extinction, extinction_estimate=estimate, boundary_ok=boundary_ok,
        gradient_deviation={t: v for t, v in deviation.items() if v is not None},
    )



# Checks

def avoidance_check(
    shape:Shape,
    p:np.ndarray,
    k:int,
    t:float,
    grid:GridSpec,
    cap:float|str="auto",
    **options
) -> CheckReport:
    """Compare u(p, t) with the ball-avoidance bound R - sqrt(2kt), R = dist(p, X)."""

    p = np.asarray(p, dtype=float)
    radius = float(shape.distance(p[None, :])[0])
    if not radius ** 2 > 2 * k * t:
        raise DomainError("Avoidance needs R² > 2kt", R=radius, k=k, t=t)
    room = float(min((p - grid.lower).min(), (grid.upper - p).min()))
    if room < radius:
        raise DomainError("p must sit at least R inside the grid", R=radius, margin=room)
    u = init_distance(shape, grid, cap)
    if u.cap < radius:
        raise DomainError("The cap must be at least dist(p, X)", cap=u.cap, R=radius)

    final = evolve(u, k, [t], **options)[-1] if t > 0 else u
    lhs = float(interpolate(final, p)[0])
    rhs = radius - np.sqrt(2 * k * t)
    slack = 3 * grid.h
    return CheckReport(
        check="avoidance", case=f"k={k},t={t:g}",
        metrics={"lhs": lhs, "rhs": float(rhs), "R": radius, "deficit": float(rhs - lhs)},
        bounds={"deficit": slack},
        passed=bool(lhs >= rhs - slack),
        notes=[f"slack = 3h = {slack:.6g}"],
    )



def _paired(u0:ScalarGrid, v0:ScalarGrid, k:int, t_end:float, **options) -> Iterator[tuple[ScalarGrid, ScalarGrid]]:
    """Flow two grids with a shared time step."""

    if not u0.same_grid(v0):
        raise DomainError("Both fields must live on the same grid")
    scheme = Scheme.for_grid(u0, k, **options)
    u, v = u0, v0
    while u.time < t_end - 1e-12:
        grad_u, hess_u = derivatives(u.data, u.h)
        grad_v, hess_v = derivatives(v.data, v.h)
        dt = scheme.dt or min(_auto_dt(grad_u, hess_u, scheme.eps_grad, u.h),
                              _auto_dt(grad_v, hess_v, scheme.eps_grad, v.h))
        remaining = t_end - u.time
        new_time = t_end if dt >= remaining else u.time + dt
        dt = min(dt, remaining)
        u = _advance(u, speed(grad_u, hess_u, k, scheme.eps_grad, scheme.envelope, scheme.n_dirs), dt, new_time)
        v = _advance(v, speed(grad_v, hess_v, k, scheme.eps_grad, scheme.envelope, scheme.n_dirs), dt, new_time)
        yield u, v



def contraction_check(u0:ScalarGrid, v0:ScalarGrid, k:int, t_end:float, **options) -> CheckReport:
    """Track ‖u - v‖_∞ of two flows; it must not increase beyond the slack
    1e-6 + h²(1 + t)."""

    start = float(np.abs(u0.data - v0.data).max())
    series = [{"t": 0.0, "sup_diff": start}]
    running_min, worst = start, 0.0
    for u, v in _paired(u0, v0, k, t_end, **options):
        diff = float(np.abs(u.data - v.data).max())
        slack = 1e-6 + u.h ** 2 * (1 + u.time)
        worst = max(worst, diff - running_min - slack)
        running_min = min(running_min, diff)
        series.append({"t": u.time, "sup_diff": diff})
    return CheckReport(
        check="contraction", case=f"k={k}",
        metrics={"initial": start, "final": series[-1]["sup_diff"], "excess": worst},
        bounds={"excess": 0.0},
        passed=bool(worst <= 0.0),
        notes=["slack = 1e-6 + h^2 (1 + t)"],
        series=series,
    )



def comparison_check(u0:ScalarGrid, v0:ScalarGrid, k:int, t_end:float, **options) -> CheckReport:
    """Ordered initial data u0 <= v0 must stay ordered up to 1e-9."""

    if np.any(u0.data > v0.data):
        raise DomainError("comparison_check needs u0 <= v0 at every node")
    violation = 0.0
    for u, v in _paired(u0, v0, k, t_end, **options):
        violation = max(violation, float((u.data - v.data).max()))
    return CheckReport(
        check="comparison", case=f"k={k}",
        metrics={"max_violation": violation},
        bounds={"max_violation": COMPARISON_TOLERANCE},
        passed=bool(violation <= COMPARISON_TOLERANCE),
    )
