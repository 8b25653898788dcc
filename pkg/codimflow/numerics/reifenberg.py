"""
Reifenberg flatness of point clouds and the smoothing construction X^r.

A set X is (δ, R)-Reifenberg flat when every ball B(x, r), x in X, r < R,
meets X within δr of some k-plane through x. At a scale r the smooth
approximation X^r is the zero set of

    η(y) = Q̃_y (y - Σ φ_i(y) p_i / Σ φ_i(y)),

where p_i is a maximal r/6-packing of X, Q_i the normal projector of the
fitted plane at p_i, O_y the φ-weighted mean of the Q_i and Q̃_y the
projector onto the top n - k eigenvectors of O_y. Zeros are found by Newton
iteration along the normal slices of the fitted planes.

"""

import logging
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError, cKDTree
from scipy.spatial.distance import pdist

from codimflow.models.clouds import NetPoints, PlaneBasis, PointCloud
from codimflow.models.linalg import SymMat
from codimflow.models.utils.base import Base
from codimflow.numerics.geomlin import jacobi_eigh
from codimflow.numerics.utils import cloud_curvature, cutoff, directed_hausdorff, hausdorff_distance, pca_frame
from codimflow.schemas.reports import CheckReport, ProfileRow
from codimflow.utils.workers import parallel_map
from core.errors import (
    ConvergenceError,
    DomainError,
    ResolutionError,
    SmallnessGuardError,
    SpectralGapError,
)



logger = logging.getLogger(__name__)

NET_SEED = 1729
GAP_HIGH, GAP_LOW = 0.6, 0.4
GUARD = 0.05
NEWTON_TOLERANCE = 1e-10
NEWTON_ITERATIONS = 50
NEWTON_FAIL_FRACTION = 0.01
CHUNK = 20000



# Planes and flatness

@lru_cache(maxsize=8)
def _disk_lattice(k:int, count:int=64) -> np.ndarray:
    """Points of (Z/count)^k in the closed unit ball."""

    axis = np.arange(-count, count + 1) / count
    mesh = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    lattice = mesh[np.linalg.norm(mesh, axis=1) <= 1.0]
    lattice.flags.writeable = False
    return lattice



def best_fit_plane(X:PointCloud, x:np.ndarray, r:float) -> PlaneBasis:
    """Principal-component k-plane of X ∩ B(x, r), translated through x."""

    x = np.asarray(x, dtype=float)
    points = X.points[X.tree.query_ball_point(x, r)]
    if len(points) < X.k + 1:
        raise DomainError("Too few points in B(x, r) for a plane",
                          x=tuple(np.round(x, 6)), r=r, points=len(points))
    try:
        _, tangent, normal, _ = pca_frame(points, X.k)
    except ResolutionError:
        raise DomainError("Degenerate covariance in B(x, r)", x=tuple(np.round(x, 6)), r=r)
    residual = float(np.abs((points - x) @ normal).max())
    return PlaneBasis(base=x, tangent=tangent, normal=normal, residual=residual)



def flatness(X:PointCloud, x:np.ndarray, r:float, plane:PlaneBasis|None=None) -> float:
    """δ̂(x, r) = d_H(B(x, r) ∩ P, B(x, r) ∩ X) / r for the fitted plane P.

    The plane side is a lattice of spacing r/64. The PCA plane is one
    admissible plane, so the value bounds the infimum over planes from above.
    """

    x = np.asarray(x, dtype=float)
    plane = plane if plane is not None else best_fit_plane(X, x, r)
    points = X.points[X.tree.query_ball_point(x, r)]
    disk = x + r * _disk_lattice(X.k) @ plane.tangent.T
    return hausdorff_distance(points, disk) / r



def _greedy_net(points:np.ndarray, separation:float) -> np.ndarray:
    """Indices of a maximal subset with pairwise distances >= separation,
    chosen greedily in a shuffled order with a fixed seed."""

    order = np.random.default_rng(NET_SEED).permutation(len(points))
    tree = cKDTree(points)
    radius = np.nextafter(separation, 0.0)
    blocked = np.zeros(len(points), dtype=bool)
    chosen = []
    for index in order:
        if blocked[index]:
            continue
        chosen.append(index)
        blocked[tree.query_ball_point(points[index], radius)] = True
    return np.asarray(chosen, dtype=int)



def scale_flatness(X:PointCloud, r:float) -> ProfileRow:
    """Largest flatness at scale r over an r/4-net of the points farther
    than r from the boundary of X."""

    interior = X.points[X.interior_mask(r)]
    if len(interior) == 0:
        return ProfileRow(scale=r, flatness=None, centers=0)
    centers = interior[_greedy_net(interior, r / 4)]
    values = parallel_map(lambda center: flatness(X, center, r), centers)
    return ProfileRow(scale=r, flatness=float(max(values)), centers=len(centers))



def reifenberg_profile(X:PointCloud, R:float, levels:int|None=None) -> list[ProfileRow]:
    """Max-over-net flatness at the dyadic scales R, R/2, ...

    Without `levels`, scales go down to the smallest r with resolution <= r/16.
    """

    resolution = X.resolution
    if levels is None:
        levels = max(1, int(np.floor(np.log2(R / (16 * resolution)))) + 1) if resolution > 0 else 1
    scales = [R / 2 ** i for i in range(levels)]
    if resolution > scales[-1] / 16:
        raise ResolutionError("Cloud too coarse for the smallest scale; densify the sample",
                              resolution=resolution, scale=scales[-1])
    rows = [scale_flatness(X, r) for r in scales]
    logger.debug("Flatness profile: %s", [(row.scale, row.flatness) for row in rows])
    return rows



def profile_max(rows:list[ProfileRow]) -> float:
    values = [row.flatness for row in rows if row.flatness is not None]
    return max(values) if values else 0.0



def guard_flatness(X:PointCloud, r:float) -> float:
    """δ̂ of the construction at scale r: profile max over r, 2r, 4r, 8r."""

    if X.resolution > r / 16:
        raise ResolutionError("Cloud too coarse for the guard scales; densify the sample",
                              resolution=X.resolution, scale=r)
    return profile_max([scale_flatness(X, r * 2 ** i) for i in range(4)])



# Koch-like curves

def _bend_normals(directions:np.ndarray, n:int, level:int) -> np.ndarray:
    if n == 2:
        return np.stack([-directions[:, 1], directions[:, 0]], axis=1)
    axis = np.zeros(n)
    axis[1 + level % 2] = 1.0
    normals = axis - (directions @ axis)[:, None] * directions
    norms = np.linalg.norm(normals, axis=1)
    weak = norms < 1e-8
    if weak.any():
        other = np.zeros(n)
        other[2 - level % 2] = 1.0
        normals[weak] = other - (directions[weak] @ other)[:, None] * directions[weak]
        norms[weak] = np.linalg.norm(normals[weak], axis=1)
    return normals / norms[:, None]



def koch_like_curve(theta:float, depth:int, n:int=2) -> PointCloud:
    """Iterated four-segment generator with bend angle θ, unit diameter.

    Every segment is replaced by four equal segments whose middle two are
    tilted by +θ and -θ. In R³ the bend plane alternates between the planes
    of e_y and e_z from one level to the next. Samples are spaced by at most
    4^-depth / 2; the endpoints are the boundary of the curve.
    """

    if not 0 <= theta < np.pi / 4:
        raise DomainError("The bend angle must lie in [0, pi/4)", theta=theta)
    if not 0 <= depth <= 10:
        raise DomainError("The depth must lie in [0, 10]", depth=depth)
    if n not in (2, 3):
        raise DomainError("Koch-like curves live in R^2 or R^3", n=n)

    vertices = np.zeros((2, n))
    vertices[1, 0] = 1.0
    for level in range(depth):
        a, b = vertices[:-1], vertices[1:]
        chord = b - a
        length = np.linalg.norm(chord, axis=1)
        direction = chord / length[:, None]
        normal = _bend_normals(direction, n, level)
        piece = (length / (2 + 2 * np.cos(theta)))[:, None]
        p1 = a + piece * direction
        p2 = p1 + piece * (np.cos(theta) * direction + np.sin(theta) * normal)
        p3 = p2 + piece * (np.cos(theta) * direction - np.sin(theta) * normal)
        refined = np.stack([a, p1, p2, p3], axis=1).reshape(-1, n)
        vertices = np.vstack([refined, vertices[-1:]])

    spacing = 0.5 * 4.0 ** -depth
    a, b = vertices[:-1], vertices[1:]
    parts = int(np.ceil(np.linalg.norm(b - a, axis=1).max() / spacing))
    s = (np.arange(parts) / parts)[None, :, None]
    points = (a[:, None, :] + s * (b - a)[:, None, :]).reshape(-1, n)
    points = np.vstack([points, vertices[-1:]])

    try:
        hull = points[ConvexHull(points).vertices]
        diameter = float(pdist(hull).max())
    except (QhullError, ValueError):
        diameter = float(np.linalg.norm(vertices[-1] - vertices[0]))
    points = (points - vertices[0]) / diameter
    boundary = np.stack([points[0], points[-1]])
    return PointCloud(n=n, k=1, points=points, boundary=boundary)



# Nets and the mollified field

def build_net(X:PointCloud, r:float) -> NetPoints:
    """Maximal r/6-packing of X with the normal projector of P_{p_i, r}."""

    if X.resolution > r / 12:
        raise ResolutionError("Cloud too coarse for the net; densify the sample",
                              resolution=X.resolution, scale=r)
    centers = X.points[_greedy_net(X.points, r / 3)]
    distances, _ = cKDTree(centers).query(X.points)
    if distances.max() > 2 * r:
        raise DomainError("Net does not cover the cloud", gap=float(distances.max()), r=r)
    planes = parallel_map(lambda center: best_fit_plane(X, center, r), centers)
    projectors = np.stack([plane.normal_projector for plane in planes])
    logger.debug("Net at r=%.4g: %d centers", r, len(centers))
    return NetPoints(scale=r, k=X.k, centers=centers, projectors=projectors, planes=planes)



def _eigen_split(values:np.ndarray, k:int) -> np.ndarray:
    """True where the spectrum separates the top n - k eigenvalues."""

    return (values[..., k] >= GAP_HIGH) & (values[..., k - 1] <= GAP_LOW)



def eigen_projection(O, n_minus_k:int) -> SymMat:
    """Projector onto the span of the top n - k eigenvectors of O."""

    eig = jacobi_eigh(O)
    n = eig.values.shape[-1]
    k = n - n_minus_k
    if not 1 <= n_minus_k < n or not _eigen_split(eig.values, k):
        raise SpectralGapError("No spectral gap between the normal and tangent eigenvalues",
                               spectrum=tuple(np.round(eig.values, 6)))
    top = eig.vectors[:, k:]
    return SymMat(entries=top @ top.T)



class MollifiedField:
    """O_y, Q̃_y and η(y) of a net, evaluated on batches of points.

    Only centers within 4r of y contribute. `max_contributors` records the
    largest number of nonzero weights met so far; it is expected to stay
    below 5^n.
    """

    def __init__(self, net:NetPoints):
        self.net = net
        self.max_contributors = 0
        self._cache = {}

    @property
    def contributor_bound(self) -> int:
        return 5 ** self.net.n

    def _weights(self, points:np.ndarray):
        r = self.net.scale
        lists = self.net.tree.query_ball_point(points, 4 * r)
        counts = np.fromiter((len(item) for item in lists), dtype=int, count=len(lists))
        rows = np.repeat(np.arange(len(points)), counts)
        cols = np.concatenate([np.asarray(item, dtype=int) for item in lists]) if counts.sum() else np.zeros(0, dtype=int)
        phi = cutoff(np.linalg.norm(points[rows] - self.net.centers[cols], axis=1) / (2 * r))
        keep = phi > 0
        rows, cols, phi = rows[keep], cols[keep], phi[keep]
        contributors = np.bincount(rows, minlength=len(points))
        if len(contributors) and contributors.max() > self.max_contributors:
            self.max_contributors = int(contributors.max())
            if self.max_contributors > self.contributor_bound:
                logger.warning("%d contributors exceed the bound 5^n", self.max_contributors)
        return rows, cols, phi

    def _evaluate_chunk(self, points:np.ndarray):
        m, n = points.shape
        k = self.net.k
        rows, cols, phi = self._weights(points)
        sums = np.bincount(rows, weights=phi, minlength=m)
        weighted = phi[:, None] * self.net.projectors[cols].reshape(len(cols), n * n)
        O = np.stack([np.bincount(rows, weights=weighted[:, e], minlength=m)
                      for e in range(n * n)], axis=1).reshape(m, n, n)
        mean = np.stack([np.bincount(rows, weights=phi * self.net.centers[cols, e], minlength=m)
                         for e in range(n)], axis=1)
        inside = sums > 0
        O[inside] /= sums[inside, None, None]
        mean[inside] /= sums[inside, None]

        Q = np.zeros((m, n, n))
        values = np.full((m, n), np.nan)
        ok = inside.copy()
        if inside.any():
            eig = jacobi_eigh(O[inside])
            top = eig.vectors[..., k:]
            Q[inside] = top @ np.swapaxes(top, -1, -2)
            values[inside] = eig.values
            ok[inside] = _eigen_split(eig.values, k)
        eta = np.einsum("mij,mj->mi", Q, points - mean)
        return O, Q, eta, sums, values, ok

    def evaluate(self, points:np.ndarray):
        """Return (O, Q̃, η, weight sums, spectra, ok) for a batch of points.

        `ok` is false outside the mollified neighbourhood and where the
        spectral gap fails; Q̃ and η are meaningless there.
        """

        points = np.atleast_2d(np.asarray(points, dtype=float))
        parts = [self._evaluate_chunk(points[i:i + CHUNK]) for i in range(0, len(points), CHUNK)]
        return tuple(np.concatenate(items) for items in zip(*parts))

    def _single(self, y:np.ndarray):
        key = tuple(np.asarray(y, dtype=float))
        if key not in self._cache:
            self._cache[key] = tuple(item[0] for item in self.evaluate(np.asarray(key)[None, :]))
        return self._cache[key]

    def projection(self, y:np.ndarray) -> tuple[SymMat, float]:
        O, _, _, total, _, _ = self._single(y)
        if total <= 0:
            raise DomainError("Point outside the mollified neighbourhood", y=tuple(np.round(y, 6)))
        return SymMat(entries=O), float(total)

    def eigen(self, y:np.ndarray) -> SymMat:
        _, Q, _, total, values, ok = self._single(y)
        if total <= 0:
            raise DomainError("Point outside the mollified neighbourhood", y=tuple(np.round(y, 6)))
        if not ok:
            raise SpectralGapError("No spectral gap in O_y", spectrum=tuple(np.round(values, 6)))
        return SymMat(entries=Q)

    def eta(self, y:np.ndarray) -> np.ndarray:
        self.eigen(y)
        return self._single(y)[2]



def mollified_projection(net:NetPoints, y:np.ndarray) -> tuple[SymMat, float]:
    """O_y and the weight sum Σ φ_i(y)."""

    return MollifiedField(net).projection(y)



def eta(net:NetPoints, y:np.ndarray) -> np.ndarray:
    """η(y) in ambient coordinates."""

    return MollifiedField(net).eta(y)



# Construction of X^r

class Approximation(Base):
    """X^r with the quantities of its construction.

    Attributes:
      - cloud (PointCloud): the points of X^r.
      - scale (float): r.
      - seed_spacing (float): lattice spacing of the Newton seeds.
      - delta (float): guard flatness δ̂ (profile max over r, ..., 8r).
      - fail_fraction (float): share of seeds whose Newton iteration failed.
      - net (NetPoints): the packing the construction used.
      - max_contributors (int): largest number of nonzero weights met.
    """

    cloud: PointCloud
    scale: float
    seed_spacing: float
    delta: float
    fail_fraction: float
    net: NetPoints
    max_contributors: int



def _seed_lattice(net:NetPoints, spacing:float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeds x + T c, c in (spacing·Z)^k ∩ B(0, r), for every net center."""

    steps = int(np.floor(net.scale / spacing))
    axis = spacing * np.arange(-steps, steps + 1)
    mesh = np.stack(np.meshgrid(*([axis] * net.k), indexing="ij"), axis=-1).reshape(-1, net.k)
    coords = mesh[np.linalg.norm(mesh, axis=1) <= net.scale * (1 + 1e-12)]
    tangents = np.stack([plane.tangent for plane in net.planes])
    normals = np.stack([plane.normal for plane in net.planes])
    seeds = net.centers[:, None, :] + np.einsum("cj,lnj->lcn", coords, tangents)
    owners = np.repeat(np.arange(len(net)), len(coords))
    return seeds.reshape(-1, net.n), normals[owners], owners



def _newton(field:MollifiedField, seeds:np.ndarray, normals:np.ndarray, r:float):
    """Solve N_xᵀ η(x' + N_x s) = 0 for every seed x', starting at s = 0."""

    count, _, c = normals.shape
    sigma = np.zeros((count, c))
    active = np.ones(count, dtype=bool)
    converged = np.zeros(count, dtype=bool)
    h = 1e-6 * r
    tolerance = NEWTON_TOLERANCE * r

    for _ in range(NEWTON_ITERATIONS):
        index = np.flatnonzero(active)
        if len(index) == 0:
            break
        frames = normals[index]
        y = seeds[index] + np.einsum("snc,sc->sn", frames, sigma[index])
        _, _, eta_y, _, _, ok = field.evaluate(y)
        residual = np.einsum("snc,sn->sc", frames, eta_y)
        done = ok & (np.linalg.norm(residual, axis=1) <= tolerance)
        converged[index[done]] = True
        active[index[done | ~ok]] = False
        todo = ok & ~done
        if not todo.any():
            continue

        frames, y, residual = frames[todo], y[todo], residual[todo]
        shifts = h * np.swapaxes(frames, 1, 2)
        probes = np.concatenate([y[:, None, :] + shifts, y[:, None, :] - shifts], axis=1)
        _, _, eta_p, _, _, ok_p = field.evaluate(probes.reshape(-1, y.shape[1]))
        eta_p = eta_p.reshape(len(y), 2 * c, -1)
        g = np.einsum("snc,sjn->sjc", frames, eta_p)
        jacobian = np.swapaxes((g[:, :c] - g[:, c:]) / (2 * h), 1, 2)
        probes_ok = ok_p.reshape(len(y), 2 * c).all(axis=1)
        delta = np.einsum("sij,sj->si", np.linalg.pinv(jacobian), residual)
        moving = index[todo]
        sigma[moving] -= np.where(probes_ok[:, None], delta, 0.0)
        active[moving[~probes_ok]] = False

    points = seeds + np.einsum("snc,sc->sn", normals, sigma)
    return points, converged



def _deduplicate(points:np.ndarray, radius:float) -> np.ndarray:
    """Keep points in lexicographic order, dropping those closer than
    `radius` to a kept one."""

    ordered = points[np.lexsort(points.T[::-1])]
    tree = cKDTree(ordered)
    blocked = np.zeros(len(ordered), dtype=bool)
    kept = []
    for index in range(len(ordered)):
        if blocked[index]:
            continue
        kept.append(index)
        blocked[tree.query_ball_point(ordered[index], np.nextafter(radius, 0.0))] = True
    return ordered[kept]



def construct_approximation(
    X:PointCloud,
    r:float,
    seed_spacing:float|None=None,
    guard:float=GUARD
) -> Approximation:
    """Build X^r and keep the quantities of the construction."""

    seed = seed_spacing if seed_spacing is not None else r / 10
    delta = guard_flatness(X, r)
    if not delta < guard:
        raise SmallnessGuardError("Flatness profile above the construction guard",
                                  profile_max=delta, guard=guard, scale=r)
    net = build_net(X, r)
    field = MollifiedField(net)
    seeds, normals, owners = _seed_lattice(net, seed)
    points, converged = _newton(field, seeds, normals, r)
    converged &= np.linalg.norm(points - net.centers[owners], axis=1) <= 2 * r
    fail_fraction = float(1 - converged.mean())
    if fail_fraction > NEWTON_FAIL_FRACTION:
        raise ConvergenceError("Newton failed at too many seeds",
                               fail_fraction=fail_fraction, scale=r)
    points = _deduplicate(points[converged], seed / 2)
    logger.info("X^r at r=%.4g: %d points, delta=%.4g, newton failures %.2f%%",
                r, len(points), delta, 100 * fail_fraction)
    cloud = PointCloud(n=X.n, k=X.k, points=points, scales=np.full(len(points), r),
                       boundary=X.boundary)
    return Approximation(cloud=cloud, scale=r, seed_spacing=seed, delta=delta,
                         fail_fraction=fail_fraction, net=net,
                         max_contributors=field.max_contributors)



def approximate_manifold(
    X:PointCloud,
    r:float,
    seed_spacing:float|None=None,
    guard:float=GUARD
) -> PointCloud:
    """The smooth k-dimensional approximation X^r of X at scale r."""

    return construct_approximation(X, r, seed_spacing, guard).cloud



# Verification

def connectivity_ok(X:PointCloud, Xr:PointCloud, r:float, seed_spacing:float, delta:float) -> bool:
    """Inside every probed B(x, r) exactly one component of X^r meets
    B(x, (1 - 10δ̂)r); the other components stay in the annulus.

    Components use edges between points closer than twice the seed spacing.
    """

    probes = X.points[X.interior_mask(r)]
    if len(probes) == 0:
        probes = X.points
    probes = probes[_greedy_net(probes, r / 2)]
    inner = max((1 - 10 * delta) * r, 2 * seed_spacing)
    for x in probes:
        index = Xr.tree.query_ball_point(x, r)
        if not index:
            return False
        local = Xr.points[index]
        pairs = cKDTree(local).query_pairs(2 * seed_spacing, output_type="ndarray")
        graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                           shape=(len(local), len(local)))
        _, labels = connected_components(graph, directed=False)
        meeting = np.unique(labels[np.linalg.norm(local - x, axis=1) < inner])
        if len(meeting) != 1:
            return False
    return True



def verify_approx(
    X:PointCloud,
    Xr:PointCloud,
    r:float,
    seed_spacing:float|None=None,
    delta:float|None=None,
    dh_tolerance:float=0.02,
    curvature_tolerance:float=0.02
) -> CheckReport:
    """Distance, curvature and connectivity of X^r against X.

    Points within 2r of the boundary of X are left out of the distance and
    curvature measurements.
    """

    if Xr.empty:
        raise DomainError("X^r is empty")
    seed = seed_spacing if seed_spacing is not None else r / 10
    delta = delta if delta is not None else guard_flatness(X, r)
    inner_x = X.points[X.interior_mask(2 * r)]
    inner_xr = Xr.points[Xr.interior_mask(2 * r)]
    inner_x = inner_x if len(inner_x) else X.points
    inner_xr = inner_xr if len(inner_xr) else Xr.points

    dh_ratio = max(directed_hausdorff(inner_x, Xr.points, Xr.tree),
                   directed_hausdorff(inner_xr, X.points, X.tree)) / r
    curvature = cloud_curvature(Xr.points, Xr.k, 3 * seed, centers=inner_xr)
    curvature_r = float(np.nanmax(curvature) * r) if np.isfinite(curvature).any() else float("nan")
    connected = connectivity_ok(X, Xr, r, seed, delta)
    passed = bool(dh_ratio <= dh_tolerance and curvature_r <= curvature_tolerance and connected)
    return CheckReport(
        check="approx", case=f"r={r:g}",
        metrics={"dH_ratio": float(dh_ratio), "max_curvature_times_r": curvature_r,
                 "connectivity_ok": connected, "delta": float(delta)},
        bounds={"dH_ratio": dh_tolerance, "max_curvature_times_r": curvature_tolerance},
        passed=passed,
        notes=[f"curvature fits over 3 x seed spacing = {3 * seed:.4g}",
               "connectivity inner radius max((1 - 10 delta) r, 2 x seed spacing)"],
    )



def cross_scale_graph_check(
    X:PointCloud,
    r:float,
    seed_ratio:float=0.1,
    guard:float=GUARD,
    coarse:Approximation|None=None,
    fine:Approximation|None=None
) -> CheckReport:
    """X^{r/4} as a normal graph over X^r with offsets at most 2δ̂r."""

    coarse = coarse if coarse is not None else construct_approximation(X, r, seed_ratio * r, guard)
    fine = fine if fine is not None else construct_approximation(X, r / 4, seed_ratio * r / 4, guard)
    inside = fine.cloud.interior_mask(2 * r)
    q = fine.cloud.points[inside] if inside.any() else fine.cloud.points
    _, nearest = coarse.cloud.tree.query(q)
    p = coarse.cloud.points[nearest]
    _, Q, _, _, _, ok = MollifiedField(coarse.net).evaluate(p)
    normal_part = np.einsum("mij,mj->mi", Q, q - p)
    offsets = np.linalg.norm(normal_part, axis=1)
    footpoints = q - normal_part

    spacing = fine.seed_spacing
    pairs = cKDTree(footpoints).query_pairs(spacing / 4, output_type="ndarray")
    injective = bool(len(pairs) == 0 or
                     np.all(np.linalg.norm(q[pairs[:, 0]] - q[pairs[:, 1]], axis=1) < spacing))
    bound = 2 * coarse.delta * r
    max_offset = float(offsets[ok].max()) if ok.any() else float("nan")
    passed = bool(ok.all() and max_offset <= bound and injective)
    return CheckReport(
        check="cross_scale", case=f"r={r:g}",
        metrics={"max_offset": max_offset, "injective": injective,
                 "delta": coarse.delta, "points": int(len(q))},
        bounds={"max_offset": bound},
        passed=passed,
    )
