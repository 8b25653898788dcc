"""
Graphical mean curvature flow of u: B^k -> R^m, m = n - k,

    ∂_t u = g^{ij}(Du) ∂²u/∂x_i∂x_j,   g_ij = δ_ij + <u_i, u_j>,

and the measurements built on it: the second fundamental form of graphs,
the interpolation bound for patches of bounded curvature, the small-data
curvature estimate, weighted parabolic seminorms, the size of the
nonlinearity N = (g^{ij} - δ^{ij}) u_ij and the curvature extension law.

"""

import logging

import numpy as np

from codimflow.models.flows import AnalyticFlow
from codimflow.models.grids import CurvatureSample, GraphField, GraphPatch
from codimflow.models.linalg import SymMat
from codimflow.models.records import GraphHistory
from codimflow.models.utils.enums import BoundaryMode, FlowFamily
from codimflow.numerics.levelset import derivatives, run_flow
from codimflow.schemas.flows import FlowConfig, GridSpec
from codimflow.schemas.reports import CheckReport, Nonlinearity, Seminorms
from codimflow.utils.workers import parallel_map
from core.errors import CodimflowError, DomainError, NumericalError



logger = logging.getLogger(__name__)

HOLDER_ALPHA = 0.5
HOLDER_PAIRS = 4096
HOLDER_SEED = 2024
TAU0 = 1e-7
CURVATURE_TOLERANCE = 1e-3
ALPHA_BETA_GUARD = 0.05
EXHAUSTIVE_LIMIT = 5_000_000



# Metric and derivatives

def _inverse_metric(du:np.ndarray) -> np.ndarray:
    k = du.shape[-2]
    metric = np.eye(k) + du @ np.swapaxes(du, -1, -2)
    if k == 1:
        return 1.0 / metric
    if k == 2:
        a, b, c = metric[..., 0, 0], metric[..., 1, 1], metric[..., 0, 1]
        det = (a * b - c * c)[..., None, None]
        rows = [np.stack([b, -c], axis=-1), np.stack([-c, a], axis=-1)]
        return np.stack(rows, axis=-2) / det
    return np.linalg.inv(metric)



def inverse_metric(du) -> SymMat|np.ndarray:
    """g^{ij} = (δ_kl + <u_k, u_l>)^{-1} for a k x m gradient block.

    Stacks of blocks in the leading axes give a stack of inverses.
    """

    du = np.asarray(du, dtype=float)
    if du.ndim < 2:
        raise DomainError("The gradient block must have shape (..., k, m)", shape=du.shape)
    inverse = _inverse_metric(du)
    return SymMat(entries=inverse) if inverse.ndim == 2 else inverse



def _interior(u:GraphField) -> tuple[slice, ...]:
    if u.boundary == BoundaryMode.PERIODIC:
        return (slice(None),) * u.k
    return (slice(1, -1),) * u.k



def graph_derivatives(u:GraphField) -> tuple[np.ndarray, np.ndarray]:
    """Du and D²u by central differences, shapes (*nodes, k, m) and
    (*nodes, k, k, m).

    Periodic fields get every node; Dirichlet fields the interior ones.
    """

    values = u.values
    if u.boundary == BoundaryMode.PERIODIC:
        values = np.pad(values, [(1, 1)] * u.k + [(0, 0)], mode="wrap")
    parts = [derivatives(values[..., j], u.h) for j in range(u.m)]
    du = np.stack([grad for grad, _ in parts], axis=-1)
    d2u = np.stack([hess for _, hess in parts], axis=-1)
    return du, d2u



def gradient_norms(du:np.ndarray) -> np.ndarray:
    """Operator norm of every gradient block: the tangent of the largest
    angle between the graph and the domain plane."""

    return np.linalg.norm(du, ord=2, axis=(-2, -1))



def gradient_sup(u:GraphField) -> float:
    du, _ = graph_derivatives(u)
    return float(gradient_norms(du).max())



# Flow

def max_graph_dt(u:GraphField) -> float:
    """h²/(4k); the inverse metric has spectrum in (0, 1]."""

    return u.h ** 2 / (4 * u.k)



def _advance_graph(u:GraphField, dt:float, new_time:float) -> GraphField:
    du, d2u = graph_derivatives(u)
    increment = np.einsum("...ij,...ijm->...m", _inverse_metric(du), d2u)
    values = np.array(u.values)
    values[_interior(u)] += dt * increment
    bad = ~np.isfinite(values)
    if bad.any():
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NumericalError("Non-finite value produced by a graph step", node=node, time=u.time)
    return u.with_values(values, new_time)



def graph_step(u:GraphField, dt:float) -> GraphField:
    """One explicit step u + dt·g^{ij} u_ij. Dirichlet boundaries keep their
    initial trace."""

    if not 0 < dt <= max_graph_dt(u) * (1 + 1e-12):
        raise DomainError("The graph step needs 0 < dt <= h²/(4k)", dt=dt, limit=max_graph_dt(u))
    return _advance_graph(u, dt, u.time + dt)



def graph_flow(
    u:GraphField,
    t_end:float,
    snapshots:list[float]|None=None,
    dt:float|None=None
) -> GraphHistory:
    """Flow u to t_end, keeping the fields at the snapshot times and the
    gradient sup after every step."""

    dt = dt if dt is not None else max_graph_dt(u)
    if not 0 < dt <= max_graph_dt(u) * (1 + 1e-12):
        raise DomainError("The graph step needs 0 < dt <= h²/(4k)", dt=dt, limit=max_graph_dt(u))
    targets = sorted({t for t in (snapshots or []) if 0 < t < t_end} | {t_end})
    kept, norms, steps = [u], [(u.time, gradient_sup(u))], 0
    for target in targets:
        while u.time < target - 1e-12:
            remaining = target - u.time
            new_time = target if dt >= remaining else u.time + dt
            u = _advance_graph(u, min(dt, remaining), new_time)
            norms.append((u.time, gradient_sup(u)))
            steps += 1
        kept.append(u)
    logger.debug("Graph flow: %d steps to t=%.4g", steps, u.time)
    return GraphHistory(snapshots=kept, gradient_norms=norms, steps=steps)



# Second fundamental form

def _second_form(du:np.ndarray, d2u:np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """|A| and A(e_i, e_j) as ambient normal vectors for stacks of nodes.

    The graph is F(x) = (x, u(x)) with tangent frame F_i = (e_i, u_i) and
    second derivatives F_ij = (0, u_ij); A_ij is the normal part of F_ij.
    """

    k, m = du.shape[-2:]
    n = k + m
    frame = np.zeros(du.shape[:-2] + (n, k))
    frame[..., :k, :] = np.eye(k)
    frame[..., k:, :] = np.swapaxes(du, -1, -2)
    g = _inverse_metric(du)
    normal = np.eye(n) - frame @ g @ np.swapaxes(frame, -1, -2)
    hess = np.zeros(d2u.shape[:-1] + (n,))
    hess[..., k:] = d2u
    form = np.einsum("...ab,...ijb->...ija", normal, hess)
    squared = np.einsum("...ip,...jq,...ija,...pqa->...", g, g, form, form)
    return np.sqrt(np.maximum(squared, 0.0)), form



def second_fundamental_form(u:GraphField, x) -> CurvatureSample:
    """|A| at the node nearest to x, which must lie 2h inside the domain."""

    x = np.atleast_1d(np.asarray(x, dtype=float))
    index = np.rint((x - u.origin) / u.h).astype(int)
    shape = np.asarray(u.shape)
    if u.boundary == BoundaryMode.PERIODIC:
        index %= shape
        node = tuple(index)
    else:
        if np.any(index < 2) or np.any(index > shape - 3):
            raise DomainError("The point is closer than 2h to the domain boundary",
                              x=tuple(np.round(x, 6)), h=u.h)
        node = tuple(index - 1)
    du, d2u = graph_derivatives(u)
    norm, form = _second_form(du[node][None], d2u[node][None])
    return CurvatureSample(location=u.coordinates[tuple(index)], norm=float(norm[0]), form=form[0])



def curvature_field(u:GraphField) -> np.ndarray:
    """|A| at every node; NaN for nodes closer than 2h to a Dirichlet
    boundary."""

    du, d2u = graph_derivatives(u)
    norms, _ = _second_form(du, d2u)
    if u.boundary == BoundaryMode.PERIODIC:
        return norms
    field = np.full(u.shape, np.nan)
    field[(slice(2, -2),) * u.k] = norms[(slice(1, -1),) * u.k]
    return field



# Patch library

def _ball_grid(k:int, r:float, h:float) -> tuple[np.ndarray, float]:
    """Nodes of [-r, r]^k with the center and the faces on the grid."""

    cells = max(4, int(round(r / h)))
    h = r / cells
    axis = -r + h * np.arange(2 * cells + 1)
    return np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1), h



def _field(values:np.ndarray, r:float, h:float, boundary=BoundaryMode.DIRICHLET) -> GraphField:
    k = values.ndim - 1
    return GraphField(k=k, m=values.shape[-1], origin=np.full(k, -r),
                      shape=values.shape[:-1], h=h, values=values, boundary=boundary)



def _fitted(profile:np.ndarray, alpha:float, beta:float, r:float, h:float) -> np.ndarray:
    """Rescale a profile so that ‖D²u‖ <= 0.999 α/r and |u_j| <= βr.

    |A| never exceeds the Frobenius norm of D²u for graphs.
    """

    _, d2u = graph_derivatives(_field(profile, r, h))
    second = np.sqrt((d2u ** 2).sum(axis=(-3, -2, -1))).max()
    height = np.abs(profile).max()
    scale = min(beta * r / height, 0.999 * alpha / r / second)
    return scale * profile



def arc_wave(x:np.ndarray, alpha:float, beta:float, r:float) -> np.ndarray:
    """C¹ wave of circle arcs of radius r/α between heights -βr and βr.

    It rises through 0 at x = 0 with the steepest slope an embedded curve
    with these bounds can have, sqrt(2αβ - α²β²)/(1 - αβ).
    """

    radius = r / alpha
    half = np.sqrt(2 * radius * beta * r - (beta * r) ** 2)
    s = np.mod(x, 4 * half) - half
    top = beta * r - radius + np.sqrt(np.maximum(radius ** 2 - s ** 2, 0.0))
    bottom = -beta * r + radius - np.sqrt(np.maximum(radius ** 2 - (s - 2 * half) ** 2, 0.0))
    return np.where(s <= half, top, bottom)



def patch_library(alpha:float, beta:float, r:float=1.0, h1:float|None=None, h2:float|None=None) -> list[GraphPatch]:
    """Graphs over B^k(0, r) with |A| <= α/r inside the slab |u_j| <= βr.

    Flats, a tilt, circle-arc waves, sinusoids, a bump, helices and
    two-dimensional waves, in codimension one and two.
    """

    X1, h1 = _ball_grid(1, r, h1 if h1 is not None else r / 400)
    X2, h2 = _ball_grid(2, r, h2 if h2 is not None else r / 40)
    x = X1[..., 0]
    x2, y2 = X2[..., 0], X2[..., 1]
    wave = arc_wave(x, alpha, beta, r)
    one = lambda name, values: GraphPatch(name=name, field=_field(values, r, h1), scale=r)
    two = lambda name, values: GraphPatch(name=name, field=_field(values, r, h2), scale=r)
    fit1 = lambda profile: _fitted(profile, alpha, beta, r, h1)
    fit2 = lambda profile: _fitted(profile, alpha, beta, r, h2)

    return [
        one("flat", np.zeros(x.shape + (1,))),
        one("tilt", (beta * x)[..., None]),
        one("arc_wave", wave[..., None]),
        one("arc_wave_codim2", wave[..., None] * np.array([0.6, 0.8])),
        one("sine", fit1(np.sin(3 * np.pi * x / r)[..., None])),
        one("bump", fit1(np.exp(-x ** 2 / (2 * (0.3 * r) ** 2))[..., None])),
        one("helix", fit1(np.stack([np.cos(4 * np.pi * x / r), np.sin(4 * np.pi * x / r)], axis=-1))),
        one("tilted_helix", fit1(np.stack([x / r + 0.3 * np.cos(4 * np.pi * x / r),
                                           0.3 * np.sin(4 * np.pi * x / r)], axis=-1))),
        two("flat2d", np.zeros(x2.shape + (1,))),
        two("wave2d", fit2((np.sin(np.pi * x2 / r) * np.sin(np.pi * y2 / r))[..., None])),
        two("saddle", fit2((x2 * y2)[..., None])),
        two("wave2d_codim2", fit2(np.stack([np.sin(np.pi * x2 / r) * np.cos(np.pi * y2 / r),
                                            np.cos(np.pi * x2 / r) * np.sin(np.pi * y2 / r)], axis=-1))),
    ]



def interpolation_check(
    alpha:float,
    beta:float,
    r:float=1.0,
    delta:float=0.1,
    patches:list[GraphPatch]|None=None
) -> CheckReport:
    """Largest slope over B^k(0, (1 - δ)r) against sqrt(3αβ) on every patch.

    Patches whose measured curvature or height breaks the hypotheses are
    excluded with a note.
    """

    if not (alpha > 0 and beta > 0):
        raise DomainError("alpha and beta must be positive", alpha=alpha, beta=beta)
    if alpha * beta >= ALPHA_BETA_GUARD:
        raise DomainError("alpha * beta is above the interpolation guard",
                          alpha_beta=alpha * beta, guard=ALPHA_BETA_GUARD)
    patches = patches if patches is not None else patch_library(alpha, beta, r)
    bound = float(np.sqrt(3 * alpha * beta))
    circle = float(np.sqrt(2 * alpha * beta - (alpha * beta) ** 2) / (1 - alpha * beta))

    series, notes = [], []
    for patch in patches:
        field, scale = patch.field, patch.scale
        distance = np.linalg.norm(field.coordinates - field.center, axis=-1)
        inside = distance <= scale + 1e-12
        curvature = curvature_field(field)
        max_curvature = float(np.nanmax(np.where(inside, curvature, np.nan)))
        height = float(np.abs(field.values[inside]).max())
        if height > beta * scale * (1 + 1e-12) or max_curvature > alpha / scale * (1 + CURVATURE_TOLERANCE):
            notes.append(f"{patch.name} excluded: height {height:.4g}, |A| {max_curvature:.4g}")
            logger.warning("Patch %s breaks the hypotheses and is excluded", patch.name)
            continue
        du, _ = graph_derivatives(field)
        inner = distance[_interior(field)] <= (1 - delta) * scale
        slope = float(gradient_norms(du)[inner].max())
        series.append({"patch": patch.name, "k": field.k, "m": field.m, "max_slope": slope,
                       "max_curvature_r": max_curvature * scale, "bound": bound,
                       "passed": slope <= bound})

    violations = sum(not row["passed"] for row in series)
    slopes = {row["patch"]: row["max_slope"] for row in series}
    return CheckReport(
        check="interpolation", case=f"alpha={alpha:g},beta={beta:g}",
        metrics={"max_slope": max(slopes.values(), default=0.0), "circle_bound": circle,
                 "extremal_slope": slopes.get("arc_wave"), "patches": len(series),
                 "excluded": len(patches) - len(series), "violations": violations},
        bounds={"max_slope": bound},
        passed=bool(series) and violations == 0,
        notes=notes + [f"inner radius (1 - {delta:g}) r", f"curvature tolerance {CURVATURE_TOLERANCE:g}"],
        series=series,
    )



# Small data

def small_data_initial(
    eps:float,
    tau:float,
    rng:np.random.Generator,
    r:float=1.0,
    k:int=1,
    m:int=1,
    beta:float|None=None,
    h:float|None=None,
    modes:int=4
) -> GraphField:
    """Random sine sums on [-r, r]^k with ‖∇u₀‖_∞ <= ε and |u₀| <= βr.

    Every mode vanishes with its Laplacian on the boundary, so the frozen
    Dirichlet trace is consistent with the flow. β defaults to ε·sqrt(τ).
    """

    beta = beta if beta is not None else eps * np.sqrt(tau)
    X, h = _ball_grid(k, r, h if h is not None else r / (100 if k == 1 else 32))
    profile = np.zeros(X.shape[:-1] + (m,))
    for j in range(m):
        for _ in range(modes):
            q = rng.integers(1, modes + 1, size=k)
            term = np.prod(np.sin(q * np.pi * (X + r) / (2 * r)), axis=-1)
            profile[..., j] += rng.normal() / q.sum() ** 2 * term
    if eps == 0 or not np.abs(profile).max() > 0:
        return _field(np.zeros_like(profile), r, h)
    field = _field(profile, r, h)
    scale = min(eps / gradient_sup(field), beta * r / np.abs(profile).max())
    return field.with_values(scale * profile, 0.0)



def _center_curvature(u:GraphField) -> float:
    return second_fundamental_form(u, u.center).norm



def small_data_estimate_experiment(
    eps:float,
    tau:float,
    r:float=1.0,
    M:float=1.1,
    trials:int=20,
    k:int=1,
    m:int=1,
    beta:float|None=None,
    h:float|None=None,
    seed:int=0
) -> CheckReport:
    """|A(p, τr²)| after flowing random small data, against ε/(sqrt(τ) r).

    The ratio |A|·sqrt(τ)·r/ε must stay at most 2 over the trials, and the
    gradient may grow by at most the factor M.
    """

    if not 0 <= eps <= 0.05 or not 0 < tau <= 0.1:
        raise DomainError("Small data needs 0 <= eps <= 0.05 and 0 < tau <= 0.1", eps=eps, tau=tau)

    def trial(index:int) -> dict:
        rng = np.random.default_rng([seed, index])
        u0 = small_data_initial(eps, tau, rng, r, k, m, beta, h)
        try:
            history = graph_flow(u0, tau * r ** 2)
        except NumericalError as error:
            logger.warning("Trial %d aborted: %s", index, error)
            return {"trial": index, "curvature": None, "ratio": None, "growth": None, "aborted": True}
        curvature = _center_curvature(history.final)
        ratio = curvature * np.sqrt(tau) * r / eps if eps > 0 else 0.0
        return {"trial": index, "curvature": curvature, "ratio": ratio,
                "growth": history.gradient_growth(), "aborted": False}

    series = parallel_map(trial, range(trials))
    done = [row for row in series if not row["aborted"]]
    max_ratio = max((row["ratio"] for row in done), default=0.0)
    growth = max((row["growth"] for row in done), default=0.0)
    aborted = len(series) - len(done)
    return CheckReport(
        check="small_data", case=f"k={k},m={m},eps={eps:g},tau={tau:g}",
        metrics={"max_ratio": max_ratio,
                 "mean_ratio": float(np.mean([row["ratio"] for row in done])) if done else 0.0,
                 "max_ratio_to_heat_bound": max_ratio * np.sqrt(np.pi),
                 "max_gradient_growth": growth, "aborted": aborted, "trials": trials},
        bounds={"max_ratio": 2.0, "max_gradient_growth": M},
        passed=bool(max_ratio <= 2.0 and growth <= M and aborted == 0),
        notes=["beta = eps * sqrt(tau) unless given",
               "ratio <= 2 is a desk-scale tolerance; the asymptotic constant is 1/sqrt(pi)"],
        series=series,
    )



# Weighted seminorms

def _samples(source:GraphHistory|GraphField, tau0:float):
    """Space-time nodes of the shrunken cylinder with their derivatives and
    their parabolic distance to the boundary of B(p, r) x [0, T]."""

    fields = source.snapshots if isinstance(source, GraphHistory) else [source]
    spatial_only = isinstance(source, GraphField)
    first = fields[0]
    if not spatial_only and first.time != 0:
        raise DomainError("The history must start at t = 0", time=first.time)
    center, radius = first.center, first.radius
    shrunk = (1 - 1000 * np.sqrt(tau0)) * radius

    x, t, du, d2u, weight = [], [], [], [], []
    for field in fields:
        grad, hess = graph_derivatives(field)
        coords = field.coordinates[_interior(field)]
        distance = np.linalg.norm(coords - center, axis=-1)
        mask = distance <= shrunk
        lateral = radius - distance[mask]
        x.append(coords[mask])
        t.append(np.full(mask.sum(), field.time))
        du.append(grad[mask])
        d2u.append(hess[mask])
        weight.append(lateral if spatial_only else np.minimum(lateral, np.sqrt(field.time)))
    return tuple(np.concatenate(part) for part in (x, t, du, d2u, weight))



def _pairs(count:int, pairs:int, exhaustive:bool, seed:int) -> tuple[np.ndarray, np.ndarray]:
    if exhaustive:
        if count * (count - 1) // 2 > EXHAUSTIVE_LIMIT:
            raise DomainError("Too many samples for exhaustive pairs", samples=count)
        return np.triu_indices(count, k=1)
    rng = np.random.default_rng(seed)
    i, j = rng.integers(count, size=pairs), rng.integers(count, size=pairs)
    keep = i != j
    return i[keep], j[keep]



def _holder(values:np.ndarray, x:np.ndarray, t:np.ndarray, weight:np.ndarray,
            i:np.ndarray, j:np.ndarray, alpha:float, power:float) -> float:
    """sup d_{z1,z2}^power ‖f(z1) - f(z2)‖ / d(z1, z2)^α over the pairs."""

    if len(i) == 0:
        return 0.0
    distance = np.sqrt(((x[i] - x[j]) ** 2).sum(axis=-1) + np.abs(t[i] - t[j]))
    difference = np.sqrt(((values[i] - values[j]) ** 2).reshape(len(i), -1).sum(axis=-1))
    ok = distance > 0
    scaled = np.minimum(weight[i], weight[j])[ok] ** power * difference[ok] / distance[ok] ** alpha
    return float(scaled.max()) if len(scaled) else 0.0



def holder_seminorm_report(
    history:GraphHistory,
    alpha:float=HOLDER_ALPHA,
    pairs:int=HOLDER_PAIRS,
    exhaustive:bool=False,
    tau0:float=TAU0,
    seed:int=HOLDER_SEED
) -> Seminorms:
    """Weighted C^α seminorm of Du and weighted sup of D²u over
    B(p, (1 - 1000 sqrt(τ₀)) r) x [0, τr²]."""

    if len(history.snapshots) < 2:
        raise DomainError("The seminorms need at least two snapshots",
                          snapshots=len(history.snapshots))
    x, t, du, d2u, weight = _samples(history, tau0)
    i, j = _pairs(len(x), pairs, exhaustive, seed)
    second = np.sqrt((d2u ** 2).reshape(len(d2u), -1).sum(axis=-1))
    return Seminorms(
        holder_du=_holder(du, x, t, weight, i, j, alpha, alpha),
        weighted_d2u=float((weight * second).max()) if len(second) else 0.0,
        alpha=alpha, samples=len(x), pairs=len(i),
    )



def nonlinearity_measure(
    source:GraphHistory|GraphField,
    alpha:float=HOLDER_ALPHA,
    pairs:int=HOLDER_PAIRS,
    exhaustive:bool=False,
    tau0:float=TAU0,
    seed:int=HOLDER_SEED
) -> Nonlinearity:
    """sup d_z |N(z)| and the weighted Hölder quotient
    d_{z1,z2}^{1+α} |N(z1) - N(z2)| / d(z1, z2)^α of N = a^{ij} u_ij."""

    x, t, du, d2u, weight = _samples(source, tau0)
    a = _inverse_metric(du) - np.eye(du.shape[-2])
    N = np.einsum("...ij,...ijm->...m", a, d2u)
    i, j = _pairs(len(x), pairs, exhaustive, seed)
    size = np.linalg.norm(N, axis=-1)
    return Nonlinearity(
        sup_weighted=float((weight * size).max()) if len(size) else 0.0,
        holder_weighted=_holder(N, x, t, weight, i, j, alpha, 1 + alpha),
        alpha=alpha, samples=len(x), pairs=len(i),
    )



def _nonincreasing(values:list[float], slack:float=0.0) -> bool:
    return all(b <= a * (1 + slack) for a, b in zip(values, values[1:]))



def epsilon_ladder(
    epsilons:list[float]|tuple[float, ...]=(0.04, 0.02, 0.01),
    tau:float=0.05,
    r:float=1.0,
    k:int=1,
    m:int=1,
    h:float|None=None,
    seed:int=0,
    snapshots:int=11,
    alpha:float=HOLDER_ALPHA,
    pairs:int=HOLDER_PAIRS,
    exhaustive:bool=False
) -> CheckReport:
    """Flow the same random shape scaled to every ε of the ladder.

    Reports the curvature ratio, the seminorms and the nonlinearity norms
    per ε, largest ε first. Along the ladder the seminorms must not grow,
    the curvature ratio must not grow beyond 1% and both nonlinearity norms
    divided by ε must strictly shrink.
    """

    ladder = sorted(epsilons, reverse=True)
    horizon = tau * r ** 2

    def rung(eps:float) -> dict:
        u0 = small_data_initial(eps, tau, np.random.default_rng(seed), r, k, m, h=h)
        history = graph_flow(u0, horizon, snapshots=list(np.linspace(0, horizon, snapshots)[1:-1]))
        seminorms = holder_seminorm_report(history, alpha, pairs, exhaustive)
        nonlinear = nonlinearity_measure(history, alpha, pairs, exhaustive)
        return {"eps": eps, "ratio": _center_curvature(history.final) * np.sqrt(tau) * r / eps,
                "holder_du": seminorms.holder_du, "weighted_d2u": seminorms.weighted_d2u,
                "n_sup": nonlinear.sup_weighted, "n_holder": nonlinear.holder_weighted,
                "n_sup_over_eps": nonlinear.sup_weighted / eps,
                "n_holder_over_eps": nonlinear.holder_weighted / eps}

    series = parallel_map(rung, ladder)
    column = lambda key: [row[key] for row in series]
    shrinking = lambda key: all(b < a for a, b in zip(column(key), column(key)[1:]))
    ratio_ok = _nonincreasing(column("ratio"), slack=0.01)
    seminorms_ok = _nonincreasing(column("holder_du")) and _nonincreasing(column("weighted_d2u"))
    sup_sublinear, holder_sublinear = shrinking("n_sup_over_eps"), shrinking("n_holder_over_eps")
    return CheckReport(
        check="ladder", case=f"k={k},m={m},tau={tau:g}",
        metrics={"ratio_nonincreasing": ratio_ok, "seminorms_monotone": seminorms_ok,
                 "nonlinearity_sublinear": sup_sublinear, "holder_sublinear": holder_sublinear,
                 "max_ratio": max(column("ratio"))},
        bounds={"max_ratio": 2.0},
        passed=bool(ratio_ok and seminorms_ok and sup_sublinear and holder_sublinear),
        notes=[f"Hölder exponent {alpha:g}, {pairs} sampled pairs" if not exhaustive
               else f"Hölder exponent {alpha:g}, exhaustive pairs",
               f"shrunken cylinder factor 1 - 1000 sqrt({TAU0:g})"],
        series=series,
    )



# Linearization and extension

def linearization_check(
    eps:float=1e-3,
    t_end:float=0.5,
    nodes:int=64,
    m:int=1,
    tolerance:float=0.01
) -> CheckReport:
    """Periodic small data on [0, 2π) against the heat solution ε e^{-t}
    per component (sin x, and cos x for a second component)."""

    h = 2 * np.pi / nodes
    x = h * np.arange(nodes)
    waves = [np.sin(x), np.cos(x)][:m] if m <= 2 else [np.sin(x + j) for j in range(m)]
    values = eps * np.stack(waves, axis=-1)
    u0 = GraphField(k=1, m=m, origin=np.zeros(1), shape=(nodes,), h=h,
                    values=values, boundary=BoundaryMode.PERIODIC)
    final = graph_flow(u0, t_end).final
    heat = values * np.exp(-t_end)
    deviation = float(np.abs(final.values - heat).max() / np.abs(heat).max())
    return CheckReport(
        check="linearization", case=f"m={m},eps={eps:g}",
        metrics={"relative_deviation": deviation},
        bounds={"relative_deviation": tolerance},
        passed=bool(deviation <= tolerance),
    )



def extension_law_check(
    family:FlowFamily=FlowFamily.SPHERE,
    k:int=1,
    n:int|None=None,
    radius:float=1.0,
    h:float=1/32,
    window:float=0.6,
    tolerance:float=0.05
) -> CheckReport:
    """Fit C in |A(t)| <= α/sqrt(1 - Cα²t) on a level-set flow of a sphere.

    |A| = sqrt(k)/ρ(t) comes from the measured radius and 1/|A|² = 1/α² - Ct
    is fitted by least squares. Round spheres follow the law with C = 2.
    """

    n = n if n is not None else k + 1
    if family == FlowFamily.PLANE:
        return CheckReport(
            check="extension", case=f"plane,k={k}",
            metrics={"alpha": 0.0, "fitted_C": None, "envelope_C": None},
            passed=True, notes=["flat: |A| = 0 and every C satisfies the bound"],
        )
    if family != FlowFamily.SPHERE:
        raise DomainError("The extension law is checked on round spheres", family=family.value)

    flow = AnalyticFlow(family=family, n=n, k=k, radius=radius)
    horizon = window * flow.extinction_time
    half = h * np.ceil((radius + max(0.25 * radius, 4 * h)) / h)
    cfg = FlowConfig(
        n=n, k=k, grid=GridSpec.box([-half] * n, [half] * n, h),
        shape={"kind": "sphere", "k": k, "radius": radius},
        t_end=horizon, stop_at_extinction=True,
    )
    record = run_flow(cfg)
    notes = [f"fit window [0, {horizon:.4g}]"]
    if record.extinction_time is not None and record.extinction_time < horizon:
        horizon = 0.9 * record.extinction_time
        notes.append(f"extinction at {record.extinction_time:.4g}; window shrunk to {horizon:.4g}")
    series = [(t, rho) for t, rho in record.radius_series() if t <= horizon + 1e-12]
    if len(series) < 3:
        raise CodimflowError("Too few radius samples to fit the extension law", samples=len(series))

    t, rho = np.array(series).T
    curvature = np.sqrt(k) / rho
    alpha = float(curvature[0])
    inverse = 1.0 / curvature ** 2
    slope, _ = np.polyfit(t, inverse, 1)
    fitted = float(-slope)
    positive = t > 0
    envelope = float(((1 / alpha ** 2 - inverse[positive]) / t[positive]).max())
    exact = flow.curvature_norm(t)
    return CheckReport(
        check="extension", case=f"sphere,n={n},k={k}",
        metrics={"alpha": alpha, "fitted_C": fitted, "envelope_C": envelope, "expected_C": 2.0,
                 "C_error": abs(fitted - 2.0),
                 "max_law_deviation": float(np.abs(curvature / exact - 1).max())},
        bounds={"C_error": tolerance},
        passed=bool(abs(fitted - 2.0) <= tolerance),
        notes=notes,
        series=[{"t": float(a), "curvature": float(b)} for a, b in zip(t, curvature)],
    )
