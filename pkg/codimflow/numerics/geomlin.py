"""
Small dense symmetric linear algebra and the operator F(p, A).

F(p, A) is the sum of the k smallest eigenvalues of A compressed to the
orthogonal complement of p. It drives the level-set equation
u_t = F(∇u, ∇²u) of k-dimensional mean curvature flow in R^n.

Every function accepts a single matrix (or vector) or a stack of them in the
leading axes, so the grid schemes evaluate F on all nodes at once.

"""

import logging
from functools import lru_cache

import numpy as np
from scipy.special import ndtri

from codimflow.models.linalg import Direction, EigenPair, SymMat, symmetrize
from core.errors import ConvergenceError, DomainError



logger = logging.getLogger(__name__)

MAX_SWEEPS = 50
ENVELOPE_DIRECTIONS = 64
OFF_DIAGONAL_TOLERANCE = 1e-14



def _matrix(value) -> np.ndarray:
    if isinstance(value, SymMat):
        return value.entries
    return symmetrize(value)


def _vector(value) -> np.ndarray:
    if isinstance(value, Direction):
        return value.components
    return np.asarray(value, dtype=float)


def _wrap(matrix:np.ndarray) -> SymMat|np.ndarray:
    return SymMat(entries=matrix) if matrix.ndim == 2 else matrix


def _off_diagonal_norm(a:np.ndarray) -> np.ndarray:
    off = a * (1.0 - np.eye(a.shape[-1]))
    return np.sqrt((off ** 2).sum(axis=(-2, -1)))



# Eigensolver

def _rotate(a:np.ndarray, v:np.ndarray, p:int, q:int) -> None:
    """Apply one Jacobi rotation zeroing a[..., p, q], in place."""

    apq = a[..., p, q]
    active = apq != 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = np.where(active, (a[..., q, q] - a[..., p, p]) / (2.0 * apq), 0.0)
        t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta ** 2 + 1.0))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t ** 2 + 1.0)
    s = t * c
    c_col, s_col = c[..., None], s[..., None]

    col_p, col_q = a[..., :, p].copy(), a[..., :, q].copy()
    a[..., :, p] = c_col * col_p - s_col * col_q
    a[..., :, q] = s_col * col_p + c_col * col_q
    row_p, row_q = a[..., p, :].copy(), a[..., q, :].copy()
    a[..., p, :] = c_col * row_p - s_col * row_q
    a[..., q, :] = s_col * row_p + c_col * row_q
    a[..., p, q] = np.where(active, 0.0, a[..., p, q])
    a[..., q, p] = a[..., p, q]

    vec_p, vec_q = v[..., :, p].copy(), v[..., :, q].copy()
    v[..., :, p] = c_col * vec_p - s_col * vec_q
    v[..., :, q] = s_col * vec_p + c_col * vec_q



def jacobi_eigh(matrix, max_sweeps:int=MAX_SWEEPS) -> EigenPair:
    """Spectral decomposition by cyclic Jacobi sweeps.

    Args:
      - matrix (SymMat|ndarray): one symmetric matrix or a stack (..., d, d),
        d <= 8. Only the lower triangle is read.
      - max_sweeps (int): sweep cap.

    Returns an EigenPair with ascending values; equal values are ordered by
    the index of the dominant component of their eigenvector, and every
    eigenvector has a positive dominant component.
    """

    a = np.array(_matrix(matrix), dtype=float)
    dim = a.shape[-1]
    if dim > 8:
        raise DomainError("The Jacobi eigensolver supports dimensions up to 8", dim=dim)
    v = np.broadcast_to(np.eye(dim), a.shape).copy()
    scale = np.sqrt((a ** 2).sum(axis=(-2, -1)))
    threshold = OFF_DIAGONAL_TOLERANCE * scale
    pairs = [(p, q) for p in range(dim - 1) for q in range(p + 1, dim)]

    sweeps = 0
    off = _off_diagonal_norm(a)
    while np.any(off > threshold):
        if sweeps == max_sweeps:
            raise ConvergenceError(
                "Jacobi eigensolver did not converge",
                sweeps=sweeps, off_diagonal=float(off.max())
            )
        for p, q in pairs:
            _rotate(a, v, p, q)
        sweeps += 1
        off = _off_diagonal_norm(a)

    values = np.diagonal(a, axis1=-2, axis2=-1).copy()
    dominant = np.abs(v).argmax(axis=-2)
    order = np.lexsort((dominant, values), axis=-1)
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(v, order[..., None, :], axis=-1)
    dominant = np.take_along_axis(dominant, order, axis=-1)
    signs = np.sign(np.take_along_axis(vectors, dominant[..., None, :], axis=-2))
    vectors = vectors * np.where(signs == 0, 1.0, signs)
    return EigenPair(values=values, vectors=vectors, sweeps=sweeps)



# Projections

def tangential_projection(p) -> SymMat|np.ndarray:
    """Return P_p = I - p̂p̂ᵀ, the projection onto the complement of p."""

    p = _vector(p)
    norm = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DomainError("Projection along a zero vector is undefined")
    unit = p / norm
    projection = np.eye(p.shape[-1]) - unit[..., :, None] * unit[..., None, :]
    return _wrap(projection)



def complement_basis(p) -> np.ndarray:
    """Orthonormal basis of the complement of p, shape (..., dim, dim - 1).

    Columns are the first dim - 1 columns of the Householder reflection
    mapping e_dim to p̂.
    """

    p = _vector(p)
    norm = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DomainError("The complement of a zero vector is undefined")
    dim = p.shape[-1]
    unit = p / norm
    w = -unit
    w[..., -1] += 1.0
    ww = (w * w).sum(axis=-1)[..., None, None]
    reflect = ww > 1e-30
    with np.errstate(divide="ignore", invalid="ignore"):
        outer = np.where(reflect, 2.0 * w[..., :, None] * w[..., None, :] / ww, 0.0)
    householder = np.eye(dim) - outer
    return householder[..., :, : dim - 1]



def random_rotation(dim:int, rng:np.random.Generator) -> np.ndarray:
    """Random rotation built as a product of Householder reflections."""

    rotation = np.eye(dim)
    for _ in range(dim):
        w = rng.standard_normal(dim)
        w /= np.linalg.norm(w)
        rotation = rotation @ (np.eye(dim) - 2.0 * np.outer(w, w))
    if dim % 2 == 1:
        rotation[:, 0] *= -1.0
    return rotation



# Operator F

def _check_k(k:int, dim:int) -> None:
    if not 1 <= k <= dim - 1:
        raise DomainError("F needs 1 <= k <= dim - 1", k=k, dim=dim)


def _smallest_sum(compressed:np.ndarray, k:int) -> np.ndarray:
    size = compressed.shape[-1]
    if size == 1:
        return compressed[..., 0, 0]
    if k == size:
        return np.trace(compressed, axis1=-2, axis2=-1)
    if size == 2:
        a, b, d = compressed[..., 0, 0], compressed[..., 0, 1], compressed[..., 1, 1]
        return 0.5 * (a + d) - np.hypot(0.5 * (a - d), b)
    return jacobi_eigh(compressed).values[..., :k].sum(axis=-1)



def f_operator(k:int, p, matrix) -> float|np.ndarray:
    """F(p, A): sum of the k smallest eigenvalues of A restricted to p⊥.

    `p` and `matrix` broadcast against each other over their leading axes.
    """

    a = _matrix(matrix)
    dim = a.shape[-1]
    _check_k(k, dim)
    basis = complement_basis(p)
    compressed = np.einsum("...ia,...ij,...jb->...ab", basis, a, basis)
    value = _smallest_sum(compressed, k)
    return float(value) if np.ndim(value) == 0 else value



@lru_cache(maxsize=32)
def sphere_directions(dim:int, count:int) -> np.ndarray:
    """Deterministic quasi-uniform unit directions, shape (count, dim).

    F(p, A) = F(-p, A), so n = 2 only covers a half circle. n = 3 uses the
    Fibonacci lattice; higher dimensions map a Kronecker sequence to the
    sphere through the inverse normal distribution.
    """

    j = np.arange(count) + 0.5
    if dim == 2:
        angle = np.pi * j / count
        directions = np.stack([np.cos(angle), np.sin(angle)], axis=-1)
    elif dim == 3:
        z = 1.0 - 2.0 * j / count
        radius = np.sqrt(1.0 - z ** 2)
        angle = np.pi * (3.0 - np.sqrt(5.0)) * np.arange(count)
        directions = np.stack([radius * np.cos(angle), radius * np.sin(angle), z], axis=-1)
    else:
        phi = 2.0
        for _ in range(64):
            phi = (1.0 + phi) ** (1.0 / (dim + 1))
        alpha = phi ** -(np.arange(dim) + 1.0)
        uniform = np.mod(0.5 + np.outer(np.arange(1, count + 1), alpha), 1.0)
        directions = ndtri(uniform)
        directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    directions.flags.writeable = False
    return directions



@lru_cache(maxsize=32)
def envelope_bases(dim:int, n_dirs:int) -> np.ndarray:
    """Complement bases of the envelope directions, shape (n_dirs, dim, dim - 1)."""

    basis = np.ascontiguousarray(complement_basis(sphere_directions(dim, n_dirs)))
    basis.flags.writeable = False
    return basis



def f_degenerate_envelope(
    k:int,
    matrix,
    n_dirs:int=ENVELOPE_DIRECTIONS
) -> tuple[float|np.ndarray, float|np.ndarray]:
    """Min and max of F(k, p, A) over `n_dirs` fixed unit directions p.

    Used where the gradient vanishes and F is undefined. The result lies in
    the bracket [λ1+…+λk, λ2+…+λ(k+1)] of the full spectrum of A.
    """

    a = _matrix(matrix)
    dim = a.shape[-1]
    _check_k(k, dim)
    if n_dirs < 2 * dim ** 2:
        raise DomainError("The envelope needs at least 2·dim² directions",
                          n_dirs=n_dirs, dim=dim)
    basis = envelope_bases(dim, n_dirs)
    compressed = np.einsum("dia,...ij,djb->...dab", basis, a, basis)
    values = _smallest_sum(compressed, k)
    low, high = values.min(axis=-1), values.max(axis=-1)
    if np.ndim(low) == 0:
        return float(low), float(high)
    return low, high
