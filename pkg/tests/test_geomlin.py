import numpy as np
import pytest

from codimflow.models.linalg import SymMat
from codimflow.numerics.geomlin import (
    complement_basis,
    envelope_bases,
    f_degenerate_envelope,
    f_operator,
    jacobi_eigh,
    random_rotation,
    sphere_directions,
    tangential_projection,
)
from core.errors import DomainError



# Eigensolver tests

def test_jacobi_identity():
    eig = jacobi_eigh(SymMat(entries=np.eye(3)))
    assert np.allclose(eig.values, [1, 1, 1])
    assert eig.sweeps == 0


def test_jacobi_diagonal_sorted():
    eig = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(eig.values, [1, 2, 3])
    assert np.allclose(np.abs(eig.vectors[:, 0]), [0, 1, 0])


def test_jacobi_matches_numpy(rng):
    a = rng.standard_normal((50, 5, 5))
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    eig = jacobi_eigh(a)
    assert np.allclose(eig.values, np.linalg.eigvalsh(a), atol=1e-10)
    assert eig.residual(a) < 1e-10


def test_jacobi_reads_lower_triangle():
    a = np.array([[2.0, 100.0], [1.0, 2.0]])
    assert np.allclose(jacobi_eigh(a).values, [1, 3])


def test_jacobi_positive_dominant_component(rng):
    a = rng.standard_normal((4, 4))
    eig = jacobi_eigh(a + a.T)
    dominant = np.abs(eig.vectors).argmax(axis=0)
    assert np.all(eig.vectors[dominant, np.arange(4)] > 0)


def test_jacobi_dimension_limit():
    with pytest.raises(DomainError):
        jacobi_eigh(np.eye(9))



# Projection tests

def test_tangential_projection(rng):
    p = rng.standard_normal(4)
    P = tangential_projection(p).entries
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.allclose(P @ p, 0, atol=1e-12)


def test_tangential_projection_zero_vector():
    with pytest.raises(DomainError):
        tangential_projection(np.zeros(3))


def test_complement_basis(rng):
    p = rng.standard_normal((10, 3))
    basis = complement_basis(p)
    assert basis.shape == (10, 3, 2)
    gram = np.swapaxes(basis, -1, -2) @ basis
    assert np.allclose(gram, np.eye(2), atol=1e-12)
    assert np.allclose(np.einsum("bi,bij->bj", p, basis), 0, atol=1e-12)


def test_complement_basis_of_last_axis():
    basis = complement_basis(np.array([0.0, 0.0, 2.0]))
    assert np.allclose(basis, np.eye(3)[:, :2])


def test_random_rotation(rng):
    for dim in (2, 3, 4):
        q = random_rotation(dim, rng)
        assert np.allclose(q.T @ q, np.eye(dim), atol=1e-12)
        assert np.isclose(np.linalg.det(q), 1.0)



# Operator F tests

def test_f_operator_restricted_spectrum():
    a = np.diag([1.0, 2.0, 3.0])
    p = np.array([0.0, 0.0, 1.0])
    assert f_operator(1, p, a) == pytest.approx(1.0)
    assert f_operator(2, p, a) == pytest.approx(3.0)


def test_f_operator_codimension_one_is_trace(rng):
    p = rng.standard_normal(3)
    a = rng.standard_normal((3, 3))
    a = a + a.T
    P = tangential_projection(p).entries
    assert f_operator(2, p, a) == pytest.approx(np.trace(P @ a @ P), abs=1e-12)


def test_f_operator_batched(rng):
    p = rng.standard_normal((20, 3))
    a = rng.standard_normal((20, 3, 3))
    a = a + np.swapaxes(a, -1, -2)
    batched = f_operator(1, p, a)
    single = [f_operator(1, p[i], a[i]) for i in range(20)]
    assert np.allclose(batched, single, atol=1e-12)


def test_f_operator_matches_restricted_eigenvalues(rng):
    for dim in (3, 4, 5):
        p = rng.standard_normal((10, dim))
        a = rng.standard_normal((10, dim, dim))
        a = a + np.swapaxes(a, -1, -2)
        basis = complement_basis(p)
        restricted = np.linalg.eigvalsh(np.swapaxes(basis, -1, -2) @ a @ basis)
        for k in range(1, dim):
            assert np.allclose(f_operator(k, p, a), restricted[:, :k].sum(axis=-1), atol=1e-10)


def test_f_operator_invalid_k():
    with pytest.raises(DomainError):
        f_operator(3, np.ones(3), np.eye(3))
    with pytest.raises(DomainError):
        f_operator(0, np.ones(3), np.eye(3))



# Degenerate envelope tests

def test_envelope_bracket(rng):
    for dim in (2, 3, 4):
        a = rng.standard_normal((dim, dim))
        a = a + a.T
        spectrum = np.linalg.eigvalsh(a)
        for k in range(1, dim):
            low, high = f_degenerate_envelope(k, a)
            assert low >= spectrum[:k].sum() - 1e-10
            assert high <= spectrum[1:k + 1].sum() + 1e-10
            assert low <= high


def test_envelope_of_identity():
    low, high = f_degenerate_envelope(1, np.eye(3))
    assert low == pytest.approx(1.0)
    assert high == pytest.approx(1.0)


def test_envelope_needs_enough_directions():
    with pytest.raises(DomainError):
        f_degenerate_envelope(1, np.eye(3), n_dirs=10)


def test_envelope_bases_are_cached():
    basis = envelope_bases(3, 64)
    assert basis is envelope_bases(3, 64)
    assert basis.shape == (64, 3, 2)
    assert not basis.flags.writeable
    assert np.allclose(np.einsum("dia,di->da", basis, sphere_directions(3, 64)), 0.0, atol=1e-12)


def test_sphere_directions():
    for dim in (2, 3, 4):
        directions = sphere_directions(dim, 64)
        assert directions.shape == (64, dim)
        assert np.allclose(np.linalg.norm(directions, axis=1), 1.0)
        assert not directions.flags.writeable
