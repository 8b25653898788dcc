import numpy as np
from pydantic import field_validator

from codimflow.models.utils.base import Base, frozen_array



def symmetrize(values) -> np.ndarray:
    """Mirror the lower triangle over the upper one (works on stacks)."""

    a = np.asarray(values, dtype=float)
    lower = np.tril(a)
    return lower + np.swapaxes(np.tril(a, -1), -1, -2)



class SymMat(Base):
    """Dense symmetric matrix: Hessians, projections and second fundamental
    forms.

    Attributes:
      - entries (ndarray): dim x dim array, exactly symmetric. Only the lower
        triangle of the input is read.
    """

    entries: np.ndarray

    @field_validator("entries", mode="before")
    def validate_entries(cls, value):
        a = np.asarray(value, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("A symmetric matrix must be square.")
        if not 1 <= a.shape[0] <= 8:
            raise ValueError("Matrix dimension must be between 1 and 8.")
        if not np.isfinite(a).all():
            raise ValueError("Matrix entries must be finite.")
        return frozen_array(symmetrize(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]



class EigenPair(Base):
    """Spectral decomposition of one or a stack of symmetric matrices.

    Attributes:
      - values (ndarray): eigenvalues in ascending order, shape (..., dim).
      - vectors (ndarray): orthonormal eigenvectors as columns, shape
        (..., dim, dim); column i belongs to values[..., i].
      - sweeps (int): Jacobi sweeps used.
    """

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def residual(self, matrix) -> float:
        """Return max ‖A·v_i − λ_i·v_i‖ over the decomposition."""

        a = np.asarray(matrix.entries if isinstance(matrix, SymMat) else matrix)
        av = a @ self.vectors
        return float(np.abs(av - self.vectors * self.values[..., None, :]).max())



class Direction(Base):
    """Nonzero vector used as the gradient argument of F."""

    components: np.ndarray

    @field_validator("components", mode="before")
    def validate_components(cls, value):
        p = np.asarray(value, dtype=float)
        if p.ndim != 1:
            raise ValueError("A direction is a single vector.")
        if not np.isfinite(p).all() or not np.linalg.norm(p) > 0:
            raise ValueError("A direction must have a finite, positive norm.")
        return frozen_array(p)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def unit(self) -> np.ndarray:
        return self.components / np.linalg.norm(self.components)
