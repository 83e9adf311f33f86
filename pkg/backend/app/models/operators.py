# backend/app/models/operators.py
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.statistics import Space, Statistics

Matrix = Union[np.ndarray, sparse.spmatrix]


def as_dense(matrix: Matrix) -> np.ndarray:
    if sparse.issparse(matrix):
        return matrix.toarray()
    return np.asarray(matrix)


def choose_storage(matrix: Matrix) -> Matrix:
    """Dense unless fewer than SPARSE_FRACTION of the entries are nonzero."""
    rows, cols = matrix.shape
    total = rows * cols
    if total == 0:
        return as_dense(matrix).astype(complex)
    nnz = matrix.count_nonzero() if sparse.issparse(matrix) else int(np.count_nonzero(matrix))
    if nnz / total < settings.SPARSE_FRACTION:
        return sparse.csr_matrix(matrix, dtype=complex)
    return as_dense(matrix).astype(complex)


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix tagged with the space it acts on."""

    space: Space
    K: int
    entries: Matrix

    def __post_init__(self):
        dim = self.space.dimension(self.K)
        if self.entries.shape != (dim, dim):
            raise DomainError(
                f"operator on {self.space.value} with K={self.K} must be {dim}x{dim}, "
                f"got {self.entries.shape[0]}x{self.entries.shape[1]}"
            )

    @classmethod
    def from_triplets(cls, space: Space, K: int, rows, cols, values) -> "OperatorMatrix":
        dim = space.dimension(K)
        coo = sparse.coo_matrix(
            (np.asarray(values, dtype=complex), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))),
            shape=(dim, dim),
        )
        return cls(space=space, K=K, entries=choose_storage(coo.tocsr()))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.entries)

    @property
    def statistics(self):
        return self.space.statistics

    def toarray(self) -> np.ndarray:
        return as_dense(self.entries).astype(complex)

    def hermiticity_error(self) -> float:
        if self.dim == 0:
            return 0.0
        diff = self.entries - self.entries.conj().T
        return float(abs(diff).max()) if sparse.issparse(diff) else float(np.max(np.abs(diff)))

    def is_hermitian(self, atol: float = settings.HERMITIAN_ATOL) -> bool:
        return self.hermiticity_error() <= atol

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if (self.space, self.K) != (other.space, other.K):
            raise DomainError(
                f"cannot add operators on {self.space.value}(K={self.K}) and {other.space.value}(K={other.K})"
            )
        return OperatorMatrix(space=self.space, K=self.K, entries=choose_storage(self.entries + other.entries))


@dataclass(frozen=True)
class RectangularSymmetrizer:
    """d_g x K^2 map whose rows are the normalized (anti)symmetric basis vectors."""

    stat: Statistics
    K: int
    entries: sparse.csr_matrix

    def __post_init__(self):
        shape = (Space.fock(self.stat).dimension(self.K), self.K * self.K)
        if self.entries.shape != shape:
            raise DomainError(f"{self.stat.value} symmetrizer must have shape {shape}, got {self.entries.shape}")

    @property
    def shape(self):
        return self.entries.shape

    def toarray(self) -> np.ndarray:
        return self.entries.toarray()


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over the basis of one space."""

    space: Space
    K: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1 or amplitudes.shape[0] != self.space.dimension(self.K):
            raise DomainError(
                f"state on {self.space.value} with K={self.K} must have length "
                f"{self.space.dimension(self.K)}, got shape {amplitudes.shape}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def normalized(self) -> "StateVector":
        return StateVector(space=self.space, K=self.K, amplitudes=self.amplitudes / self.norm)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix tagged with its space."""

    space: Space
    K: int
    entries: np.ndarray

    def __post_init__(self):
        entries = as_dense(self.entries).astype(complex)
        dim = self.space.dimension(self.K)
        if entries.shape != (dim, dim):
            raise DomainError(
                f"density matrix on {self.space.value} with K={self.K} must be {dim}x{dim}, got {entries.shape}"
            )
        if dim == 0:
            raise DomainError(f"{self.space.value} with K={self.K} holds no two-particle state")
        hermitian_error = float(np.max(np.abs(entries - entries.conj().T)))
        if hermitian_error > settings.HERMITIAN_ATOL:
            raise DomainError(f"density matrix is not Hermitian (max deviation {hermitian_error:.3e})")
        trace = complex(np.trace(entries))
        if abs(trace - 1.0) > settings.TRACE_ATOL:
            raise DomainError(f"density matrix trace must be 1, got {trace.real:.12g}{trace.imag:+.3g}j")
        lowest = float(np.linalg.eigvalsh(entries)[0])
        if lowest < -settings.PSD_ATOL:
            raise DomainError(f"density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)
