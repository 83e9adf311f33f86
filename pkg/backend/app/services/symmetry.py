# backend/app/services/symmetry.py
import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import sparse

from app.core.config import settings
from app.core.exceptions import DomainError, NullProjectionError
from app.models.operators import Matrix, OperatorMatrix, RectangularSymmetrizer, StateVector, choose_storage
from app.models.statistics import ModePair, Space, Statistics
from app.services.basis import check_modes, enumerate_pairs

logger = logging.getLogger(__name__)

EPSILON = math.sqrt(2.0) - 1.0
INV_SQRT2 = 1.0 / math.sqrt(2.0)


@lru_cache(maxsize=64)
def permutation_indices(K: int) -> np.ndarray:
    """0-based Hilbert index of (j, i) for every Hilbert index of (i, j)."""
    check_modes(K)
    grid = np.arange(K * K).reshape(K, K)
    return grid.T.reshape(-1)


@lru_cache(maxsize=64)
def sector_images(K: int, stat: Statistics) -> Tuple[np.ndarray, np.ndarray]:
    """Hilbert images of every Fock basis vector.

    Returns ``(index, coeff)``, both of shape (d_g, 2): Fock row m is
    ``sum_a coeff[m, a] * e_{index[m, a]}`` with 0-based Hilbert indices.
    The weight of |i,j> is (1 + eps*delta_ij)/sqrt(2); |j,i> carries the
    exchange sign g. Diagonal boson pairs have a single image, so their
    second coefficient is 0.
    """
    check_modes(K)
    pairs = enumerate_pairs(K, stat)
    index = np.zeros((len(pairs), 2), dtype=int)
    coeff = np.zeros((len(pairs), 2), dtype=float)
    for m, (i, j) in enumerate(pairs):
        direct = K * (i - 1) + (j - 1)
        exchanged = K * (j - 1) + (i - 1)
        index[m] = (direct, exchanged)
        if i == j:
            coeff[m] = ((1.0 + EPSILON) * INV_SQRT2, 0.0)
        else:
            coeff[m] = (INV_SQRT2, stat.g * INV_SQRT2)
    index.flags.writeable = False
    coeff.flags.writeable = False
    return index, coeff


def permutation_operator(K: int) -> OperatorMatrix:
    """P|i,j> = |j,i> on the distinguishable two-particle space."""
    perm = permutation_indices(K)
    dim = K * K
    entries = sparse.csr_matrix((np.ones(dim), (perm, np.arange(dim))), shape=(dim, dim), dtype=complex)
    return OperatorMatrix(space=Space.HILBERT, K=K, entries=entries)


def rect_symmetrizer(K: int, stat: Statistics) -> RectangularSymmetrizer:
    index, coeff = sector_images(K, stat)
    rows = np.repeat(np.arange(index.shape[0]), 2)
    keep = coeff.reshape(-1) != 0.0
    entries = sparse.csr_matrix(
        (coeff.reshape(-1)[keep], (rows[keep], index.reshape(-1)[keep])),
        shape=(index.shape[0], K * K),
    )
    return RectangularSymmetrizer(stat=stat, K=K, entries=entries)


def projector(K: int, stat: Statistics) -> OperatorMatrix:
    """Square projector onto the bosonic (S) or fermionic (A) sector.

    Built as the sum of |i,j>_g <i,j|_g over the Fock basis, which expands to
    the diagonal |i,i><i,i| terms plus the (|ij> + g|ji>)(<ij| + g<ji|)/2 terms.
    """
    rect = rect_symmetrizer(K, stat).entries
    entries = (rect.T @ rect).tocsr()
    entries.eliminate_zeros()
    logger.debug(f"{stat.value} projector for K={K}: nnz={entries.nnz}")
    return OperatorMatrix(space=Space.HILBERT, K=K, entries=sparse.csr_matrix(entries, dtype=complex))


def star_basis_unitary(K: int) -> np.ndarray:
    """Unitary from the distinguishable basis to the (anti)symmetric basis B*.

    Rows are the boson Fock basis vectors followed by the fermion ones.
    """
    boson = rect_symmetrizer(K, Statistics.BOSON).entries
    fermion = rect_symmetrizer(K, Statistics.FERMION).entries
    return sparse.vstack([boson, fermion]).toarray()


def permutation_violation(matrix: Matrix, K: int) -> Tuple[float, Tuple[ModePair, ModePair]]:
    """max |PMP - M| and the Hilbert element (i,j; k,l) where it occurs."""
    perm = permutation_indices(K)
    if sparse.issparse(matrix):
        csr = sparse.csr_matrix(matrix)
        diff = sparse.coo_matrix(csr[perm][:, perm] - csr)
        if diff.nnz == 0:
            return 0.0, (ModePair(i=1, j=1), ModePair(i=1, j=1))
        magnitudes = np.abs(diff.data)
        best = int(np.argmax(magnitudes))
        row, col, worst = int(diff.row[best]), int(diff.col[best]), float(magnitudes[best])
    else:
        dense = np.asarray(matrix)
        diff = np.abs(dense[np.ix_(perm, perm)] - dense)
        if diff.size == 0:
            return 0.0, (ModePair(i=1, j=1), ModePair(i=1, j=1))
        row, col = np.unravel_index(int(np.argmax(diff)), diff.shape)
        worst = float(diff[row, col])
    bra = ModePair(i=int(row) // K + 1, j=int(row) % K + 1)
    ket = ModePair(i=int(col) // K + 1, j=int(col) % K + 1)
    return worst, (bra, ket)


def is_permutation_symmetric(op: OperatorMatrix, atol: float = settings.SYMMETRY_ATOL) -> bool:
    if op.space is not Space.HILBERT:
        raise DomainError("permutation symmetry is defined on the Hilbert space only")
    worst, _ = permutation_violation(op.entries, op.K)
    return worst <= atol


def sector_decomposition(op: OperatorMatrix) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """Projections (S O S, A O A) of a Hilbert operator onto the two sectors."""
    if op.space is not Space.HILBERT:
        raise DomainError("sector decomposition needs a Hilbert-space operator")
    parts = []
    for stat in (Statistics.BOSON, Statistics.FERMION):
        proj = projector(op.K, stat).entries
        parts.append(OperatorMatrix(space=Space.HILBERT, K=op.K, entries=choose_storage(proj @ op.entries @ proj)))
    return parts[0], parts[1]


def symmetrize_state(v: StateVector, stat: Statistics) -> StateVector:
    """Normalized (anti)symmetric Fock state from a Hilbert state.

    alpha_ij = (beta_ij + g beta_ji)/sqrt(2) for i < j and alpha_ii = beta_ii (1 + g)/2,
    then renormalized.
    """
    if v.space is not Space.HILBERT:
        raise DomainError(f"symmetrize_state expects a Hilbert state, got {v.space.value}")
    alpha = rect_symmetrizer(v.K, stat).entries @ v.amplitudes
    norm2 = float(np.vdot(alpha, alpha).real)
    if norm2 < settings.NULL_PROJECTION_NORM2:
        if stat is Statistics.FERMION:
            raise NullProjectionError("Pauli-forbidden initial state")
        raise NullProjectionError("state is entirely antisymmetric, no bosonic component")
    return StateVector(space=Space.fock(stat), K=v.K, amplitudes=alpha / math.sqrt(norm2))
