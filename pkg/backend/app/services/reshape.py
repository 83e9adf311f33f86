# backend/app/services/reshape.py
"""Element-wise reshaping of operators and density matrices between the
Fock and Hilbert representations of two identical particles.

Fock -> Hilbert (bosons):   O^H_{ij;kl} = 1/2 O^F_{ij;kl} (1 + eps d_ij)(1 + eps d_kl),  eps = sqrt(2) - 1
Fock -> Hilbert (fermions): O^H_{ij;kl} = 1/2 O^F_{ij;kl} (1 - d_ij)(1 - d_kl) sgn(j - i) sgn(l - k)

Fock labels are swapped into order when i > j or k > l. Every Fock element
therefore lands on at most four Hilbert elements, listed by
``symmetry.sector_images``.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import sparse

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.operators import DensityMatrix, OperatorMatrix, choose_storage
from app.models.statistics import Space, Statistics
from app.services.symmetry import EPSILON, permutation_violation, projector, rect_symmetrizer, sector_images

logger = logging.getLogger(__name__)


def _images_to_hilbert(K: int, stat: Statistics, rows, cols, values):
    """Scatter Fock triplets onto their Hilbert images."""
    index, coeff = sector_images(K, stat)
    out_rows, out_cols, out_vals = [], [], []
    for a in range(2):
        for b in range(2):
            weight = coeff[rows, a] * coeff[cols, b]
            keep = weight != 0.0
            out_rows.append(index[rows[keep], a])
            out_cols.append(index[cols[keep], b])
            out_vals.append(weight[keep] * values[keep])
    return np.concatenate(out_rows), np.concatenate(out_cols), np.concatenate(out_vals)


def fock_to_hilbert_op(op: OperatorMatrix) -> OperatorMatrix:
    if not op.space.is_fock:
        raise DomainError(f"fock_to_hilbert_op expects a Fock operator, got {op.space.value}")
    stat = op.statistics
    coo = sparse.coo_matrix(op.entries)
    rows, cols, values = _images_to_hilbert(op.K, stat, coo.row, coo.col, coo.data.astype(complex))
    result = OperatorMatrix.from_triplets(Space.HILBERT, op.K, rows, cols, values)
    logger.debug(f"reshaped {stat.value} Fock operator (K={op.K}) to Hilbert, nnz={len(values)}")
    return result


def _fock_rows(dense: np.ndarray, index: np.ndarray, coeff: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Fock rows of R O R^T for the given row block, four image terms each."""
    block = np.zeros((len(rows), index.shape[0]), dtype=complex)
    for a in range(2):
        for b in range(2):
            block += (
                coeff[rows, a][:, None]
                * coeff[:, b][None, :]
                * dense[np.ix_(index[rows, a], index[:, b])]
            )
    return block


def hilbert_to_fock_op(op: OperatorMatrix, stat: Statistics) -> OperatorMatrix:
    """Fock matrix R O R^T, looping Fock labels with j >= i + delta and l >= k + delta."""
    if op.space is not Space.HILBERT:
        raise DomainError(f"hilbert_to_fock_op expects a Hilbert operator, got {op.space.value}")
    worst, (bra, ket) = permutation_violation(op.entries, op.K)
    if worst > settings.SYMMETRY_ATOL:
        raise DomainError(
            f"operator mixes symmetry sectors: |PMP - M| = {worst:.3e} at element "
            f"({bra.i},{bra.j};{ket.i},{ket.j})"
        )
    space = Space.fock(stat)
    dim = space.dimension(op.K)
    if op.is_sparse:
        rect = rect_symmetrizer(op.K, stat).entries
        entries = choose_storage(rect @ op.entries @ rect.T)
        return OperatorMatrix(space=space, K=op.K, entries=entries)

    index, coeff = sector_images(op.K, stat)
    dense = op.toarray()
    workers = min(settings.worker_count(), max(1, dim))
    if workers > 1 and dim >= settings.PARALLEL_MIN_DIM:
        blocks = np.array_split(np.arange(dim), workers)
        logger.info(f"reshaping {dim}x{dim} {stat.value} block on {workers} workers")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda rows: _fock_rows(dense, index, coeff, rows), blocks))
        result = np.vstack(parts)
    else:
        result = _fock_rows(dense, index, coeff, np.arange(dim))
    return OperatorMatrix(space=space, K=op.K, entries=choose_storage(result))


def block_embed(op: OperatorMatrix) -> np.ndarray:
    """K^2 x K^2 matrix in the (anti)symmetric basis B* holding the Fock block.

    Bosonic blocks sit in the top-left d_B corner, fermionic blocks in the
    bottom-right d_F corner; everything else is zero.
    """
    if not op.space.is_fock:
        raise DomainError(f"block_embed expects a Fock operator, got {op.space.value}")
    K = op.K
    embedded = np.zeros((K * K, K * K), dtype=complex)
    start = 0 if op.statistics is Statistics.BOSON else Space.BOSON_FOCK.dimension(K)
    stop = start + op.dim
    embedded[start:stop, start:stop] = op.toarray()
    return embedded


def _sector_support_error(rho: np.ndarray, K: int, stat: Statistics) -> float:
    proj = projector(K, stat).toarray()
    return float(np.max(np.abs(proj @ rho @ proj - rho)))


def hilbert_to_fock_density(rho: DensityMatrix, stat: Statistics) -> DensityMatrix:
    """rho^F_{ij;kl} = 2 rho^H_{ij;kl} / ((1 + eps d_ij)(1 + eps d_kl)) over ordered labels."""
    if rho.space is not Space.HILBERT:
        raise DomainError(f"hilbert_to_fock_density expects a Hilbert density matrix, got {rho.space.value}")
    K = rho.K
    leak = _sector_support_error(rho.entries, K, stat)
    if leak > settings.SYMMETRY_ATOL:
        raise DomainError(f"density matrix is not supported on the {stat.value} sector (deviation {leak:.3e})")
    index, _ = sector_images(K, stat)
    direct = index[:, 0]
    diagonal = direct == index[:, 1]
    factor = 1.0 + EPSILON * diagonal.astype(float)
    entries = 2.0 * rho.entries[np.ix_(direct, direct)] / np.outer(factor, factor)
    return DensityMatrix(space=Space.fock(stat), K=K, entries=entries)


def fock_to_hilbert_density(rho: DensityMatrix) -> DensityMatrix:
    if not rho.space.is_fock:
        raise DomainError(f"fock_to_hilbert_density expects a Fock density matrix, got {rho.space.value}")
    op = OperatorMatrix(space=rho.space, K=rho.K, entries=rho.entries)
    return DensityMatrix(space=Space.HILBERT, K=rho.K, entries=fock_to_hilbert_op(op).toarray())


def alpha_from_beta(beta: np.ndarray, K: int, stat: Statistics) -> np.ndarray:
    """Unnormalized Fock amplitudes: sqrt(2) beta_ij off the diagonal, beta_ii (1 + g)/2 on it.

    Assumes beta already has exchange symmetry beta_ij = g beta_ji.
    """
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (K * K,):
        raise DomainError(f"expected {K * K} Hilbert amplitudes, got shape {beta.shape}")
    index, _ = sector_images(K, stat)
    direct = index[:, 0]
    diagonal = direct == index[:, 1]
    return np.where(diagonal, beta[direct] * (1 + stat.g) / 2, math.sqrt(2.0) * beta[direct])
