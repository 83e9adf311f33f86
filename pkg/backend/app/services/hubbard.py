# backend/app/services/hubbard.py
import logging
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse

from app.core.exceptions import DomainError
from app.models.lattice import LatticeSpec
from app.models.operators import OperatorMatrix, choose_storage
from app.models.statistics import ModePair, Space, Statistics
from app.services.basis import enumerate_basis, index_hilbert
from app.services.fock_ladder import apply_hop, fock_index_of, occupation_from_pair
from app.services.symmetry import sector_images

logger = logging.getLogger(__name__)


class ExchangeDyad(BaseModel):
    """Coefficient of the Hilbert dyad |ket><bra|."""

    model_config = ConfigDict(frozen=True)

    ket: ModePair
    bra: ModePair
    coefficient: float


def single_particle_hopping(spec: LatticeSpec) -> sparse.csr_matrix:
    """-J sum (|i><i+1| + h.c.) over the bonds of the chain."""
    rows, cols = [], []
    for a, b in spec.bonds():
        rows += [a - 1, b - 1]
        cols += [b - 1, a - 1]
    values = np.full(len(rows), -spec.J, dtype=complex)
    return sparse.csr_matrix((values, (rows, cols)), shape=(spec.K, spec.K))


def kinetic_hilbert(spec: LatticeSpec) -> OperatorMatrix:
    """T^H = h (x) I + I (x) h for two distinguishable particles."""
    h = single_particle_hopping(spec)
    identity = sparse.identity(spec.K, dtype=complex, format="csr")
    entries = (sparse.kron(h, identity) + sparse.kron(identity, h)).tocsr()
    entries.eliminate_zeros()
    logger.info(f"kinetic Hilbert operator: K={spec.K}, bc={spec.bc.value}, nnz={entries.nnz}")
    return OperatorMatrix(space=Space.HILBERT, K=spec.K, entries=choose_storage(entries))


def kinetic_fock(spec: LatticeSpec, stat: Statistics) -> OperatorMatrix:
    """T^F = -J sum (c+_i c_{i+1} + c+_{i+1} c_i) assembled from ladder actions.

    Boundary signs for fermions come only from the Jordan-Wigner phases.
    """
    rows, cols, values = [], [], []
    for column, pair in enumerate(enumerate_basis(spec.K, stat)):
        source = occupation_from_pair(pair, spec.K, stat)
        for a, b in spec.bonds():
            for to, frm in ((a, b), (b, a)):
                target = apply_hop(source, to, frm)
                if target.is_null:
                    continue
                rows.append(fock_index_of(target) - 1)
                cols.append(column)
                values.append(-spec.J * target.amplitude / source.amplitude)
    result = OperatorMatrix.from_triplets(Space.fock(stat), spec.K, rows, cols, values)
    logger.info(
        f"kinetic {stat.value} Fock operator: K={spec.K}, bc={spec.bc.value}, dim={result.dim}, "
        f"storage={'sparse' if result.is_sparse else 'dense'}"
    )
    return result


def interaction_fock(spec: LatticeSpec, stat: Statistics) -> OperatorMatrix:
    """U sum_i n_i (n_i - 1)/2 on the two-particle Fock basis."""
    rows, values = [], []
    for m, pair in enumerate(enumerate_basis(spec.K, stat)):
        state = occupation_from_pair(pair, spec.K, stat)
        doubly = sum(n * (n - 1) // 2 for n in state.occ)
        if doubly and spec.U:
            rows.append(m)
            values.append(spec.U * doubly)
    return OperatorMatrix.from_triplets(Space.fock(stat), spec.K, rows, rows, values)


def hubbard_hamiltonian(spec: LatticeSpec, stat: Statistics) -> OperatorMatrix:
    return kinetic_fock(spec, stat) + interaction_fock(spec, stat)


def hubbard_hamiltonian_hilbert(spec: LatticeSpec) -> OperatorMatrix:
    """T^H + U sum_i |i,i><i,i| for two distinguishable particles."""
    kinetic = kinetic_hilbert(spec)
    if spec.U == 0:
        return kinetic
    diagonal = [index_hilbert(spec.K, ModePair(i=i, j=i)) - 1 for i in range(1, spec.K + 1)]
    onsite = OperatorMatrix.from_triplets(Space.HILBERT, spec.K, diagonal, diagonal, [spec.U] * spec.K)
    return kinetic + onsite


def _moved_modes(p_from: ModePair, p_to: ModePair):
    remaining = [p_to.i, p_to.j]
    moved_from = []
    for mode in (p_from.i, p_from.j):
        if mode in remaining:
            remaining.remove(mode)
        else:
            moved_from.append(mode)
    return moved_from, remaining


def exchange_term_expansion(p_from: ModePair, p_to: ModePair, J: float) -> List[ExchangeDyad]:
    """Hilbert dyads of -J |p_to>_s <p_from|_s for bosonic pairs one hop apart."""
    for label, pair in (("p_from", p_from), ("p_to", p_to)):
        if pair.i > pair.j:
            raise DomainError(f"{label}={pair} is not an ordered bosonic pair")
    moved_from, moved_to = _moved_modes(p_from, p_to)
    if len(moved_from) != 1 or abs(moved_from[0] - moved_to[0]) != 1:
        raise DomainError(f"{p_from} and {p_to} are not connected by a single nearest-neighbour hop")
    K = max(p_from.j, p_to.j)
    index, coeff = sector_images(K, Statistics.BOSON)
    pairs = enumerate_basis(K, Statistics.BOSON)
    ket_row, bra_row = pairs.index(p_to), pairs.index(p_from)
    dyads = []
    for a in range(2):
        for b in range(2):
            weight = coeff[ket_row, a] * coeff[bra_row, b]
            if weight == 0.0:
                continue
            ket_idx, bra_idx = int(index[ket_row, a]), int(index[bra_row, b])
            dyads.append(
                ExchangeDyad(
                    ket=ModePair(i=ket_idx // K + 1, j=ket_idx % K + 1),
                    bra=ModePair(i=bra_idx // K + 1, j=bra_idx % K + 1),
                    coefficient=-J * weight,
                )
            )
    return dyads
