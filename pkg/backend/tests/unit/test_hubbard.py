# backend/tests/unit/test_hubbard.py
import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import DomainError
from app.models.lattice import Boundary, LatticeSpec
from app.models.operators import OperatorMatrix
from app.models.statistics import ModePair, Space, Statistics
from app.services.basis import index_fock, index_hilbert
from app.services.hubbard import (
    exchange_term_expansion,
    hubbard_hamiltonian,
    hubbard_hamiltonian_hilbert,
    interaction_fock,
    kinetic_fock,
    kinetic_hilbert,
    single_particle_hopping,
)
from app.services.reshape import fock_to_hilbert_op, hilbert_to_fock_op
from app.services.symmetry import is_permutation_symmetric

BOSON, FERMION = Statistics.BOSON, Statistics.FERMION


def fock_element(op, stat, bra, ket):
    K = op.K
    return op.toarray()[index_fock(K, stat, ModePair.of(*bra)) - 1, index_fock(K, stat, ModePair.of(*ket)) - 1]


class TestLatticeSpec:
    def test_periodic_bonds_wrap(self):
        assert LatticeSpec(K=4, bc=Boundary.PERIODIC).bonds() == [(1, 2), (2, 3), (3, 4), (4, 1)]
        assert LatticeSpec(K=4).bonds() == [(1, 2), (2, 3), (3, 4)]

    def test_periodic_pair_is_rejected(self):
        with pytest.raises(ValidationError, match="double-counts"):
            LatticeSpec(K=2, bc=Boundary.PERIODIC)

    def test_non_finite_hopping(self):
        with pytest.raises(ValidationError, match="finite"):
            LatticeSpec(K=3, J=float("nan"))

    def test_single_particle_hopping(self):
        h = single_particle_hopping(LatticeSpec(K=3, J=2.0)).toarray()
        np.testing.assert_allclose(h, -2.0 * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]))


class TestKineticHilbert:
    def test_single_hop(self):
        T = kinetic_hilbert(LatticeSpec(K=3, J=1.5)).toarray()
        assert T[index_hilbert(3, ModePair(i=1, j=1)) - 1, index_hilbert(3, ModePair(i=2, j=1)) - 1] == -1.5

    def test_reports_stored_nonzeros_only(self, caplog):
        caplog.set_level(logging.INFO, logger="app.services.hubbard")
        T = kinetic_hilbert(LatticeSpec(K=2))
        assert np.count_nonzero(T.toarray()) == 8
        assert "nnz=8" in caplog.text

    @pytest.mark.parametrize("bc", list(Boundary))
    def test_permutation_symmetric_and_traceless(self, bc):
        T = kinetic_hilbert(LatticeSpec(K=4, bc=bc))
        assert is_permutation_symmetric(T)
        assert np.trace(T.toarray()) == 0


class TestKineticFock:
    def test_boson_hop_out_of_double_occupancy(self):
        T = kinetic_fock(LatticeSpec(K=5, J=1.0), BOSON)
        for k in range(1, 5):
            assert fock_element(T, BOSON, (k, k + 1), (k, k)) == pytest.approx(-math.sqrt(2), abs=1e-12)

    def test_boson_single_hop(self):
        T = kinetic_fock(LatticeSpec(K=5, J=0.7), BOSON)
        for k in range(1, 6):
            for l in range(1, 5):
                if l in (k, k - 1) or l < k:
                    continue
                assert fock_element(T, BOSON, (k, l + 1), (k, l)) == pytest.approx(-0.7, abs=1e-12)

    def test_fermion_boundary_sign_from_reordering(self):
        T = kinetic_fock(LatticeSpec(K=4, J=1.0, bc=Boundary.PERIODIC), FERMION)
        assert fock_element(T, FERMION, (1, 2), (2, 4)) == pytest.approx(1.0, abs=1e-12)
        assert fock_element(T, FERMION, (1, 3), (3, 4)) == pytest.approx(1.0, abs=1e-12)
        assert fock_element(T, FERMION, (1, 4), (2, 4)) == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("K", [3, 4, 5, 6])
    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    @pytest.mark.parametrize("bc", list(Boundary))
    def test_matches_reshaped_hilbert_operator(self, K, stat, bc):
        spec = LatticeSpec(K=K, J=1.3, bc=bc)
        reshaped = hilbert_to_fock_op(kinetic_hilbert(spec), stat)
        np.testing.assert_allclose(reshaped.toarray(), kinetic_fock(spec, stat).toarray(), atol=1e-12)

    def test_spectrum_splits_into_sectors(self):
        spec = LatticeSpec(K=5, bc=Boundary.PERIODIC)
        hilbert = np.linalg.eigvalsh(kinetic_hilbert(spec).toarray())
        sectors = np.concatenate([np.linalg.eigvalsh(kinetic_fock(spec, stat).toarray()) for stat in (BOSON, FERMION)])
        np.testing.assert_allclose(np.sort(hilbert), np.sort(sectors), atol=1e-9)

    def test_two_mode_fermion_chain_cannot_hop(self):
        T = kinetic_fock(LatticeSpec(K=2, J=1.7), FERMION)
        assert T.toarray().shape == (1, 1)
        assert T.toarray()[0, 0] == 0

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_hermitian(self, stat):
        assert kinetic_fock(LatticeSpec(K=6, bc=Boundary.PERIODIC), stat).is_hermitian()


class TestInteraction:
    def test_zero_interaction_is_kinetic(self):
        spec = LatticeSpec(K=4)
        np.testing.assert_array_equal(hubbard_hamiltonian(spec, BOSON).toarray(), kinetic_fock(spec, BOSON).toarray())

    def test_counts_double_occupancy(self):
        H = hubbard_hamiltonian(LatticeSpec(K=2, J=0.0, U=5.0), BOSON)
        np.testing.assert_allclose(np.diag(H.toarray()).real, [5.0, 0.0, 5.0])

    def test_fermions_never_interact(self):
        assert not interaction_fock(LatticeSpec(K=4, U=3.0), FERMION).toarray().any()

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_hilbert_hamiltonian_reshapes_to_fock(self, stat):
        spec = LatticeSpec(K=4, U=2.5, bc=Boundary.PERIODIC)
        H_H = hubbard_hamiltonian_hilbert(spec)
        assert H_H.space is Space.HILBERT
        np.testing.assert_allclose(
            hilbert_to_fock_op(H_H, stat).toarray(), hubbard_hamiltonian(spec, stat).toarray(), atol=1e-12
        )


class TestExchangeExpansion:
    def test_off_diagonal_hop_has_four_dyads(self):
        dyads = exchange_term_expansion(ModePair(i=1, j=3), ModePair(i=2, j=3), J=1.0)
        assert len(dyads) == 4
        assert all(d.coefficient == pytest.approx(-0.5) for d in dyads)
        assert {(d.ket.as_tuple(), d.bra.as_tuple()) for d in dyads} == {
            ((2, 3), (1, 3)), ((2, 3), (3, 1)), ((3, 2), (1, 3)), ((3, 2), (3, 1)),
        }

    def test_hop_out_of_double_occupancy(self):
        dyads = exchange_term_expansion(ModePair(i=2, j=2), ModePair(i=2, j=3), J=1.0)
        assert len(dyads) == 2
        assert all(d.coefficient == pytest.approx(-1 / math.sqrt(2)) for d in dyads)

    def test_squared_coefficients_match_reshaped_element(self):
        dyads = exchange_term_expansion(ModePair(i=1, j=2), ModePair(i=1, j=3), J=2.0)
        assert sum(d.coefficient ** 2 for d in dyads) == pytest.approx(2.0 ** 2)

    def test_dyads_agree_with_reshaped_fock_element(self):
        K = 3
        entries = np.zeros((6, 6), dtype=complex)
        row = index_fock(K, BOSON, ModePair(i=2, j=3)) - 1
        col = index_fock(K, BOSON, ModePair(i=1, j=3)) - 1
        entries[row, col] = -1.0
        hilbert = fock_to_hilbert_op(OperatorMatrix(space=Space.BOSON_FOCK, K=K, entries=entries)).toarray()
        for d in exchange_term_expansion(ModePair(i=1, j=3), ModePair(i=2, j=3), J=1.0):
            assert hilbert[index_hilbert(K, d.ket) - 1, index_hilbert(K, d.bra) - 1] == pytest.approx(d.coefficient)

    def test_rejects_pairs_not_one_hop_apart(self):
        with pytest.raises(DomainError, match="single nearest-neighbour hop"):
            exchange_term_expansion(ModePair(i=1, j=2), ModePair(i=3, j=4), J=1.0)
        with pytest.raises(DomainError, match="not an ordered bosonic pair"):
            exchange_term_expansion(ModePair(i=2, j=1), ModePair(i=2, j=2), J=1.0)
