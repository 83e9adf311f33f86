# backend/tests/unit/test_dynamics.py
import math

import numpy as np
import pytest

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.lattice import Boundary, LatticeSpec
from app.models.operators import DensityMatrix, OperatorMatrix, StateVector
from app.models.statistics import ModePair, Space, Statistics
from app.services.dynamics import (
    EvolutionPlan,
    Propagator,
    dephased_density,
    density_from_state,
    entropy_report,
    evolve,
    expectation_value,
    occupation_numbers,
    sector_leakage,
    von_neumann_entropy,
)
from app.services.fock_ladder import two_particle_fock_vector
from app.services.hubbard import kinetic_fock, kinetic_hilbert
from app.services.reshape import fock_to_hilbert_density, hilbert_to_fock_density
from app.services.symmetry import rect_symmetrizer, symmetrize_state

BOSON, FERMION = Statistics.BOSON, Statistics.FERMION
TIMES = tuple(np.linspace(0.0, 10.0, 10))


def hilbert_image(alpha: StateVector, stat: Statistics) -> StateVector:
    R = rect_symmetrizer(alpha.K, stat).toarray()
    return StateVector(space=Space.HILBERT, K=alpha.K, amplitudes=R.T @ alpha.amplitudes)


class TestEvolutionPlan:
    def test_rejects_non_hermitian(self):
        H = OperatorMatrix(space=Space.BOSON_FOCK, K=2, entries=np.triu(np.ones((3, 3), dtype=complex)))
        with pytest.raises(DomainError, match="not Hermitian"):
            EvolutionPlan(hamiltonian=H, times=(0.0,), initial=two_particle_fock_vector(ModePair(i=1, j=1), BOSON, 2))

    @pytest.mark.parametrize("times", [(0.0, 0.0), (1.0, 0.5), (-1.0, 1.0)])
    def test_rejects_bad_time_grid(self, times):
        spec = LatticeSpec(K=3)
        with pytest.raises(DomainError, match="time points"):
            EvolutionPlan(
                hamiltonian=kinetic_fock(spec, BOSON),
                times=times,
                initial=two_particle_fock_vector(ModePair(i=1, j=2), BOSON, 3),
            )

    def test_rejects_unnormalized_state(self):
        psi = StateVector(space=Space.BOSON_FOCK, K=3, amplitudes=np.ones(6))
        with pytest.raises(DomainError, match="unit norm"):
            EvolutionPlan(hamiltonian=kinetic_fock(LatticeSpec(K=3), BOSON), times=(0.0,), initial=psi)

    def test_initial_norm_tolerance(self, monkeypatch):
        amplitudes = np.zeros(6, dtype=complex)
        amplitudes[0] = 1.0 + 1e-9
        psi = StateVector(space=Space.BOSON_FOCK, K=3, amplitudes=amplitudes)
        H = kinetic_fock(LatticeSpec(K=3), BOSON)
        with pytest.raises(DomainError, match="unit norm"):
            EvolutionPlan(hamiltonian=H, times=(0.0,), initial=psi)
        monkeypatch.setattr(settings, "INITIAL_NORM_ATOL", 1e-6)
        assert EvolutionPlan(hamiltonian=H, times=(0.0,), initial=psi).initial is psi

    def test_rejects_mismatched_spaces(self):
        with pytest.raises(DomainError, match="lives on"):
            EvolutionPlan(
                hamiltonian=kinetic_hilbert(LatticeSpec(K=3)),
                times=(0.0,),
                initial=two_particle_fock_vector(ModePair(i=1, j=2), BOSON, 3),
            )


class TestEvolve:
    def test_time_zero_is_exact(self, random_state):
        psi = random_state(Space.BOSON_FOCK, 4)
        states = evolve(EvolutionPlan(hamiltonian=kinetic_fock(LatticeSpec(K=4), BOSON), times=(0.0, 1.0), initial=psi))
        np.testing.assert_array_equal(states[0].amplitudes, psi.amplitudes)

    def test_zero_hamiltonian_is_stationary(self, random_state):
        psi = random_state(Space.FERMION_FOCK, 4)
        zero = OperatorMatrix(space=Space.FERMION_FOCK, K=4, entries=np.zeros((6, 6), dtype=complex))
        for state in evolve(EvolutionPlan(hamiltonian=zero, times=TIMES, initial=psi)):
            np.testing.assert_allclose(state.amplitudes, psi.amplitudes, atol=1e-12)

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_hilbert_and_fock_evolution_agree(self, random_state, stat):
        spec = LatticeSpec(K=4, bc=Boundary.PERIODIC)
        alpha = random_state(Space.fock(stat), 4)
        psi = hilbert_image(alpha, stat)
        H_H, H_F = kinetic_hilbert(spec), kinetic_fock(spec, stat)
        hilbert_states = evolve(EvolutionPlan(hamiltonian=H_H, times=TIMES, initial=psi))
        fock_states = evolve(EvolutionPlan(hamiltonian=H_F, times=TIMES, initial=alpha))
        energy = expectation_value(H_H, psi)
        for in_hilbert, in_fock in zip(hilbert_states, fock_states):
            projected = symmetrize_state(in_hilbert, stat)
            assert np.max(np.abs(projected.amplitudes - in_fock.amplitudes)) <= 1e-9
            assert in_hilbert.norm == pytest.approx(1.0, abs=1e-9)
            assert expectation_value(H_H, in_hilbert) == pytest.approx(energy, abs=1e-9)
            assert sector_leakage(in_hilbert, stat) <= 1e-9

    def test_propagator_is_reusable(self, random_state):
        propagator = Propagator(kinetic_fock(LatticeSpec(K=3), BOSON))
        psi = random_state(Space.BOSON_FOCK, 3)
        once = propagator.evolve(psi, [2.0])[0]
        twice = propagator.evolve(propagator.evolve(psi, [1.0])[0], [1.0])[0]
        np.testing.assert_allclose(once.amplitudes, twice.amplitudes, atol=1e-12)


class TestOccupationNumbers:
    def test_doubly_occupied_boson(self):
        rho = density_from_state(two_particle_fock_vector(ModePair(i=1, j=1), BOSON, 3))
        np.testing.assert_allclose(occupation_numbers(rho), [2.0, 0.0, 0.0])

    def test_fermion_pair(self):
        rho = density_from_state(two_particle_fock_vector(ModePair(i=1, j=2), FERMION, 3))
        np.testing.assert_allclose(occupation_numbers(rho), [1.0, 1.0, 0.0])

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_hilbert_and_fock_formulas_agree(self, random_state, stat):
        for _ in range(50):
            alpha = random_state(Space.fock(stat), 5)
            rho_F = density_from_state(alpha)
            rho_H = density_from_state(hilbert_image(alpha, stat))
            n_F, n_H = occupation_numbers(rho_F), occupation_numbers(rho_H)
            np.testing.assert_allclose(n_F, n_H, atol=1e-12)
            assert n_F.sum() == pytest.approx(2.0, abs=1e-10)


class TestDensityFromState:
    def test_pure_state_is_rank_one(self, random_state):
        rho = density_from_state(random_state(Space.HILBERT, 3))
        assert np.trace(rho.entries).real == pytest.approx(1.0)
        eigenvalues = rho.eigenvalues()
        assert eigenvalues[-1] == pytest.approx(1.0)
        np.testing.assert_allclose(eigenvalues[:-1], 0.0, atol=1e-12)

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_exchange_symmetry_of_elements(self, random_state, stat):
        K = 4
        rho = density_from_state(hilbert_image(random_state(Space.fock(stat), K), stat)).entries
        swap = np.arange(K * K).reshape(K, K).T.reshape(-1)
        np.testing.assert_allclose(rho[swap, :], stat.g * rho, atol=1e-12)

    def test_rejects_unnormalized_state(self):
        psi = StateVector(space=Space.BOSON_FOCK, K=2, amplitudes=[1.0, 1.0, 0.0])
        with pytest.raises(DomainError, match="unit norm"):
            density_from_state(psi)


class TestEntropy:
    def test_pure_state_has_zero_entropy(self, random_state):
        for space in (Space.HILBERT, Space.BOSON_FOCK):
            assert von_neumann_entropy(density_from_state(random_state(space, 4))) == pytest.approx(0.0, abs=1e-9)

    def test_maximally_mixed_fermions(self):
        rho = DensityMatrix(space=Space.FERMION_FOCK, K=4, entries=np.eye(6) / 6)
        report = entropy_report(rho)
        assert report.normalized == pytest.approx(1.0)
        assert report.unnormalized == pytest.approx(math.log(6))
        assert von_neumann_entropy(rho, base=2) == pytest.approx(math.log2(6))

    def test_single_state_space_has_zero_normalized_entropy(self):
        rho = DensityMatrix(space=Space.FERMION_FOCK, K=2, entries=np.ones((1, 1)))
        assert entropy_report(rho).normalized == 0.0

    def test_negative_eigenvalue_is_rejected(self):
        with pytest.raises(DomainError, match="negative eigenvalue"):
            DensityMatrix(space=Space.BOSON_FOCK, K=2, entries=np.diag([0.7, 0.5, -0.2]))

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_fock_entropy_exceeds_hilbert_entropy(self, random_state, stat):
        K = 4
        spec = LatticeSpec(K=K)
        alpha = random_state(Space.fock(stat), K)
        states = evolve(EvolutionPlan(hamiltonian=kinetic_fock(spec, stat), times=TIMES, initial=alpha))
        rho_F = dephased_density(states)
        rho_H = fock_to_hilbert_density(rho_F)

        spectrum_F, spectrum_H = rho_F.eigenvalues(), rho_H.eigenvalues()
        padded = np.concatenate([np.zeros(K * K - rho_F.dim), spectrum_F])
        np.testing.assert_allclose(np.sort(spectrum_H), np.sort(padded), atol=1e-10)

        S_F, S_H = von_neumann_entropy(rho_F), von_neumann_entropy(rho_H)
        assert S_F > S_H > 0
        assert S_F / S_H == pytest.approx(math.log(K * K) / math.log(rho_F.dim), abs=1e-9)
        np.testing.assert_allclose(hilbert_to_fock_density(rho_H, stat).entries, rho_F.entries, atol=1e-12)

    def test_mixture_weights_are_checked(self, random_state):
        states = [random_state(Space.BOSON_FOCK, 3) for _ in range(2)]
        with pytest.raises(DomainError, match="summing to 1"):
            dephased_density(states, weights=[0.6, 0.6])
