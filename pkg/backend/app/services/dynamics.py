# backend/app/services/dynamics.py
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.operators import DensityMatrix, OperatorMatrix, StateVector
from app.models.statistics import Space, Statistics
from app.services.basis import enumerate_pairs
from app.services.symmetry import projector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvolutionPlan:
    """Hamiltonian, time grid (units hbar/J) and initial state in one space."""

    hamiltonian: OperatorMatrix
    times: Tuple[float, ...]
    initial: StateVector

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        H, psi = self.hamiltonian, self.initial
        if (H.space, H.K) != (psi.space, psi.K):
            raise DomainError(
                f"Hamiltonian acts on {H.space.value}(K={H.K}) but the initial state lives on "
                f"{psi.space.value}(K={psi.K})"
            )
        error = H.hermiticity_error()
        if error > settings.HERMITIAN_ATOL:
            raise DomainError(f"Hamiltonian is not Hermitian (max deviation {error:.3e})")
        if abs(psi.norm - 1.0) > settings.INITIAL_NORM_ATOL:
            raise DomainError(f"initial state must have unit norm, got {psi.norm:.12g}")
        if any(t < 0 for t in times):
            raise DomainError("time points must be non-negative")
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise DomainError("time points must be strictly increasing")


class Propagator:
    """exp(-iHt) through one Hermitian eigendecomposition, reused for every time."""

    def __init__(self, hamiltonian: OperatorMatrix):
        error = hamiltonian.hermiticity_error()
        if error > settings.HERMITIAN_ATOL:
            raise DomainError(f"Hamiltonian is not Hermitian (max deviation {error:.3e})")
        self.hamiltonian = hamiltonian
        self.energies, self.eigenvectors = linalg.eigh(hamiltonian.toarray())
        logger.info(f"diagonalized {hamiltonian.dim}x{hamiltonian.dim} Hamiltonian on {hamiltonian.space.value}")

    def evolve(self, initial: StateVector, times: Sequence[float]) -> List[StateVector]:
        coefficients = self.eigenvectors.conj().T @ initial.amplitudes
        states = []
        for t in times:
            if t == 0:
                amplitudes = initial.amplitudes.copy()
            else:
                amplitudes = self.eigenvectors @ (np.exp(-1j * self.energies * t) * coefficients)
            norm = np.linalg.norm(amplitudes)
            if abs(norm - 1.0) > settings.EVOLVED_NORM_ATOL:
                logger.warning(f"norm drift {abs(norm - 1.0):.3e} at t={t}")
            states.append(StateVector(space=initial.space, K=initial.K, amplitudes=amplitudes))
        return states


def evolve(plan: EvolutionPlan) -> List[StateVector]:
    """|psi(t)> = exp(-iHt)|psi(0)> at every time of the plan."""
    return Propagator(plan.hamiltonian).evolve(plan.initial, plan.times)


def expectation_value(op: OperatorMatrix, state: StateVector) -> float:
    if (op.space, op.K) != (state.space, state.K):
        raise DomainError("operator and state live on different spaces")
    return float(np.vdot(state.amplitudes, op.entries @ state.amplitudes).real)


def sector_leakage(state: StateVector, stat: Statistics) -> float:
    """Norm of the component of a Hilbert state outside the given symmetry sector."""
    if state.space is not Space.HILBERT:
        raise DomainError("sector leakage is measured on Hilbert states")
    wrong = Statistics.FERMION if stat is Statistics.BOSON else Statistics.BOSON
    return float(np.linalg.norm(projector(state.K, wrong).entries @ state.amplitudes))


def density_from_state(psi: StateVector) -> DensityMatrix:
    if abs(psi.norm - 1.0) > settings.STATE_NORM_ATOL:
        raise DomainError(f"state must have unit norm, got {psi.norm:.12g}")
    return DensityMatrix(space=psi.space, K=psi.K, entries=np.outer(psi.amplitudes, psi.amplitudes.conj()))


def dephased_density(states: Sequence[StateVector], weights: Optional[Sequence[float]] = None) -> DensityMatrix:
    """Incoherent mixture sum_t w_t |psi_t><psi_t| of states on one space."""
    if not states:
        raise DomainError("dephased_density needs at least one state")
    space, K = states[0].space, states[0].K
    if any((s.space, s.K) != (space, K) for s in states):
        raise DomainError("all states of a mixture must live on the same space")
    w = np.full(len(states), 1.0 / len(states)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(states),) or np.any(w < 0) or abs(w.sum() - 1.0) > settings.TRACE_ATOL:
        raise DomainError("mixture weights must be non-negative, one per state, summing to 1")
    entries = sum(weight * np.outer(s.amplitudes, s.amplitudes.conj()) for weight, s in zip(w, states))
    return DensityMatrix(space=space, K=K, entries=entries)


def occupation_numbers(rho: DensityMatrix) -> np.ndarray:
    """<n_k> for every mode.

    Hilbert: 2 sum_i rho_{ik;ik}. Fock: 2 rho_{kk;kk} + sum_{i<k} rho_{ik;ik} + sum_{j>k} rho_{kj;kj}.
    """
    diagonal = np.real(np.diag(rho.entries))
    K = rho.K
    if rho.space is Space.HILBERT:
        return 2.0 * diagonal.reshape(K, K).sum(axis=0)
    pairs = np.asarray(enumerate_pairs(K, rho.space.statistics)) - 1
    occupations = np.zeros(K)
    np.add.at(occupations, pairs[:, 0], diagonal)
    np.add.at(occupations, pairs[:, 1], diagonal)
    return occupations


@dataclass(frozen=True)
class EntropyReport:
    normalized: float
    unnormalized: float
    dimension: int


def _spectrum(rho: DensityMatrix) -> np.ndarray:
    eigenvalues = rho.eigenvalues()
    if eigenvalues[0] < -settings.PSD_ATOL:
        raise DomainError(f"density matrix has negative eigenvalue {eigenvalues[0]:.3e}")
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return eigenvalues[eigenvalues > settings.EIGEN_FLOOR]


def entropy_report(rho: DensityMatrix) -> EntropyReport:
    """-Tr[rho ln rho], also divided by ln d with d the dimension of rho's space."""
    spectrum = _spectrum(rho)
    unnormalized = float(-np.sum(spectrum * np.log(spectrum)))
    unnormalized = max(unnormalized, 0.0)
    dimension = rho.dim
    normalized = unnormalized / math.log(dimension) if dimension > 1 else 0.0
    return EntropyReport(normalized=normalized, unnormalized=unnormalized, dimension=dimension)


def von_neumann_entropy(rho: DensityMatrix, base: Optional[float] = None) -> float:
    """Normalized entropy in [0, 1]; with ``base`` the unnormalized -Tr[rho log_base rho]."""
    report = entropy_report(rho)
    if base is None:
        return report.normalized
    return report.unnormalized / math.log(base)
