# backend/app/services/fock_ladder.py
"""Ladder operators on occupation-number states.

Bosons:   a+_i |..n_i..> = sqrt(n_i + 1) |..n_i + 1..>,  a_i |..n_i..> = sqrt(n_i) |..n_i - 1..>
Fermions: c+_i |..n_i..> = (1 - n_i)(-1)^s_i |..1 - n_i..>, c_i |..n_i..> = n_i (-1)^s_i |..1 - n_i..>
with s_i the number of particles in modes 1..i-1.

Number states are read as the ordered product c+_1^n_1 ... c+_K^n_K |0>, so the
two-fermion basis state |i,j>_a (i < j) is c+_i c+_j |0>.
"""
import logging
import math
from typing import Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.occupation import OccupationState
from app.models.operators import StateVector
from app.models.statistics import ModePair, Space, Statistics
from app.services.basis import check_modes, enumerate_pairs, index_fock

logger = logging.getLogger(__name__)


def _check_site(state: OccupationState, i: int) -> None:
    if not 1 <= i <= state.K:
        raise DomainError(f"mode index {i} outside 1..{state.K}")


def _jordan_wigner_sign(state: OccupationState, i: int) -> int:
    return -1 if sum(state.occ[: i - 1]) % 2 else 1


def vacuum(K: int, stat: Statistics) -> OccupationState:
    check_modes(K)
    return OccupationState(occ=(0,) * K, stat=stat)


def create(state: OccupationState, i: int) -> OccupationState:
    _check_site(state, i)
    if state.is_null:
        return state
    n_i = state.occ[i - 1]
    if state.stat is Statistics.BOSON:
        return state.with_mode(i, n_i + 1, math.sqrt(n_i + 1))
    if n_i == 1:
        return OccupationState.null(state.occ, state.stat)
    return state.with_mode(i, 1, _jordan_wigner_sign(state, i))


def annihilate(state: OccupationState, i: int) -> OccupationState:
    _check_site(state, i)
    if state.is_null:
        return state
    n_i = state.occ[i - 1]
    if n_i == 0:
        return OccupationState.null(state.occ, state.stat)
    if state.stat is Statistics.BOSON:
        return state.with_mode(i, n_i - 1, math.sqrt(n_i))
    # n_i = 1 here, so the 1 - n_i form of the fermionic rule leaves mode i empty
    return state.with_mode(i, 0, _jordan_wigner_sign(state, i))


def number_op(state: OccupationState, i: int) -> Tuple[int, OccupationState]:
    """Eigenvalue of n_i = a+_i a_i on a number state, with the state itself."""
    _check_site(state, i)
    return state.occ[i - 1], state


def apply_hop(state: OccupationState, to: int, frm: int) -> OccupationState:
    """c+_to c_frm applied to a number state."""
    return create(annihilate(state, frm), to)


def occupation_from_pair(p: ModePair, K: int, stat: Statistics) -> OccupationState:
    """Normalized number state of the ordered pair, built from the vacuum.

    Applies a+_j then a+_i and divides by sqrt(n_i!) per mode.
    """
    if p.j < p.i + stat.delta:
        raise DomainError(f"{p} is not an allowed {stat.value} pair")
    state = create(create(vacuum(K, stat), p.j), p.i)
    if state.is_null:
        raise DomainError(f"{stat.value} pair {p} has no Fock state")
    norm = math.sqrt(math.prod(math.factorial(n) for n in state.occ))
    return OccupationState(occ=state.occ, stat=stat, amplitude=state.amplitude / norm)


def pair_from_occupation(state: OccupationState) -> ModePair:
    """Ordered mode pair of a two-particle number state."""
    if state.total_particles != 2:
        raise DomainError(f"expected two particles, got occupation {state.occ}")
    modes = [i + 1 for i, n in enumerate(state.occ) for _ in range(n)]
    return ModePair(i=modes[0], j=modes[1])


def fock_index_of(state: OccupationState) -> int:
    return index_fock(state.K, state.stat, pair_from_occupation(state))


def two_particle_fock_vector(p: ModePair, stat: Statistics, K: int) -> StateVector:
    state = occupation_from_pair(p, K, stat)
    amplitudes = np.zeros(Space.fock(stat).dimension(K), dtype=complex)
    amplitudes[fock_index_of(state) - 1] = state.amplitude
    return StateVector(space=Space.fock(stat), K=K, amplitudes=amplitudes)


def _pair_amplitudes(U: np.ndarray, p: int, q: int, stat: Statistics) -> np.ndarray:
    """Fock amplitudes of b+_p b+_q |0> expanded over a+_j a+_l |0>."""
    K = U.shape[0]
    amplitudes = np.zeros(Space.fock(stat).dimension(K), dtype=complex)
    for j in range(1, K + 1):
        if U[j - 1, p - 1] == 0:
            continue
        for l in range(1, K + 1):
            weight = U[j - 1, p - 1] * U[l - 1, q - 1]
            if weight == 0:
                continue
            state = create(create(vacuum(K, stat), l), j)
            if state.is_null:
                continue
            amplitudes[fock_index_of(state) - 1] += weight * state.amplitude
    return amplitudes


def mode_change(U: np.ndarray, stat: Statistics) -> np.ndarray:
    """Two-particle Fock matrix induced by the single-particle change of basis U.

    Column m holds the new basis state |p,q>_b in the old Fock basis, with
    b+_i = sum_j <a_j|b_i> a+_j and <a_j|b_i> = U[j, i].
    """
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError(f"mode change must be a square matrix, got shape {U.shape}")
    K = U.shape[0]
    check_modes(K)
    deviation = float(np.max(np.abs(U.conj().T @ U - np.eye(K))))
    if deviation > settings.UNITARY_ATOL:
        raise DomainError(f"mode change is not unitary (max deviation {deviation:.3e})")
    pairs = enumerate_pairs(K, stat)
    induced = np.zeros((len(pairs), len(pairs)), dtype=complex)
    for m, (p, q) in enumerate(pairs):
        column = _pair_amplitudes(U, p, q, stat)
        if p == q:
            column /= math.sqrt(2.0)
        induced[:, m] = column
    logger.debug(f"induced {stat.value} mode change for K={K}: {len(pairs)}x{len(pairs)}")
    return induced
