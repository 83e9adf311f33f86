# backend/app/services/run_service.py
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, TextIO

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.operators import StateVector
from app.models.run_config import RunConfig
from app.models.statistics import ModePair, Space, Statistics
from app.services import output_service
from app.services.basis import enumerate_basis, index_fock, index_hilbert
from app.services.dynamics import EvolutionPlan, density_from_state, entropy_report, evolve, occupation_numbers
from app.services.hubbard import hubbard_hamiltonian, hubbard_hamiltonian_hilbert
from app.services.reshape import hilbert_to_fock_density
from app.services.symmetry import rect_symmetrizer, symmetrize_state

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    times: np.ndarray
    fock_states: List[StateVector]
    occupations: List[np.ndarray]
    entropies: List[tuple]
    written: List[Path]


def initial_fock_state(config: RunConfig) -> StateVector:
    """Initial state on the Fock space of the configured statistics.

    Hilbert amplitudes are (anti)symmetrized and renormalized; with
    ``already_symmetrized`` the terms are Fock coefficients and must already
    have unit norm.
    """
    stat = config.statistics
    if config.already_symmetrized:
        space = Space.fock(stat)
        amplitudes = np.zeros(space.dimension(config.K), dtype=complex)
        for term in config.initial:
            amplitudes[index_fock(config.K, stat, ModePair.of(*term.pair)) - 1] += term.value
        state = StateVector(space=space, K=config.K, amplitudes=amplitudes)
        if abs(state.norm - 1.0) > settings.STATE_NORM_ATOL:
            raise DomainError(f"already symmetrized initial state must have unit norm, got {state.norm:.12g}")
        return state
    amplitudes = np.zeros(config.K * config.K, dtype=complex)
    for term in config.initial:
        amplitudes[index_hilbert(config.K, ModePair.of(*term.pair)) - 1] += term.value
    return symmetrize_state(StateVector(space=Space.HILBERT, K=config.K, amplitudes=amplitudes), stat)


def _hilbert_image(state: StateVector, stat: Statistics) -> StateVector:
    rect = rect_symmetrizer(state.K, stat).entries
    return StateVector(space=Space.HILBERT, K=state.K, amplitudes=rect.T @ state.amplitudes)


def _fock_image(state: StateVector, stat: Statistics) -> StateVector:
    rect = rect_symmetrizer(state.K, stat).entries
    return StateVector(space=Space.fock(stat), K=state.K, amplitudes=rect @ state.amplitudes)


def check(config: RunConfig) -> StateVector:
    """Every precondition of the pipeline, without evolving or writing anything."""
    config.lattice()
    state = initial_fock_state(config)
    logger.info(
        f"config ok: K={config.K}, {config.statistics.value}, bc={config.bc.value}, "
        f"{config.times.steps} time points, outputs={list(config.outputs)}"
    )
    return state


def simulate(config: RunConfig) -> RunResult:
    stat = config.statistics
    spec = config.lattice()
    fock_initial = initial_fock_state(config)
    times = config.times.points()
    occupations, entropies = [], []

    if config.propagate_in == "fock":
        plan = EvolutionPlan(hamiltonian=hubbard_hamiltonian(spec, stat), times=tuple(times), initial=fock_initial)
        fock_states = evolve(plan)
        for state in fock_states:
            rho = density_from_state(state.normalized())
            occupations.append(occupation_numbers(rho))
            report = entropy_report(rho)
            entropies.append((report.normalized, report.unnormalized))
    else:
        plan = EvolutionPlan(
            hamiltonian=hubbard_hamiltonian_hilbert(spec),
            times=tuple(times),
            initial=_hilbert_image(fock_initial, stat),
        )
        hilbert_states = evolve(plan)
        fock_states = [_fock_image(state, stat) for state in hilbert_states]
        for state in hilbert_states:
            rho = density_from_state(state.normalized())
            occupations.append(occupation_numbers(rho))
            report = entropy_report(hilbert_to_fock_density(rho, stat))
            entropies.append((report.normalized, report.unnormalized))

    logger.info(f"evolved {len(times)} time points in {config.propagate_in} space")
    return RunResult(times=times, fock_states=fock_states, occupations=occupations, entropies=entropies, written=[])


def write_outputs(config: RunConfig, result: RunResult, output_dir: Path) -> List[Path]:
    spec = config.lattice()
    written = []

    def emit(name: str, payload) -> None:
        path = Path(output_dir) / name
        if isinstance(payload, pd.DataFrame):
            output_service.write_csv(payload, path)
        else:
            output_service.write_json(payload, path)
        written.append(path)

    if "occupations" in config.outputs:
        emit("occupations.csv", output_service.occupations_frame(result.times, result.occupations))
    if "entropy" in config.outputs:
        normalized, unnormalized = zip(*result.entropies)
        emit("entropy.csv", output_service.entropy_frame(result.times, normalized, unnormalized))
    if "state" in config.outputs:
        emit("state.csv", output_service.state_frame(result.times, [s.amplitudes for s in result.fock_states]))
    if "fock_hamiltonian" in config.outputs:
        emit("fock_hamiltonian.json", output_service.operator_triplets(hubbard_hamiltonian(spec, config.statistics)))
    if "hilbert_hamiltonian" in config.outputs:
        emit("hilbert_hamiltonian.json", output_service.operator_triplets(hubbard_hamiltonian_hilbert(spec)))
    return written


def run(config: RunConfig, output_dir: Optional[Path] = None, dry_run: bool = False) -> RunResult:
    """Validate, evolve and write the requested artifacts."""
    if dry_run:
        check(config)
        return RunResult(times=config.times.points(), fock_states=[], occupations=[], entropies=[], written=[])
    result = simulate(config)
    result.written = write_outputs(config, result, output_dir or config.output_dir)
    return result


def index_table(K: int, stat: Statistics) -> pd.DataFrame:
    pairs = enumerate_basis(K, stat)
    return pd.DataFrame(
        {
            "m": [index_fock(K, stat, p) for p in pairs],
            "i": [p.i for p in pairs],
            "j": [p.j for p in pairs],
            "m_hilbert": [index_hilbert(K, p) for p in pairs],
        },
        columns=["m", "i", "j", "m_hilbert"],
    )


def emit_index_table(K: int, stat: Statistics, stream: TextIO = None) -> None:
    """Fock index, ordered pair and Hilbert index of every Fock basis state as CSV."""
    output_service.frame_to_csv(index_table(K, stat), stream or sys.stdout)
