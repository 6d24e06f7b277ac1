"""Simulated annealing and fixed-temperature Metropolis sampling."""

from __future__ import annotations

import time

import numpy as np

from ..ising import IsingProblem, all_energies_num
from ..rng import derive_kernel_seed
from .kernels import metropolis_anneal, metropolis_chain
from .samples import SampleSet
from .schedules import LINEAR_BETA, AnnealSchedule, linear_beta_schedule

# Single-spin Metropolis update cost on the reference build; the work-model
# clock is this constant times updates performed, so runs are reproducible.
DEFAULT_SECONDS_PER_UPDATE = 3.4e-8


def simulated_annealing(
    problem: IsingProblem,
    schedule: AnnealSchedule | None = None,
    num_reads: int = 1,
    seed: int = 0,
    seconds_per_update: float = DEFAULT_SECONDS_PER_UPDATE,
) -> SampleSet:
    """Independent annealing reads with full fixed-order Metropolis sweeps."""
    if num_reads < 1:
        raise ValueError("num_reads must be >= 1")
    if schedule is None:
        schedule = linear_beta_schedule()
    if schedule.kind != LINEAR_BETA:
        raise ValueError("simulated annealing needs a linear-beta schedule")
    betas = schedule.betas()
    indptr, indices, jslot = problem.adjacency_csr()
    jval = jslot.astype(np.float64) / problem.denom
    hval = problem.h_float()

    n = problem.num_vertices
    states = np.zeros((num_reads, n), dtype=np.int8)
    t0 = time.perf_counter()
    for r in range(num_reads):
        states[r] = metropolis_anneal(
            indptr, indices, jval, hval, betas, derive_kernel_seed(seed, r)
        )
    wall = time.perf_counter() - t0

    energy_num = all_energies_num(problem, states)
    per_read = schedule.sweeps * n * seconds_per_update
    read_times = np.full(num_reads, per_read)
    config = {
        "solver": "sa",
        "num_reads": num_reads,
        "seed": seed,
        "schedule": schedule.to_config(),
        "seconds_per_update": seconds_per_update,
    }
    return SampleSet("sa", config, states, energy_num, problem.denom, read_times, wall)


def sample_fixed_beta(
    problem: IsingProblem,
    beta: float,
    num_samples: int,
    thin: int = 1,
    burn_in: int = 0,
    seed: int = 0,
) -> np.ndarray:
    """States from one Metropolis chain at fixed beta, recorded every ``thin`` sweeps.

    Used to check detailed balance against exact Boltzmann frequencies.
    """
    if num_samples < 1 or thin < 1 or burn_in < 0:
        raise ValueError("bad chain parameters")
    indptr, indices, jslot = problem.adjacency_csr()
    jval = jslot.astype(np.float64) / problem.denom
    hval = problem.h_float()
    return metropolis_chain(
        indptr, indices, jval, hval, float(beta), num_samples, thin, burn_in,
        derive_kernel_seed(seed, 0),
    )
