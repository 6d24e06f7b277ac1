"""Spin-vector Monte Carlo: mean-field rotor approximation to the quantum walk.

Each spin is an angle in [0, pi] evolving under Metropolis at fixed beta on
    -A(l) sum_i sin(theta_i)
        + B(l) [sum_i h_i cos(theta_i) + sum_ij J_ij cos(theta_i) cos(theta_j)],
with uniform angle proposals.  The returned classical state is
sign(cos(theta)) with exact zeros broken uniformly.
"""

from __future__ import annotations

import time

import numpy as np

from ..ising import IsingProblem, all_energies_num
from ..rng import derive_kernel_seed
from .kernels import svmc_anneal
from .sa import DEFAULT_SECONDS_PER_UPDATE
from .samples import SampleSet
from .schedules import TRANSVERSE_FIELD, AnnealSchedule, transverse_field_schedule

DEFAULT_BETA = 30.0
DEFAULT_SWEEPS = 100_000


def svmc(
    problem: IsingProblem,
    schedule: AnnealSchedule | None = None,
    beta: float = DEFAULT_BETA,
    num_reads: int = 1,
    seed: int = 0,
    seconds_per_update: float = DEFAULT_SECONDS_PER_UPDATE,
) -> SampleSet:
    if num_reads < 1:
        raise ValueError("num_reads must be >= 1")
    if schedule is None:
        schedule = transverse_field_schedule(DEFAULT_SWEEPS)
    if schedule.kind != TRANSVERSE_FIELD:
        raise ValueError("svmc needs a transverse-field schedule")
    a_vals = schedule.a_values()
    b_vals = schedule.b_values()
    indptr, indices, jslot = problem.adjacency_csr()
    jval = jslot.astype(np.float64) / problem.denom
    hval = problem.h_float()

    n = problem.num_vertices
    states = np.zeros((num_reads, n), dtype=np.int8)
    t0 = time.perf_counter()
    for r in range(num_reads):
        states[r] = svmc_anneal(
            indptr, indices, jval, hval, a_vals, b_vals, float(beta),
            derive_kernel_seed(seed, r),
        )
    wall = time.perf_counter() - t0

    energy_num = all_energies_num(problem, states)
    per_read = schedule.sweeps * n * seconds_per_update
    read_times = np.full(num_reads, per_read)
    config = {
        "solver": "svmc",
        "num_reads": num_reads,
        "seed": seed,
        "beta": beta,
        "schedule": schedule.to_config(),
        "seconds_per_update": seconds_per_update,
    }
    return SampleSet("svmc", config, states, energy_num, problem.denom, read_times, wall)
