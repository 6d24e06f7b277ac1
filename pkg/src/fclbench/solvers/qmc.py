"""Discrete-time path-integral quantum Monte Carlo.

P cyclic Trotter slices evolve under Metropolis at unit effective
temperature on

    E_eff = (beta/P) B(l) sum_k E(s^k) - K(l) sum_{i,k} s_i^k s_i^{k+1},

with the Suzuki-Trotter inter-slice coupling K(l) = ln(coth(beta A(l)/P))/2.
Where the schedule drives A to zero, K diverges; its value is clamped to the
last schedule point with positive A, which freezes the slices together for
the final sweep instead of overflowing.
"""

from __future__ import annotations

import time

import numpy as np

from ..ising import IsingProblem, all_energies_num
from ..rng import derive_kernel_seed, derive_rng
from .kernels import qmc_anneal
from .sa import DEFAULT_SECONDS_PER_UPDATE
from .samples import SampleSet
from .schedules import TRANSVERSE_FIELD, AnnealSchedule, transverse_field_schedule

DEFAULT_BETA = 30.0
DEFAULT_SLICES = 64
DEFAULT_SWEEPS = 10_000

MIN_SLICE_READOUT = "min_slice"
RANDOM_SLICE_READOUT = "random_slice"
_READOUT_STREAM = 7  # rng path tag for the sampling-mode slice draw


def slice_couplings(a_vals: np.ndarray, beta: float, slices: int) -> np.ndarray:
    """K per sweep, with zero-A points clamped to the last positive A."""
    a = np.asarray(a_vals, dtype=np.float64).copy()
    positive = a > 0.0
    if not positive.any():
        raise ValueError("schedule never has positive transverse field")
    floor = a[positive].min()
    a[~positive] = floor
    return 0.5 * np.log(1.0 / np.tanh(beta * a / slices))


def qmc_discrete(
    problem: IsingProblem,
    schedule: AnnealSchedule | None = None,
    beta: float = DEFAULT_BETA,
    slices: int = DEFAULT_SLICES,
    num_reads: int = 1,
    seed: int = 0,
    readout: str = MIN_SLICE_READOUT,
    seconds_per_update: float = DEFAULT_SECONDS_PER_UPDATE,
) -> SampleSet:
    """Anneal worldlines; return one slice per read.

    ``min_slice`` readout serves optimization (TTS), ``random_slice`` serves
    sampling metrics.
    """
    if num_reads < 1:
        raise ValueError("num_reads must be >= 1")
    if slices < 1:
        raise ValueError("slices must be >= 1")
    if readout not in (MIN_SLICE_READOUT, RANDOM_SLICE_READOUT):
        raise ValueError(f"unknown readout {readout!r}")
    if schedule is None:
        schedule = transverse_field_schedule(DEFAULT_SWEEPS)
    if schedule.kind != TRANSVERSE_FIELD:
        raise ValueError("qmc needs a transverse-field schedule")
    a_vals = schedule.a_values()
    b_vals = schedule.b_values()
    bB = beta * b_vals / slices
    kappa = slice_couplings(a_vals, beta, slices)
    indptr, indices, jslot = problem.adjacency_csr()
    jval = jslot.astype(np.float64) / problem.denom
    hval = problem.h_float()

    n = problem.num_vertices
    states = np.zeros((num_reads, n), dtype=np.int8)
    t0 = time.perf_counter()
    for r in range(num_reads):
        worldlines = qmc_anneal(
            indptr, indices, jval, hval, bB, kappa, slices, derive_kernel_seed(seed, r)
        )
        if readout == MIN_SLICE_READOUT:
            slice_energies = all_energies_num(problem, worldlines)
            states[r] = worldlines[int(np.argmin(slice_energies))]
        else:
            pick = int(derive_rng(seed, _READOUT_STREAM, r).integers(slices))
            states[r] = worldlines[pick]
    wall = time.perf_counter() - t0

    energy_num = all_energies_num(problem, states)
    per_read = schedule.sweeps * n * slices * seconds_per_update
    read_times = np.full(num_reads, per_read)
    config = {
        "solver": "qmc",
        "num_reads": num_reads,
        "seed": seed,
        "beta": beta,
        "slices": slices,
        "readout": readout,
        "schedule": schedule.to_config(),
        "seconds_per_update": seconds_per_update,
    }
    return SampleSet("qmc", config, states, energy_num, problem.denom, read_times, wall)
