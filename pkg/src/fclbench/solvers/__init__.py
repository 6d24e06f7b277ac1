"""Heuristic samplers: SA, SVMC, discrete-time QMC, and tailored HFS."""

from .hfs import hfs_solve, prepare_hfs
from .qmc import qmc_discrete
from .sa import sample_fixed_beta, simulated_annealing
from .samples import SampleSet
from .schedules import AnnealSchedule, linear_beta_schedule, transverse_field_schedule
from .svmc import svmc

__all__ = [
    "AnnealSchedule",
    "SampleSet",
    "hfs_solve",
    "linear_beta_schedule",
    "prepare_hfs",
    "qmc_discrete",
    "sample_fixed_beta",
    "simulated_annealing",
    "svmc",
    "transverse_field_schedule",
]
