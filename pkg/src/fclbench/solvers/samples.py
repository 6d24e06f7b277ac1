"""Sample sets returned by every solver."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class SampleSet:
    """Ordered per-read records: state, exact energy, cumulative anneal time.

    Anneal times come from a deterministic work model (updates performed
    times a configured seconds-per-update constant), so identical seeds give
    identical sample sets byte for byte.  The measured kernel wall time is
    kept separately for calibration logs.
    """

    solver_id: str
    config: dict = field(repr=False)
    states: np.ndarray = field(repr=False)     # (k, n) int8
    energy_num: np.ndarray = field(repr=False)  # (k,) int64 numerators
    denom: int = 1
    read_times: np.ndarray = field(default=None, repr=False)  # (k,) seconds
    wall_time: float = 0.0

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.shape[0] != self.energy_num.shape[0]:
            raise ValueError("states and energies disagree on read count")
        if self.read_times is None or self.read_times.shape != self.energy_num.shape:
            raise ValueError("read_times must have one entry per read")
        if np.any(self.read_times < 0):
            raise ValueError("read times must be nonnegative")

    @property
    def num_reads(self) -> int:
        return self.states.shape[0]

    @property
    def anneal_times(self) -> np.ndarray:
        """Cumulative anneal seconds at the end of each read (nondecreasing)."""
        return np.cumsum(self.read_times)

    @property
    def total_anneal_time(self) -> float:
        return float(self.read_times.sum())

    @property
    def mean_time_per_anneal(self) -> float:
        return float(self.read_times.mean())

    def energy(self, i: int) -> Fraction:
        return Fraction(int(self.energy_num[i]), self.denom)

    def energies(self) -> list[Fraction]:
        return [Fraction(int(e), self.denom) for e in self.energy_num]

    def min_energy(self) -> Fraction:
        return Fraction(int(self.energy_num.min()), self.denom)

    def records(self):
        times = self.anneal_times
        for i in range(self.num_reads):
            yield self.states[i], self.energy(i), float(times[i])
