"""Anneal schedules evaluated on the normalized clock lambda = t/(sweeps-1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINEAR_BETA = "linear-beta"
TRANSVERSE_FIELD = "transverse-field"


@dataclass(frozen=True)
class AnnealSchedule:
    """Either a linear beta ramp or a transverse-field (A, B) crossing.

    ``a_points``/``b_points`` are piecewise-linear breakpoints on [0, 1];
    the default transverse-field schedule takes A from 1 to 0 and B from 0
    to 1 linearly.
    """

    kind: str
    sweeps: int
    beta_start: float = 0.01
    beta_end: float = 3.0
    a_points: tuple[tuple[float, float], ...] = ((0.0, 1.0), (1.0, 0.0))
    b_points: tuple[tuple[float, float], ...] = ((0.0, 0.0), (1.0, 1.0))

    def __post_init__(self):
        if self.kind not in (LINEAR_BETA, TRANSVERSE_FIELD):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be >= 1, got {self.sweeps}")

    def lambdas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([1.0])
        return np.arange(self.sweeps) / (self.sweeps - 1)

    def betas(self) -> np.ndarray:
        if self.kind != LINEAR_BETA:
            raise ValueError("betas() requires a linear-beta schedule")
        return self.beta_start + (self.beta_end - self.beta_start) * self.lambdas()

    def a_values(self) -> np.ndarray:
        return self._interp(self.a_points)

    def b_values(self) -> np.ndarray:
        return self._interp(self.b_points)

    def _interp(self, points) -> np.ndarray:
        if self.kind != TRANSVERSE_FIELD:
            raise ValueError("field values require a transverse-field schedule")
        xs = np.array([p[0] for p in points])
        ys = np.array([p[1] for p in points])
        return np.interp(self.lambdas(), xs, ys)

    def to_config(self) -> dict:
        cfg = {"kind": self.kind, "sweeps": self.sweeps}
        if self.kind == LINEAR_BETA:
            cfg["beta_start"] = self.beta_start
            cfg["beta_end"] = self.beta_end
        else:
            cfg["a_points"] = [list(p) for p in self.a_points]
            cfg["b_points"] = [list(p) for p in self.b_points]
        return cfg


def linear_beta_schedule(sweeps: int = 100_000, beta_start: float = 0.01, beta_end: float = 3.0) -> AnnealSchedule:
    """The default SA ramp: beta 0.01 -> 3, linear."""
    return AnnealSchedule(LINEAR_BETA, sweeps, beta_start=beta_start, beta_end=beta_end)


def transverse_field_schedule(sweeps: int) -> AnnealSchedule:
    """A decreasing 1 -> 0, B increasing 0 -> 1, both linear."""
    return AnnealSchedule(TRANSVERSE_FIELD, sweeps)
