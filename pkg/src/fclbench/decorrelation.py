"""Parallel tempering and classical hardness via temperature autocorrelation.

Replicas at increasing inverse temperatures (the hottest pinned at beta = 0
and redrawn uniformly every sweep) perform Metropolis sweeps plus adjacent
replica exchange.  The decorrelation timescale of a chain's random walk over
ladder slots -- its integrated autocorrelation time -- serves as the
hardness measure.  Ladders are calibrated per instance by iterating short
bursts and respacing interior temperatures by linear interpolation of the
log empirical exchange rates until all rates land in [1/3, 1/2].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSeriesError
from .ising import IsingProblem
from .rng import STREAM_PT, derive_kernel_seed
from .solvers.kernels import pt_run

BETA_MAX = 30.0
DEFAULT_REPLICAS = 32
RATE_LOW = 1.0 / 3.0
RATE_HIGH = 0.5
BURN_IN_FRACTION = 0.1


@dataclass(frozen=True)
class TemperatureLadder:
    """Increasing inverse temperatures with measured exchange rates."""

    betas: tuple[float, ...]
    exchange_rates: tuple[float, ...] = ()
    converged: bool = True
    note: str = ""

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) < 1:
            raise ValueError("ladder needs at least one temperature")
        if betas[0] != 0.0:
            raise ValueError("ladder must start at beta = 0")
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("betas must be strictly increasing")
        object.__setattr__(self, "betas", betas)

    @property
    def num_replicas(self) -> int:
        return len(self.betas)


@dataclass(frozen=True)
class PtTrace:
    """Per-sweep ladder positions of each chain plus per-slot energies."""

    betas: tuple[float, ...]
    index_series: np.ndarray = field(repr=False)    # (sweeps, n_rep) slot of chain
    energy_series: np.ndarray = field(repr=False)   # (sweeps, n_rep) int64 numerators
    denom: int = 1
    swap_accepts: np.ndarray = field(default=None, repr=False)
    swap_proposals: np.ndarray = field(default=None, repr=False)
    state_series: np.ndarray | None = field(default=None, repr=False)

    @property
    def sweeps(self) -> int:
        return self.index_series.shape[0]

    @property
    def num_replicas(self) -> int:
        return self.index_series.shape[1]

    def exchange_rates(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(
                self.swap_proposals > 0, self.swap_accepts / self.swap_proposals, 1.0
            )


def _betas_of(ladder) -> np.ndarray:
    if isinstance(ladder, TemperatureLadder):
        return np.array(ladder.betas, dtype=np.float64)
    betas = np.asarray(ladder, dtype=np.float64)
    if betas.ndim != 1 or betas.size < 1:
        raise ValueError("ladder must be a 1-d beta sequence")
    if np.any(np.diff(betas) < 0):
        raise ValueError("betas must be nondecreasing")
    return betas


def run_pt(
    problem: IsingProblem,
    ladder,
    sweeps: int,
    seed: int = 0,
    record_states: bool = False,
) -> PtTrace:
    """One PT run: per-sweep Metropolis passes then sequential pair exchanges.

    ``record_states`` keeps the full (sweeps, replicas, n) state history;
    only sensible for small problems.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    betas = _betas_of(ladder)
    n_rep = betas.shape[0]
    indptr, indices, jslot = problem.adjacency_csr()

    index_series = np.zeros((sweeps, n_rep), dtype=np.int16)
    energy_series = np.zeros((sweeps, n_rep), dtype=np.int64)
    accepts = np.zeros(max(n_rep - 1, 1), dtype=np.int64)
    proposals = np.zeros(max(n_rep - 1, 1), dtype=np.int64)
    if record_states:
        states = np.zeros((sweeps, n_rep, problem.num_vertices), dtype=np.int8)
    else:
        states = np.zeros((1, 1, 1), dtype=np.int8)
    pt_run(
        indptr,
        indices,
        jslot,
        problem.h_num,
        1.0 / problem.denom,
        betas,
        sweeps,
        derive_kernel_seed(seed, STREAM_PT),
        index_series,
        energy_series,
        accepts,
        proposals,
        record_states,
        states,
    )
    return PtTrace(
        tuple(float(b) for b in betas),
        index_series,
        energy_series,
        problem.denom,
        accepts,
        proposals,
        states if record_states else None,
    )


def calibrate_ladder(
    problem: IsingProblem,
    replica_count: int = DEFAULT_REPLICAS,
    target_rate: float = 0.40,
    seed: int = 0,
    beta_max: float = BETA_MAX,
    burst_sweeps: int = 400,
    max_iterations: int = 25,
) -> TemperatureLadder:
    """Per-instance temperature selection by exchange-rate equalization.

    Interior betas are respaced so cumulative -log(rate) is uniform across
    pairs; endpoints stay at 0 and ``beta_max``.  Stops when all rates are in
    [1/3, 1/2], when respacing is a no-op (degenerate landscapes with
    near-unit rates), or at the iteration cap (flagged not converged).
    """
    if replica_count < 3:
        raise ValueError("calibration needs at least 3 replicas")
    betas = np.linspace(0.0, beta_max, replica_count)
    best = None
    best_score = np.inf
    for iteration in range(max_iterations):
        trace = run_pt(problem, betas, burst_sweeps, seed=seed + iteration)
        rates = trace.exchange_rates()
        if np.all((rates >= RATE_LOW) & (rates <= RATE_HIGH)):
            return TemperatureLadder(
                tuple(betas), tuple(float(r) for r in rates), True, ""
            )
        # distance of the worst pair from the target band
        score = float(
            np.maximum(RATE_LOW - rates, 0).max() + np.maximum(rates - RATE_HIGH, 0).max()
        )
        if score < best_score:
            best_score = score
            best = (betas.copy(), rates.copy())
        d = -np.log(np.clip(rates, 1e-4, 1.0 - 1e-4))
        cum = np.concatenate([[0.0], np.cumsum(d)])
        targets = np.linspace(0.0, cum[-1], replica_count)
        new_betas = np.interp(targets, cum, betas)
        new_betas[0] = 0.0
        new_betas[-1] = beta_max
        # enforce strict monotonicity against interpolation plateaus
        for i in range(1, replica_count):
            if new_betas[i] <= new_betas[i - 1]:
                new_betas[i] = new_betas[i - 1] + 1e-9
        if np.max(np.abs(new_betas - betas)) < 1e-6 * beta_max:
            # respacing is a no-op: rates cannot be equalized further
            # (degenerate landscapes where every pair exchanges freely)
            saturated = bool(np.all(rates >= RATE_LOW))
            return TemperatureLadder(
                tuple(betas),
                tuple(float(r) for r in rates),
                saturated,
                "exchange rates saturated; respacing is a no-op",
            )
        betas = new_betas
    betas, rates = best
    return TemperatureLadder(
        tuple(betas),
        tuple(float(r) for r in rates),
        False,
        f"not converged after {max_iterations} iterations",
    )


def _normalized_autocorrelation(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    x = x - x.mean()
    var = np.dot(x, x)
    if var == 0.0:
        raise DegenerateSeriesError("constant series has no autocorrelation")
    n = x.size
    f = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n]
    return acf / var


def integrated_autocorrelation(series: np.ndarray) -> float:
    """tau = 1/2 + sum rho(t), truncated by Geyer's initial monotone sequence.

    Pair sums Gamma_k = rho(2k) + rho(2k+1) are accumulated while positive,
    clipped to be nonincreasing; white noise gives tau ~ 1/2 and an AR(1)
    chain with coefficient phi gives (1 + phi) / (2 (1 - phi)).
    """
    x = np.asarray(series, dtype=np.float64)
    if x.size < 8:
        raise ValueError("series too short for autocorrelation analysis")
    rho = _normalized_autocorrelation(x)
    m = rho.size // 2
    gamma = rho[0 : 2 * m : 2] + rho[1 : 2 * m : 2]
    total = 0.0
    prev = np.inf
    for k in range(m):
        g = gamma[k]
        if g <= 0.0:
            break
        g = min(g, prev)
        total += g
        prev = g
    return total - 0.5


def autocorrelation_time(trace: PtTrace, burn_in_fraction: float = BURN_IN_FRACTION) -> float:
    """Mean integrated autocorrelation of the chains' slot series.

    Discards the leading ``burn_in_fraction`` of sweeps as burn-in and
    averages tau over chains.
    """
    if not 0.0 <= burn_in_fraction < 1.0:
        raise ValueError("burn-in fraction must be in [0, 1)")
    start = int(trace.sweeps * burn_in_fraction)
    series = trace.index_series[start:]
    taus = [integrated_autocorrelation(series[:, c]) for c in range(trace.num_replicas)]
    return float(np.mean(taus))


def stationarity_check(trace: PtTrace, burn_in_fraction: float = BURN_IN_FRACTION):
    """First-half vs second-half tau agreement; reported, never asserted."""
    start = int(trace.sweeps * burn_in_fraction)
    series = trace.index_series[start:]
    half = series.shape[0] // 2
    tau_a = float(
        np.mean([integrated_autocorrelation(series[:half, c]) for c in range(trace.num_replicas)])
    )
    tau_b = float(
        np.mean([integrated_autocorrelation(series[half:, c]) for c in range(trace.num_replicas)])
    )
    scale = max(abs(tau_a), abs(tau_b), 1e-12)
    return tau_a, tau_b, abs(tau_a - tau_b) / scale <= 0.2
