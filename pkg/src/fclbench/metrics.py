"""Optimization and zero-temperature sampling metrics.

Time to solution divides the mean time per anneal by the ground-state hit
probability; time to all valleys tracks when samples have touched every
ground-state valley, both empirically and in expectation from per-valley hit
rates.  KL divergence compares empirical valley frequencies (conditioned on
ground-state samples) against exact relative valley sizes, and the raw L1
marginal error compares coupler expectations from majority-vote projections
of all samples against exact zero-temperature marginals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import beta as beta_dist

from .errors import UndefinedMetricError
from .exact import GroundStateSet
from .generator import FclInstance
from .ising import project_to_logical
from .solvers.samples import SampleSet
from .valleys import ValleyDecomposition, _label_lookup

INCLUSION_EXCLUSION_LIMIT = 20
MONTE_CARLO_TRIALS = 100_000


@dataclass(frozen=True)
class TtsEstimate:
    """TTS point estimate with a Jeffreys-posterior 95% interval.

    ``p_hat`` is the hit fraction; the interval comes from Beta(0.5 + hits,
    0.5 + misses) quantiles.  With zero hits the point estimate is infinite
    and only the lower bound is meaningful.
    """

    tts: float
    ci_low: float
    ci_high: float
    p_hat: float
    hits: int
    reads: int
    time_per_anneal: float
    lower_bound_only: bool


def estimate_tts(samples: SampleSet, ground_energy: Fraction) -> TtsEstimate:
    if samples.num_reads == 0:
        raise ValueError("empty sample set")
    ground_energy = Fraction(ground_energy)
    target = ground_energy * samples.denom
    if target.denominator != 1:
        raise ValueError("ground energy is not representable over the sample denom")
    hits = int((samples.energy_num == int(target)).sum())
    reads = samples.num_reads
    t_a = samples.mean_time_per_anneal
    p_hat = hits / reads
    p_low, p_high = beta_dist.ppf([0.025, 0.975], 0.5 + hits, 0.5 + reads - hits)
    ci_low = t_a / p_high
    ci_high = t_a / p_low if p_low > 0 else float("inf")
    tts = t_a / p_hat if hits else float("inf")
    return TtsEstimate(tts, ci_low, ci_high, p_hat, hits, reads, t_a, hits == 0)


def expected_collection_draws(probabilities) -> Fraction | float:
    """Expected draws to hit every category at least once (misses allowed).

    Inclusion-exclusion over nonempty subsets:
        E = sum_S (-1)^(|S|+1) / sum_{v in S} p_v.
    Exact when given Fractions; infinite if any probability is zero.
    """
    probs = list(probabilities)
    if not probs:
        raise ValueError("need at least one category")
    if len(probs) > INCLUSION_EXCLUSION_LIMIT:
        raise ValueError("too many categories for inclusion-exclusion")
    exact = all(isinstance(p, (int, Fraction)) for p in probs)
    if any(p <= 0 for p in probs):
        return float("inf")
    total = Fraction(0) if exact else 0.0
    n = len(probs)
    for r in range(1, n + 1):
        sign = 1 if r % 2 == 1 else -1
        for subset in itertools.combinations(probs, r):
            total += sign / sum(subset) if exact else sign / float(sum(subset))
    return total


def monte_carlo_collection_draws(
    probabilities, rng: np.random.Generator, trials: int = MONTE_CARLO_TRIALS
) -> float:
    """Coupon-collector mean by simulation; fallback for many valleys.

    All trials advance in lockstep, one draw per step for every unfinished
    trial; draws falling past the cumulative probabilities are misses.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    if np.any(p <= 0.0):
        return float("inf")
    k = p.shape[0]
    cum = np.cumsum(p)
    active = np.arange(trials)
    seen_mask = np.zeros((trials, k), dtype=bool)
    n_seen = np.zeros(trials, dtype=np.int64)
    draws = np.zeros(trials, dtype=np.int64)
    while active.size:
        cat = np.searchsorted(cum, rng.random(active.size))
        draws[active] += 1
        hit = cat < k
        rows = active[hit]
        cats = cat[hit]
        newly = ~seen_mask[rows, cats]
        seen_mask[rows, cats] = True
        n_seen[rows] += newly
        active = active[n_seen[active] < k]
    return float(draws.mean())


@dataclass(frozen=True)
class TtavReport:
    ttav_empirical: float
    ttav_expected: float
    coverage_curve: tuple[tuple[float, float], ...]
    valley_hits: tuple[int, ...]
    ground_state_samples: int
    used_monte_carlo: bool = False


def _project_samples(samples: SampleSet, instance: FclInstance):
    """Logical projections, unanimity, and per-sample valley ids (-1 = none)."""
    k = samples.num_reads
    n_l = instance.logical.num_vertices
    logical = np.zeros((k, n_l), dtype=np.int8)
    unanimous = np.zeros(k, dtype=bool)
    for i in range(k):
        logical[i], flags = project_to_logical(instance, samples.states[i])
        unanimous[i] = bool(flags.all())
    return logical, unanimous


def _valley_ids(logical, unanimous, decomposition: ValleyDecomposition) -> np.ndarray:
    lookup = _label_lookup(decomposition)
    ids = np.full(logical.shape[0], -1, dtype=np.int64)
    for i in range(logical.shape[0]):
        if not unanimous[i]:
            continue
        hit = lookup.get(logical[i].tobytes())
        if hit is None:
            hit = lookup.get((-logical[i]).tobytes())
        if hit is not None:
            ids[i] = hit
    return ids


def ttav(
    samples: SampleSet,
    instance: FclInstance,
    decomposition: ValleyDecomposition,
    rng: np.random.Generator | None = None,
) -> TtavReport:
    """Empirical and expected annealing time to sample every valley.

    A sample counts as a valley hit only when all clusters are unanimous and
    the projection is a ground state.  The expected value uses per-draw hit
    frequencies in the collection-time formula, switching to Monte Carlo
    beyond 20 valleys.
    """
    if samples.num_reads == 0:
        raise ValueError("empty sample set")
    logical, unanimous = _project_samples(samples, instance)
    ids = _valley_ids(logical, unanimous, decomposition)
    k = decomposition.num_valleys
    times = samples.anneal_times

    seen: set[int] = set()
    curve = [(0.0, 0.0)]
    ttav_emp = float("inf")
    for i in range(samples.num_reads):
        v = int(ids[i])
        if v >= 0 and v not in seen:
            seen.add(v)
            curve.append((float(times[i]), len(seen) / k))
            if len(seen) == k:
                ttav_emp = float(times[i])
    curve.append((float(times[-1]), len(seen) / k))

    hits = tuple(int((ids == v).sum()) for v in range(k))
    p = [Fraction(h, samples.num_reads) for h in hits]
    used_mc = False
    if k > INCLUSION_EXCLUSION_LIMIT:
        used_mc = True
        if rng is None:
            rng = np.random.default_rng(0)
        draws = monte_carlo_collection_draws([float(x) for x in p], rng)
    else:
        draws = expected_collection_draws(p)
    ttav_exp = float(draws) * samples.mean_time_per_anneal
    gs_samples = int((ids >= 0).sum())
    return TtavReport(ttav_emp, ttav_exp, tuple(curve), hits, gs_samples, used_mc)


def kld_valleys(
    samples: SampleSet, instance: FclInstance, decomposition: ValleyDecomposition
) -> float:
    """KL divergence sum_v P(v) ln(P(v)/P_hat(v)); infinite if a valley is unseen.

    P(v) is the exact relative valley size; P_hat conditions on samples that
    project to ground states.
    """
    logical, unanimous = _project_samples(samples, instance)
    ids = _valley_ids(logical, unanimous, decomposition)
    gs_total = int((ids >= 0).sum())
    if gs_total == 0:
        raise UndefinedMetricError("no ground-state samples; valley KLD undefined")
    kld = 0.0
    for v in range(decomposition.num_valleys):
        p_true = decomposition.sizes[v] / decomposition.total_ground_states
        hits = int((ids == v).sum())
        if hits == 0:
            return float("inf")
        p_emp = hits / gs_total
        kld += p_true * np.log(p_true / p_emp)
    return float(kld)


@dataclass(frozen=True)
class L1ErrorCurve:
    sample_counts: tuple[int, ...]
    anneal_times: tuple[float, ...]
    errors: tuple[float, ...]
    couplers: int = 0


def _logical_coupler_positions(instance: FclInstance) -> np.ndarray:
    return instance.logical.edges


def exact_coupler_marginals(instance: FclInstance, ground_states: GroundStateSet) -> np.ndarray:
    """Zero-temperature <s_i s_j> per logical coupler, uniform over ground states."""
    if ground_states.cap_exceeded:
        raise ValueError("exact marginals need a complete enumeration")
    states = ground_states.states.astype(np.float64)
    edges = _logical_coupler_positions(instance)
    return (states[:, edges[:, 0]] * states[:, edges[:, 1]]).mean(axis=0)


def l1_marginal_error(
    samples: SampleSet,
    instance: FclInstance,
    ground_states: GroundStateSet,
    points: int = 30,
) -> L1ErrorCurve:
    """Raw marginal error from all samples (no ground-state conditioning).

    Empirical <s_i s_j> uses the majority-vote projection of every sample
    seen so far; the curve is evaluated at logarithmically spaced sample
    counts.
    """
    if samples.num_reads == 0:
        raise ValueError("empty sample set")
    exact = exact_coupler_marginals(instance, ground_states)
    logical, _ = _project_samples(samples, instance)
    edges = _logical_coupler_positions(instance)
    products = (logical[:, edges[:, 0]] * logical[:, edges[:, 1]]).astype(np.float64)
    cumulative = np.cumsum(products, axis=0)
    times = samples.anneal_times

    k = samples.num_reads
    counts = np.unique(np.geomspace(1, k, num=min(points, k)).astype(np.int64))
    errors = []
    for c in counts:
        emp = cumulative[c - 1] / c
        errors.append(float(np.abs(emp - exact).mean()))
    return L1ErrorCurve(
        tuple(int(c) for c in counts),
        tuple(float(times[c - 1]) for c in counts),
        tuple(errors),
        int(edges.shape[0]),
    )
