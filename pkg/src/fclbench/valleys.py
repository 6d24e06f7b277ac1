"""Valley structure of ground-state sets and spin-overlap statistics.

A valley is a connected component of ground states under single-spin-flip
adjacency in the logical Hamming space, with each component merged with its
global negation (antipode) when that negation is itself a ground state.
Overlap statistics follow the zero-temperature spin-overlap distribution:
q(a, b) = (1/n) sum_i a_i b_i over ordered state pairs drawn uniformly with
replacement, self-pairs included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exact import GroundStateSet, enumerate_ground_states
from .generator import FclInstance

MINE_CAP = 1000
MINE_MIN_VALLEYS = 4
MINE_MAX_MEAN_OVERLAP = 0.7


@dataclass(frozen=True)
class ValleyDecomposition:
    """Partition of ground states into antipodally merged Hamming valleys.

    ``labels[i]`` is the valley id of ``states[i]``; ids are 0..k-1 ordered
    by first appearance in the lexicographically sorted state list.
    """

    states: np.ndarray = field(repr=False)  # (g, n) int8, as enumerated
    labels: np.ndarray = field(repr=False)  # (g,) int64
    sizes: tuple[int, ...] = ()
    total_ground_states: int = 0

    @property
    def num_valleys(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class OverlapStats:
    """Exact distribution of |q| over all ordered ground-state pairs."""

    n_spins: int
    abs_dots: np.ndarray = field(repr=False)   # sorted unique |a.b| values
    counts: np.ndarray = field(repr=False)     # pair counts per value
    mean_overlap_exact: Fraction = Fraction(0)

    @property
    def mean_overlap(self) -> float:
        return float(self.mean_overlap_exact)

    def distribution(self) -> list[tuple[float, float]]:
        """(|q|, probability) support points."""
        total = self.counts.sum()
        return [
            (int(d) / self.n_spins, int(c) / total)
            for d, c in zip(self.abs_dots, self.counts)
        ]


def _state_key(state: np.ndarray) -> bytes:
    return state.tobytes()


def decompose_valleys(ground_states: GroundStateSet) -> ValleyDecomposition:
    """Hamming-distance-1 components of the enumerated set, antipodes merged."""
    if ground_states.cap_exceeded:
        raise ValueError("valley decomposition needs a complete enumeration")
    states = ground_states.states
    g, n = states.shape
    if g == 0:
        raise ValueError("empty ground-state set")

    gram = states.astype(np.int32) @ states.astype(np.int32).T
    adj = ((n - gram) // 2) == 1
    comp_count, comp = connected_components(csr_matrix(adj), directed=False)

    # merge antipodal components
    parent = list(range(comp_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    index = {_state_key(states[i]): i for i in range(g)}
    for i in range(g):
        j = index.get(_state_key(-states[i]))
        if j is not None:
            ra, rb = find(int(comp[i])), find(int(comp[j]))
            if ra != rb:
                parent[ra] = rb

    roots = [find(int(c)) for c in comp]
    relabel: dict[int, int] = {}
    labels = np.zeros(g, dtype=np.int64)
    for i in range(g):
        r = roots[i]
        if r not in relabel:
            relabel[r] = len(relabel)
        labels[i] = relabel[r]
    sizes = tuple(int((labels == v).sum()) for v in range(len(relabel)))
    return ValleyDecomposition(states, labels, sizes, g)


def overlap_stats(ground_states: GroundStateSet) -> OverlapStats:
    """Exact P(|q|) and its mean over all ordered pairs (with replacement)."""
    if ground_states.cap_exceeded:
        raise ValueError("overlap statistics need a complete enumeration")
    states = ground_states.states
    g, n = states.shape
    if g == 0:
        raise ValueError("empty ground-state set")
    dots = np.abs(states.astype(np.int64) @ states.astype(np.int64).T)
    values, counts = np.unique(dots.ravel(), return_counts=True)
    mean = Fraction(int(dots.sum()), g * g * n)
    return OverlapStats(n, values, counts, mean)


def assign_valley(decomposition: ValleyDecomposition, logical_state: np.ndarray):
    """Valley id of a state or its negation; None if it is not a ground state."""
    state = np.asarray(logical_state, dtype=np.int8)
    lookup = _label_lookup(decomposition)
    hit = lookup.get(state.tobytes())
    if hit is not None:
        return hit
    return lookup.get((-state).tobytes())


def _label_lookup(decomposition: ValleyDecomposition) -> dict:
    if not hasattr(decomposition, "_lookup_cache"):
        lookup = {
            decomposition.states[i].tobytes(): int(decomposition.labels[i])
            for i in range(decomposition.states.shape[0])
        }
        object.__setattr__(decomposition, "_lookup_cache", lookup)
    return decomposition._lookup_cache


@dataclass(frozen=True)
class MineResult:
    accept: bool
    reasons: tuple[str, ...]
    ground_states: GroundStateSet | None = field(default=None, repr=False)
    decomposition: ValleyDecomposition | None = field(default=None, repr=False)
    overlap: OverlapStats | None = field(default=None, repr=False)


def mine_filter(
    instance: FclInstance,
    cap: int = MINE_CAP,
    min_valleys: int = MINE_MIN_VALLEYS,
    max_mean_overlap: float = MINE_MAX_MEAN_OVERLAP,
) -> MineResult:
    """Keep instances with rich valley structure.

    Rejects when enumeration passes ``cap`` ground states, the valley count
    is below ``min_valleys``, or the mean overlap reaches
    ``max_mean_overlap``; ``reasons`` lists every rule that fired.
    """
    gss = enumerate_ground_states(instance.logical, cap=cap)
    if gss.cap_exceeded:
        return MineResult(False, ("too-many-ground-states",), gss)
    reasons = []
    decomposition = decompose_valleys(gss)
    if decomposition.num_valleys < min_valleys:
        reasons.append("too-few-valleys")
    stats = overlap_stats(gss)
    if stats.mean_overlap_exact >= Fraction(str(max_mean_overlap)):
        reasons.append("overlap-too-high")
    return MineResult(not reasons, tuple(reasons), gss, decomposition, stats)
