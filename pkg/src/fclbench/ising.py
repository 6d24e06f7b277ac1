"""Ising problems and states with exact energy arithmetic.

Fields and couplings are stored as integer numerators over a common
``denom``, so energies are exact rationals: ground-state identity tests
compare integers, never floats.  Native FCL problems use denom = R
(intra-cell couplers -R/R = -1, inter-cell J_L/R); logical problems use
denom = 1.

States are plain int8 numpy arrays of +-1 in the problem's vertex order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

SpinState = np.ndarray  # int8 vector of +-1, aligned with IsingProblem.vertices


@dataclass(frozen=True)
class IsingProblem:
    """Fields h and couplings J on a fixed vertex order.

    ``edges`` holds vertex positions (not labels); ``j_num``/``h_num`` are the
    integer numerators over ``denom``.  Immutable and shareable; all mutation
    happens on per-worker state arrays.
    """

    vertices: tuple[Hashable, ...]
    edges: np.ndarray  # (m, 2) int64, positions into vertices, u < v
    h_num: np.ndarray  # (n,) int64
    j_num: np.ndarray  # (m,) int64
    denom: int = 1
    graph: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.vertices)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        h = np.ascontiguousarray(self.h_num, dtype=np.int64)
        j = np.ascontiguousarray(self.j_num, dtype=np.int64)
        if h.shape != (n,):
            raise ValueError(f"h has shape {h.shape}, expected ({n},)")
        if j.shape != (edges.shape[0],):
            raise ValueError(f"J has shape {j.shape}, expected ({edges.shape[0]},)")
        if self.denom < 1:
            raise ValueError(f"denom must be positive, got {self.denom}")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loop edge")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "h_num", h)
        object.__setattr__(self, "j_num", j)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def index_of(self, vertex: Hashable) -> int:
        return self._index()[vertex]

    def _index(self) -> dict:
        if not hasattr(self, "_index_cache"):
            object.__setattr__(self, "_index_cache", {v: i for i, v in enumerate(self.vertices)})
        return self._index_cache

    # float views used by sampler kernels; exact values stay authoritative
    def h_float(self) -> np.ndarray:
        return self.h_num.astype(np.float64) / self.denom

    def j_float(self) -> np.ndarray:
        return self.j_num.astype(np.float64) / self.denom

    def adjacency_csr(self):
        """(indptr, indices, j_num_per_slot) neighbor lists for O(deg) updates."""
        if not hasattr(self, "_adj_cache"):
            n, m = self.num_vertices, self.num_edges
            deg = np.zeros(n, dtype=np.int64)
            for u, v in self.edges:
                deg[u] += 1
                deg[v] += 1
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            indices = np.zeros(2 * m, dtype=np.int32)
            jslot = np.zeros(2 * m, dtype=np.int64)
            fill = indptr[:-1].copy()
            for e in range(m):
                u, v = self.edges[e]
                indices[fill[u]] = v
                jslot[fill[u]] = self.j_num[e]
                fill[u] += 1
                indices[fill[v]] = u
                jslot[fill[v]] = self.j_num[e]
                fill[v] += 1
            object.__setattr__(self, "_adj_cache", (indptr, indices, jslot))
        return self._adj_cache


def validate_state(problem: IsingProblem, state: SpinState) -> np.ndarray:
    state = np.asarray(state)
    if state.shape != (problem.num_vertices,):
        raise ValueError(
            f"state has shape {state.shape}, expected ({problem.num_vertices},)"
        )
    if not np.all(np.abs(state) == 1):
        raise ValueError("state entries must be +-1")
    return state.astype(np.int8, copy=False)


def energy_num(problem: IsingProblem, state: SpinState) -> int:
    """Integer energy numerator: energy = energy_num / problem.denom."""
    state = validate_state(problem, state)
    s = state.astype(np.int64)
    total = int(np.dot(problem.h_num, s))
    if problem.num_edges:
        total += int(np.dot(problem.j_num, s[problem.edges[:, 0]] * s[problem.edges[:, 1]]))
    return total


def energy(problem: IsingProblem, state: SpinState) -> Fraction:
    """Exact Ising energy sum(h_i s_i) + sum(J_ij s_i s_j)."""
    return Fraction(energy_num(problem, state), problem.denom)


def energy_delta_num(problem: IsingProblem, state: SpinState, vertex: Hashable) -> int:
    """Numerator of energy(flip(state, vertex)) - energy(state); O(degree)."""
    state = validate_state(problem, state)
    try:
        i = problem.index_of(vertex)
    except KeyError:
        raise ValueError(f"unknown vertex {vertex!r}") from None
    indptr, indices, jslot = problem.adjacency_csr()
    lo, hi = indptr[i], indptr[i + 1]
    local = int(problem.h_num[i])
    if hi > lo:
        local += int(np.dot(jslot[lo:hi], state[indices[lo:hi]].astype(np.int64)))
    return -2 * int(state[i]) * local


def energy_delta(problem: IsingProblem, state: SpinState, vertex: Hashable) -> Fraction:
    return Fraction(energy_delta_num(problem, state, vertex), problem.denom)


def all_energies_num(problem: IsingProblem, states: np.ndarray) -> np.ndarray:
    """Integer energy numerators for a (k, n) batch of states."""
    states = np.asarray(states, dtype=np.int64)
    if states.ndim == 1:
        states = states[None, :]
    if states.shape[1] != problem.num_vertices:
        raise ValueError("state batch has wrong width")
    out = states @ problem.h_num
    if problem.num_edges:
        out = out + (states[:, problem.edges[:, 0]] * states[:, problem.edges[:, 1]]) @ problem.j_num
    return out


def from_fraction_couplings(
    vertices: Sequence[Hashable],
    edges: Sequence[tuple[Hashable, Hashable]],
    h: dict,
    j: dict,
    denom: int = 1,
    graph: object = None,
) -> IsingProblem:
    """Assemble a problem from label-keyed dicts of integer numerators."""
    vertices = tuple(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    m = len(edges)
    edge_arr = np.zeros((m, 2), dtype=np.int64)
    j_num = np.zeros(m, dtype=np.int64)
    for e, (a, b) in enumerate(edges):
        ia, ib = index[a], index[b]
        edge_arr[e] = (ia, ib) if ia < ib else (ib, ia)
        j_num[e] = j.get((a, b), j.get((b, a), 0))
    h_num = np.array([h.get(v, 0) for v in vertices], dtype=np.int64)
    return IsingProblem(vertices, edge_arr, h_num, j_num, denom, graph)


def project_to_logical(instance, native_state: SpinState):
    """Majority-vote projection of a native state onto the logical lattice.

    Returns (logical_state, unanimous).  An 8-qubit cluster with a 4-4 split
    takes the sign of its lowest-id qubit, so projection is deterministic.
    """
    native_state = validate_state(instance.native, native_state)
    clusters = instance.cluster_indices  # (n_L, 8), rows in qubit-id order
    votes = native_state[clusters].astype(np.int64)
    sums = votes.sum(axis=1)
    logical = np.sign(sums).astype(np.int8)
    ties = logical == 0
    logical[ties] = votes[ties, 0]
    unanimous = np.abs(sums) == clusters.shape[1]
    return logical, unanimous


def lift_to_native(instance, logical_state: SpinState) -> SpinState:
    """Native state with every cluster unanimously set to its logical spin.

    Qubits outside complete cells (possible on depleted graphs) are set +1;
    they are decoupled in FCL instances, so the choice is energy-neutral.
    """
    logical_state = validate_state(instance.logical, logical_state)
    native = np.ones(instance.native.num_vertices, dtype=np.int8)
    clusters = instance.cluster_indices
    for li in range(clusters.shape[0]):
        native[clusters[li]] = logical_state[li]
    return native
