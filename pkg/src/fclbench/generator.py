"""Frustrated-loop generation on the logical lattice and the native embedding.

A problem is built from three parameters: alpha (loops per logical spin),
rho (bound on logical coupling magnitudes), and ruggedness R >= rho.  Each
loop is a closed cycle from a uniform random walk (tail discarded at the
first self-intersection, cycles shorter than 4 rejected) that contributes -1
to every cycle edge except one uniformly chosen edge contributing +1, in the
gauge of the all-up planted state.  Loops whose contribution would push any
edge past +-rho are resampled.  The native problem places -1 on intra-cell
couplers and J_L / R on each of the four physical couplers of a logical
coupler, so all native couplings lie in [-1, 1] and the planted state lifts
to a native ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError
from .ising import IsingProblem, SpinState
from .rng import STREAM_GENERATE, derive_rng
from .topology import (
    CellCoord,
    ChimeraGraph,
    LogicalGraph,
    cell_qubits,
    extract_logical,
    qubit_id,
)

LOOP_RETRY_BUDGET = 10_000  # resamples allowed per clause before giving up
REJECTION_BUDGET = 200      # whole-problem regenerations (connectivity rule)


@dataclass(frozen=True)
class FclParams:
    alpha: float
    rho: int
    ruggedness: int
    size_s: int
    seed: int

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.rho < 1:
            raise ValueError(f"rho must be >= 1, got {self.rho}")
        if self.ruggedness < self.rho:
            raise ValueError(
                f"ruggedness must be >= rho, got R={self.ruggedness} < rho={self.rho}"
            )
        if self.size_s < 1:
            raise ValueError(f"size_s must be >= 1, got {self.size_s}")


@dataclass(frozen=True)
class Loop:
    """A frustrated cycle: consecutive vertices are edges, closed implicitly."""

    vertices: tuple[CellCoord, ...]
    frustrated_edge: tuple[CellCoord, CellCoord]

    @property
    def length(self) -> int:
        return len(self.vertices)

    def edges(self):
        k = len(self.vertices)
        for i in range(k):
            yield self.vertices[i], self.vertices[(i + 1) % k]


@dataclass(frozen=True)
class FclInstance:
    params: FclParams
    working_graph: ChimeraGraph = field(repr=False)
    logical_graph: LogicalGraph = field(repr=False)
    native: IsingProblem = field(repr=False)
    logical: IsingProblem = field(repr=False)
    planted_state: SpinState = field(repr=False)  # logical, all +1 by convention
    loops: tuple[Loop, ...] = field(repr=False)
    planted_logical_energy: int
    rejected_candidates: int = 0

    @property
    def planted_native_energy_num(self) -> int:
        """Numerator over denom R: -16 R n_cells + 4 E_L."""
        n_cells = self.logical.num_vertices
        return -16 * n_cells * self.params.ruggedness + 4 * self.planted_logical_energy

    @property
    def cluster_indices(self) -> np.ndarray:
        """(n_L, 8) native vertex positions of each logical spin's cluster."""
        if not hasattr(self, "_clusters_cache"):
            s = self.working_graph.size_s
            rows = []
            for cell in self.logical_graph.vertices():
                rows.append([self.native.index_of(q) for q in cell_qubits(s, cell)])
            object.__setattr__(
                self, "_clusters_cache", np.array(rows, dtype=np.int64).reshape(-1, 8)
            )
        return self._clusters_cache


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _neighbor_lists(graph: LogicalGraph):
    nbrs: dict[CellCoord, list[CellCoord]] = {v: [] for v in graph.vertices()}
    for a, b in graph.edges():
        nbrs[a].append(b)
        nbrs[b].append(a)
    for v in nbrs:
        nbrs[v].sort()
    return nbrs


def _sample_loop(nbrs, vertices, rng: np.random.Generator) -> tuple[CellCoord, ...]:
    """Uniform random walk until first self-intersection; keep the closed cycle."""
    start = vertices[rng.integers(len(vertices))]
    walk = [start]
    seen = {start: 0}
    while True:
        options = nbrs[walk[-1]]
        if not options:
            return ()
        step = options[rng.integers(len(options))]
        if step in seen:
            return tuple(walk[seen[step]:])
        seen[step] = len(walk)
        walk.append(step)


def generate_loops(
    logical_graph: LogicalGraph, alpha: float, rho: int, rng: np.random.Generator
):
    """Place round(alpha * N) frustrated loops; returns (problem, loops, planted).

    The planted state is all +1; it attains every loop's minimum -(len - 2)
    simultaneously, so it is a ground state of the summed problem.
    """
    vertices = logical_graph.vertices()
    if not vertices:
        raise ValueError("logical graph is empty")
    nbrs = _neighbor_lists(logical_graph)
    n = len(vertices)
    num_loops = _round_half_up(alpha * n)
    if num_loops < 1:
        raise ValueError(f"alpha={alpha} with {n} spins yields zero loops")

    j_acc: dict[frozenset, int] = {}
    loops: list[Loop] = []
    for _ in range(num_loops):
        placed = False
        for _attempt in range(LOOP_RETRY_BUDGET):
            cycle = _sample_loop(nbrs, vertices, rng)
            if len(cycle) < 4:
                continue
            frustrated = int(rng.integers(len(cycle)))
            contrib = []
            ok = True
            for i in range(len(cycle)):
                e = frozenset((cycle[i], cycle[(i + 1) % len(cycle)]))
                delta = 1 if i == frustrated else -1
                contrib.append((e, delta))
                if abs(j_acc.get(e, 0) + delta) > rho:
                    ok = False
                    break
            if not ok:
                continue
            for e, delta in contrib:
                j_acc[e] = j_acc.get(e, 0) + delta
            loops.append(
                Loop(cycle, (cycle[frustrated], cycle[(frustrated + 1) % len(cycle)]))
            )
            placed = True
            break
        if not placed:
            raise GenerationError(
                f"could not place loop {len(loops) + 1}/{num_loops} within "
                f"{LOOP_RETRY_BUDGET} attempts (range rho={rho} saturated)"
            )

    index = {v: i for i, v in enumerate(vertices)}
    edge_list = logical_graph.edges()
    edges = np.array([[index[a], index[b]] for a, b in edge_list], dtype=np.int64).reshape(-1, 2)
    j_num = np.array([j_acc.get(frozenset(e), 0) for e in edge_list], dtype=np.int64)
    problem = IsingProblem(
        tuple(vertices), edges, np.zeros(n, dtype=np.int64), j_num, 1, logical_graph
    )
    planted = np.ones(n, dtype=np.int8)
    return problem, tuple(loops), planted


def _support_spans(problem: IsingProblem) -> bool:
    """True iff nonzero couplings connect all vertices into one component."""
    n = problem.num_vertices
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    live = 0
    for e in range(problem.num_edges):
        if problem.j_num[e] == 0:
            continue
        ra, rb = find(int(problem.edges[e, 0])), find(int(problem.edges[e, 1]))
        if ra != rb:
            parent[ra] = rb
            live += 1
    return live == n - 1


def build_native(
    logical_problem: IsingProblem,
    logical_graph: LogicalGraph,
    working_graph: ChimeraGraph,
    ruggedness: int,
) -> IsingProblem:
    """Embed a logical problem on the working graph (couplings over denom R).

    Intra-cell couplers of complete cells carry -R/R = -1; each physical
    coupler of a logical coupler carries J_L/R; all remaining couplers
    (broken cells, partial bundles) carry 0.
    """
    max_j = int(np.abs(logical_problem.j_num).max()) if logical_problem.num_edges else 0
    if ruggedness < max_j:
        raise ValueError(f"ruggedness {ruggedness} < max logical coupling {max_j}")

    s = working_graph.size_s
    vertices = working_graph.vertices()
    index = {q: i for i, q in enumerate(vertices)}
    lindex = {c: i for i, c in enumerate(logical_problem.vertices)}

    intra: set[frozenset] = set()
    for cell in logical_graph.vertices():
        qs = cell_qubits(s, cell)
        for a in qs[:4]:
            for b in qs[4:]:
                intra.add(frozenset((a, b)))
    bundle_j: dict[frozenset, int] = {}
    for e in range(logical_problem.num_edges):
        a = logical_problem.vertices[logical_problem.edges[e, 0]]
        b = logical_problem.vertices[logical_problem.edges[e, 1]]
        jl = int(logical_problem.j_num[e])
        (ay, ax), (by, bx) = a, b
        # vertical neighbors couple through shore 0, horizontal through shore 1
        u = 0 if ax == bx else 1
        for k in range(4):
            bundle_j[frozenset((qubit_id(s, ay, ax, u, k), qubit_id(s, by, bx, u, k)))] = jl

    edge_list = working_graph.edges()
    edges = np.array([[index[a], index[b]] for a, b in edge_list], dtype=np.int64).reshape(-1, 2)
    j_num = np.zeros(len(edge_list), dtype=np.int64)
    for e, (a, b) in enumerate(edge_list):
        key = frozenset((a, b))
        if key in intra:
            j_num[e] = -ruggedness
        elif key in bundle_j:
            j_num[e] = bundle_j[key]
    return IsingProblem(
        tuple(vertices),
        edges,
        np.zeros(len(vertices), dtype=np.int64),
        j_num,
        ruggedness,
        working_graph,
    )


def generate_instance(params: FclParams, working_graph: ChimeraGraph | None = None) -> FclInstance:
    """Full pipeline: logical extraction, loop placement, rejection, embedding.

    Candidates whose nonzero couplings do not span the logical spins are
    rejected and regenerated from a derived sub-seed, so identical
    (params, working_graph) always produce identical instances.
    """
    if working_graph is None:
        from .topology import build_chimera

        working_graph = build_chimera(params.size_s)
    if working_graph.size_s != params.size_s:
        raise ValueError(
            f"working graph is C_{working_graph.size_s}, params say {params.size_s}"
        )
    logical_graph = extract_logical(working_graph)
    if logical_graph.num_spins == 0:
        raise ValueError("working graph has no complete cells")

    for attempt in range(REJECTION_BUDGET):
        rng = derive_rng(params.seed, STREAM_GENERATE, attempt)
        try:
            logical, loops, planted = generate_loops(
                logical_graph, params.alpha, params.rho, rng
            )
        except GenerationError:
            continue
        if not _support_spans(logical):
            continue
        native = build_native(logical, logical_graph, working_graph, params.ruggedness)
        planted_energy = sum(-(loop.length - 2) for loop in loops)
        return FclInstance(
            params=params,
            working_graph=working_graph,
            logical_graph=logical_graph,
            native=native,
            logical=logical,
            planted_state=planted,
            loops=loops,
            planted_logical_energy=planted_energy,
            rejected_candidates=attempt,
        )
    raise GenerationError(
        f"no spanning-support instance found in {REJECTION_BUDGET} candidates "
        f"(params {params})"
    )
