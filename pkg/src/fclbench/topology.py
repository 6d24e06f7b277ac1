"""Chimera graphs, yield modeling, and extraction of the logical cell lattice.

A Chimera graph of size s is an s x s grid of unit cells, each a complete
bipartite K_{4,4} on 8 qubits.  Qubits are addressed as (row y, column x,
shore u in {0,1}, offset k in {0..3}) with linear id

    id = k + 4*u + 8*(x + s*y).

Shore u=0 couples vertically (north/south), shore u=1 horizontally
(east/west); inter-cell couplers join equal offsets of the same shore in
adjacent cells.  Cells whose 8 qubits and 16 internal couplers all survive
yield loss act as single logical spins; four parallel inter-cell couplers
between two such cells form one logical coupler.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Edge = tuple[int, int]
CellCoord = tuple[int, int]  # (y, x)

QUBITS_PER_CELL = 8
SHORE_SIZE = 4


def qubit_id(size_s: int, y: int, x: int, u: int, k: int) -> int:
    return k + 4 * u + 8 * (x + size_s * y)


def qubit_coords(size_s: int, qid: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`qubit_id`; returns (y, x, u, k)."""
    k = qid % 4
    u = (qid // 4) % 2
    cell = qid // 8
    return cell // size_s, cell % size_s, u, k


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ChimeraGraph:
    """A (possibly depleted) Chimera graph C_s.

    Immutable after construction; safe to share across workers.
    """

    size_s: int
    present_qubits: frozenset[int]
    present_couplers: frozenset[Edge]

    def __post_init__(self):
        if self.size_s < 1:
            raise ValueError(f"size_s must be >= 1, got {self.size_s}")
        nmax = 8 * self.size_s**2
        for q in self.present_qubits:
            if not 0 <= q < nmax:
                raise ValueError(f"qubit id {q} out of range for C_{self.size_s}")
        legal = _full_coupler_set(self.size_s)
        for e in self.present_couplers:
            if e not in legal:
                raise ValueError(f"coupler {e} is not a legal C_{self.size_s} adjacency")
            if e[0] not in self.present_qubits or e[1] not in self.present_qubits:
                raise ValueError(f"coupler {e} joins a missing qubit")

    @property
    def num_qubits(self) -> int:
        return len(self.present_qubits)

    @property
    def num_couplers(self) -> int:
        return len(self.present_couplers)

    def vertices(self) -> list[int]:
        """Present qubit ids in increasing order."""
        return sorted(self.present_qubits)

    def edges(self) -> list[Edge]:
        """Present couplers in lexicographic order."""
        return sorted(self.present_couplers)


@dataclass(frozen=True)
class LogicalGraph:
    """Lattice of complete cells (logical spins) and complete coupler bundles.

    ``cell_map`` sends each qubit of a complete cell to the index of its
    logical spin in ``vertices()`` order.
    """

    lattice_dims: tuple[int, int]
    logical_spins: frozenset[CellCoord]
    logical_couplers: frozenset[tuple[CellCoord, CellCoord]]
    cell_map: dict[int, int] = field(compare=False)

    @property
    def num_spins(self) -> int:
        return len(self.logical_spins)

    def vertices(self) -> list[CellCoord]:
        """Cell coordinates in row-major order; defines logical spin indices."""
        return sorted(self.logical_spins)

    def edges(self) -> list[tuple[CellCoord, CellCoord]]:
        return sorted(self.logical_couplers)


def _full_coupler_set(size_s: int) -> set[Edge]:
    s = size_s
    edges: set[Edge] = set()
    for y in range(s):
        for x in range(s):
            # K_{4,4} inside the cell
            for k0 in range(SHORE_SIZE):
                a = qubit_id(s, y, x, 0, k0)
                for k1 in range(SHORE_SIZE):
                    edges.add(_edge(a, qubit_id(s, y, x, 1, k1)))
            # shore 0 couples south, shore 1 couples east
            if y + 1 < s:
                for k in range(SHORE_SIZE):
                    edges.add(_edge(qubit_id(s, y, x, 0, k), qubit_id(s, y + 1, x, 0, k)))
            if x + 1 < s:
                for k in range(SHORE_SIZE):
                    edges.add(_edge(qubit_id(s, y, x, 1, k), qubit_id(s, y, x + 1, 1, k)))
    return edges


def build_chimera(size_s: int) -> ChimeraGraph:
    """The full-yield C_s graph: 8s^2 qubits, 16s^2 + 8s(s-1) couplers."""
    if size_s < 1:
        raise ValueError(f"size_s must be >= 1, got {size_s}")
    qubits = frozenset(range(8 * size_s**2))
    return ChimeraGraph(size_s, qubits, frozenset(_full_coupler_set(size_s)))


def apply_yield(
    graph: ChimeraGraph,
    missing_qubits: set[int] = frozenset(),
    missing_couplers: set[Edge] = frozenset(),
) -> ChimeraGraph:
    """Remove qubits and couplers; removed qubits take their couplers with them."""
    missing_qubits = set(missing_qubits)
    missing_couplers = {_edge(*e) for e in missing_couplers}
    for q in missing_qubits:
        if q not in graph.present_qubits:
            raise ValueError(f"cannot remove qubit {q}: not present")
    for e in missing_couplers:
        if e not in graph.present_couplers:
            raise ValueError(f"cannot remove coupler {e}: not present")
    qubits = graph.present_qubits - missing_qubits
    couplers = frozenset(
        e
        for e in graph.present_couplers
        if e not in missing_couplers and e[0] in qubits and e[1] in qubits
    )
    return ChimeraGraph(graph.size_s, qubits, couplers)


def random_yield(
    graph: ChimeraGraph, qubit_loss_rate: float, rng: np.random.Generator
) -> ChimeraGraph:
    """Sample a working graph by dropping each qubit independently.

    Yield modeling helper for experiments; explicit missing-element lists
    remain the canonical input (see :func:`apply_yield`).
    """
    if not 0.0 <= qubit_loss_rate < 1.0:
        raise ValueError(f"loss rate must be in [0, 1), got {qubit_loss_rate}")
    qubits = graph.vertices()
    drop = {q for q in qubits if rng.random() < qubit_loss_rate}
    return apply_yield(graph, drop, set())


def extract_logical(graph: ChimeraGraph) -> LogicalGraph:
    """Logical lattice of complete cells joined by complete 4-coupler bundles."""
    s = graph.size_s
    complete: set[CellCoord] = set()
    for y in range(s):
        for x in range(s):
            cell_qubits = [qubit_id(s, y, x, u, k) for u in range(2) for k in range(SHORE_SIZE)]
            if any(q not in graph.present_qubits for q in cell_qubits):
                continue
            intra_ok = all(
                _edge(qubit_id(s, y, x, 0, k0), qubit_id(s, y, x, 1, k1)) in graph.present_couplers
                for k0 in range(SHORE_SIZE)
                for k1 in range(SHORE_SIZE)
            )
            if intra_ok:
                complete.add((y, x))

    couplers: set[tuple[CellCoord, CellCoord]] = set()
    for (y, x) in complete:
        for (dy, dx, u) in ((1, 0, 0), (0, 1, 1)):
            other = (y + dy, x + dx)
            if other not in complete:
                continue
            bundle_ok = all(
                _edge(qubit_id(s, y, x, u, k), qubit_id(s, other[0], other[1], u, k))
                in graph.present_couplers
                for k in range(SHORE_SIZE)
            )
            if bundle_ok:
                couplers.add(((y, x), other))

    order = sorted(complete)
    index = {c: i for i, c in enumerate(order)}
    cell_map = {
        qubit_id(s, y, x, u, k): index[(y, x)]
        for (y, x) in complete
        for u in range(2)
        for k in range(SHORE_SIZE)
    }
    return LogicalGraph((s, s), frozenset(complete), frozenset(couplers), cell_map)


def cell_qubits(size_s: int, cell: CellCoord) -> list[int]:
    """The 8 qubit ids of a cell, in increasing id order."""
    y, x = cell
    return [qubit_id(size_s, y, x, u, k) for u in range(2) for k in range(SHORE_SIZE)]
