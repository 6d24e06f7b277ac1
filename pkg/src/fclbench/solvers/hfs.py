"""Tailored subgraph optimizer for native Chimera problems.

Each read repeats: grow a random maximal induced tree of complete cells,
then exactly minimize all qubits of the tree's cells conditioned on every
other qubit, by integer dynamic programming over the cell tree (messages
indexed by 4-qubit shore states, 16 values).  The conditioned optimum can
never be worse than the current assignment, so energy is nonincreasing; a
read stops after ``n_cells`` consecutive tree updates without improvement.

Trees are induced (every lattice adjacency between chosen cells is a tree
edge), which is what makes the tree DP exact; a spanning tree of the cell
lattice would carry chordal bundles the DP cannot represent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..ising import IsingProblem, all_energies_num
from ..rng import derive_kernel_seed
from ..topology import ChimeraGraph, LogicalGraph, cell_qubits
from .samples import SampleSet

# One 16x16 cell DP costs roughly 60 single-spin updates of kernel time.
DEFAULT_SECONDS_PER_CELL_UPDATE = 2.0e-6


@dataclass(frozen=True)
class HfsData:
    """Precomputed integer tables for the cell-tree DP."""

    n_cells: int
    cell_qpos: np.ndarray      # (n_c, 8) vertex positions, shore 0 then shore 1
    cadj_indptr: np.ndarray
    cadj_nbr: np.ndarray
    cadj_eid: np.ndarray
    cadj_shore: np.ndarray
    intra_table: np.ndarray    # (n_c, 16, 16) int64
    h_shore: np.ndarray        # (n_c, 2, 16) int64
    bundle_table: np.ndarray   # (n_e, 16, 16) int64, symmetric in its two states
    bundle_joff: np.ndarray    # (n_e, 4) int64
    ext_indptr: np.ndarray
    ext_indices: np.ndarray
    ext_jnum: np.ndarray


def _shore_signs() -> np.ndarray:
    signs = np.empty((16, 4), dtype=np.int64)
    for s in range(16):
        for k in range(4):
            signs[s, k] = 1 if (s >> k) & 1 else -1
    return signs


def prepare_hfs(problem: IsingProblem, logical_graph: LogicalGraph) -> HfsData:
    graph = problem.graph
    if not isinstance(graph, ChimeraGraph):
        raise ValueError("HFS requires a problem on a ChimeraGraph")
    s = graph.size_s
    cells = logical_graph.vertices()
    n_c = len(cells)
    if n_c == 0:
        raise ValueError("no complete cells to optimize")
    cell_index = {c: i for i, c in enumerate(cells)}
    signs = _shore_signs()

    cell_qpos = np.zeros((n_c, 8), dtype=np.int64)
    for ci, cell in enumerate(cells):
        for q_ord, q in enumerate(cell_qubits(s, cell)):
            cell_qpos[ci, q_ord] = problem.index_of(q)

    # edge lookup by vertex-position pair
    jmap = {}
    for e in range(problem.num_edges):
        a, b = int(problem.edges[e, 0]), int(problem.edges[e, 1])
        jmap[(a, b)] = int(problem.j_num[e])
        jmap[(b, a)] = int(problem.j_num[e])

    intra_table = np.zeros((n_c, 16, 16), dtype=np.int64)
    h_shore = np.zeros((n_c, 2, 16), dtype=np.int64)
    covered = set()
    for ci in range(n_c):
        for k0 in range(4):
            q0 = int(cell_qpos[ci, k0])
            for k1 in range(4):
                q1 = int(cell_qpos[ci, 4 + k1])
                j = jmap.get((q0, q1), 0)
                covered.add(frozenset((q0, q1)))
                if j:
                    intra_table[ci] += j * np.outer(signs[:, k0], signs[:, k1])
        for u in range(2):
            for k in range(4):
                h = int(problem.h_num[cell_qpos[ci, 4 * u + k]])
                if h:
                    h_shore[ci, u] += h * signs[:, k]

    edge_list = logical_graph.edges()
    n_e = len(edge_list)
    bundle_table = np.zeros((max(n_e, 1), 16, 16), dtype=np.int64)
    bundle_joff = np.zeros((max(n_e, 1), 4), dtype=np.int64)
    adj_lists: list[list[tuple[int, int, int]]] = [[] for _ in range(n_c)]
    for eid, (a, b) in enumerate(edge_list):
        ca, cb = cell_index[a], cell_index[b]
        shore = 0 if a[1] == b[1] else 1
        for k in range(4):
            qa = int(cell_qpos[ca, 4 * shore + k])
            qb = int(cell_qpos[cb, 4 * shore + k])
            j = jmap.get((qa, qb), 0)
            bundle_joff[eid, k] = j
            covered.add(frozenset((qa, qb)))
            if j:
                bundle_table[eid] += j * np.outer(signs[:, k], signs[:, k])
        adj_lists[ca].append((cb, eid, shore))
        adj_lists[cb].append((ca, eid, shore))

    cadj_indptr = np.zeros(n_c + 1, dtype=np.int64)
    for ci in range(n_c):
        cadj_indptr[ci + 1] = cadj_indptr[ci] + len(adj_lists[ci])
    total = int(cadj_indptr[-1])
    cadj_nbr = np.zeros(total, dtype=np.int32)
    cadj_eid = np.zeros(total, dtype=np.int32)
    cadj_shore = np.zeros(total, dtype=np.int8)
    for ci in range(n_c):
        for off, (nbr, eid, shore) in enumerate(sorted(adj_lists[ci])):
            cadj_nbr[cadj_indptr[ci] + off] = nbr
            cadj_eid[cadj_indptr[ci] + off] = eid
            cadj_shore[cadj_indptr[ci] + off] = shore

    # couplers not represented by any table enter as conditioned fields
    n = problem.num_vertices
    ext_lists: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e in range(problem.num_edges):
        a, b = int(problem.edges[e, 0]), int(problem.edges[e, 1])
        if frozenset((a, b)) in covered:
            continue
        j = int(problem.j_num[e])
        if j:
            ext_lists[a].append((b, j))
            ext_lists[b].append((a, j))
    ext_indptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        ext_indptr[i + 1] = ext_indptr[i] + len(ext_lists[i])
    ext_indices = np.zeros(int(ext_indptr[-1]), dtype=np.int32)
    ext_jnum = np.zeros(int(ext_indptr[-1]), dtype=np.int64)
    for i in range(n):
        for off, (p, j) in enumerate(ext_lists[i]):
            ext_indices[ext_indptr[i] + off] = p
            ext_jnum[ext_indptr[i] + off] = j

    return HfsData(
        n_cells=n_c,
        cell_qpos=cell_qpos,
        cadj_indptr=cadj_indptr,
        cadj_nbr=cadj_nbr,
        cadj_eid=cadj_eid,
        cadj_shore=cadj_shore,
        intra_table=intra_table,
        h_shore=h_shore,
        bundle_table=bundle_table,
        bundle_joff=bundle_joff,
        ext_indptr=ext_indptr,
        ext_indices=ext_indices,
        ext_jnum=ext_jnum,
    )


@njit(cache=True)
def _full_energy_num(indptr, indices, jnum, hnum, state):
    e = np.int64(0)
    n = state.shape[0]
    for i in range(n):
        e += hnum[i] * state[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j > i:
                e += jnum[k] * state[i] * state[j]
    return e


@njit(cache=True)
def hfs_read(
    indptr,
    indices,
    jnum,
    hnum,
    n_c,
    cell_qpos,
    cadj_indptr,
    cadj_nbr,
    cadj_eid,
    cadj_shore,
    intra_table,
    h_shore,
    bundle_table,
    bundle_joff,
    ext_indptr,
    ext_indices,
    ext_jnum,
    m_stop,
    seed,
):
    """One read: tree updates until m_stop consecutive non-improvements.

    Returns (state, cell_update_count).
    """
    np.random.seed(seed)
    n = hnum.shape[0]
    state = np.empty(n, dtype=np.int8)
    for i in range(n):
        state[i] = 1 if np.random.random() < 0.5 else -1

    energy = _full_energy_num(indptr, indices, jnum, hnum, state)

    in_tree = np.zeros(n_c, dtype=np.bool_)
    nbr_count = np.zeros(n_c, dtype=np.int8)
    cand = np.zeros(n_c, dtype=np.int32)
    tree_cells = np.zeros(n_c, dtype=np.int32)
    parent_of = np.zeros(n_c, dtype=np.int32)
    parent_entry = np.zeros(n_c, dtype=np.int64)
    msg = np.zeros((n_c, 16), dtype=np.int64)
    best_face = np.zeros((n_c, 16), dtype=np.int8)
    best_other = np.zeros((n_c, 16), dtype=np.int8)
    assigned = np.zeros((n_c, 2), dtype=np.int8)
    acc = np.zeros((2, 16), dtype=np.int64)
    gbuf = np.zeros(16, dtype=np.int64)
    cond = np.zeros(n, dtype=np.int64)

    work = np.int64(0)
    since_improve = 0
    while since_improve < m_stop:
        # --- grow a random maximal induced tree of cells ---
        for c in range(n_c):
            in_tree[c] = False
            nbr_count[c] = 0
        start = np.random.randint(n_c)
        in_tree[start] = True
        tree_cells[0] = start
        parent_of[start] = -1
        parent_entry[start] = -1
        n_tree = 1
        cand_size = 0
        for k in range(cadj_indptr[start], cadj_indptr[start + 1]):
            nbr = cadj_nbr[k]
            nbr_count[nbr] += 1
            cand[cand_size] = nbr
            cand_size += 1
        while cand_size > 0:
            pick = np.random.randint(cand_size)
            c = cand[pick]
            cand[pick] = cand[cand_size - 1]
            cand_size -= 1
            if in_tree[c] or nbr_count[c] != 1:
                continue
            pe = np.int64(-1)
            for k in range(cadj_indptr[c], cadj_indptr[c + 1]):
                if in_tree[cadj_nbr[k]]:
                    pe = k
                    break
            in_tree[c] = True
            parent_of[c] = cadj_nbr[pe]
            parent_entry[c] = pe
            tree_cells[n_tree] = c
            n_tree += 1
            for k in range(cadj_indptr[c], cadj_indptr[c + 1]):
                nbr = cadj_nbr[k]
                nbr_count[nbr] += 1
                if (not in_tree[nbr]) and nbr_count[nbr] == 1:
                    cand[cand_size] = nbr
                    cand_size += 1

        # --- conditioned fields on tree-cell qubits ---
        for idx in range(n_tree):
            c = tree_cells[idx]
            for q_ord in range(8):
                q = cell_qpos[c, q_ord]
                f = np.int64(0)
                for k in range(ext_indptr[q], ext_indptr[q + 1]):
                    f += ext_jnum[k] * state[ext_indices[k]]
                cond[q] = f
            for k in range(cadj_indptr[c], cadj_indptr[c + 1]):
                nbr = cadj_nbr[k]
                if in_tree[nbr]:
                    continue
                shore = cadj_shore[k]
                eid = cadj_eid[k]
                for kk in range(4):
                    q = cell_qpos[c, 4 * shore + kk]
                    cond[q] += bundle_joff[eid, kk] * state[cell_qpos[nbr, 4 * shore + kk]]

        # --- DP messages, leaves to root ---
        for idx in range(n_tree - 1, -1, -1):
            c = tree_cells[idx]
            for u in range(2):
                for sstate in range(16):
                    a = h_shore[c, u, sstate]
                    for k in range(4):
                        sgn = 1 if (sstate >> k) & 1 else -1
                        a += cond[cell_qpos[c, 4 * u + k]] * sgn
                    acc[u, sstate] = a
            # children of c are tree cells whose parent is c
            for k in range(cadj_indptr[c], cadj_indptr[c + 1]):
                nbr = cadj_nbr[k]
                if in_tree[nbr] and parent_of[nbr] == c:
                    u = cadj_shore[k]
                    for sstate in range(16):
                        acc[u, sstate] += msg[nbr, sstate]

            if parent_of[c] < 0:
                besta = 0
                bestb = 0
                bestval = np.int64(1) << 60
                for a in range(16):
                    for b in range(16):
                        v = intra_table[c, a, b] + acc[0, a] + acc[1, b]
                        if v < bestval:
                            bestval = v
                            besta = a
                            bestb = b
                assigned[c, 0] = besta
                assigned[c, 1] = bestb
            else:
                u_p = cadj_shore[parent_entry[c]]
                eid = cadj_eid[parent_entry[c]]
                if u_p == 0:
                    for a in range(16):
                        bv = np.int64(1) << 60
                        bb = 0
                        for b in range(16):
                            v = intra_table[c, a, b] + acc[1, b]
                            if v < bv:
                                bv = v
                                bb = b
                        gbuf[a] = bv + acc[0, a]
                        best_other[c, a] = bb
                else:
                    for b in range(16):
                        bv = np.int64(1) << 60
                        ba = 0
                        for a in range(16):
                            v = intra_table[c, a, b] + acc[0, a]
                            if v < bv:
                                bv = v
                                ba = a
                        gbuf[b] = bv + acc[1, b]
                        best_other[c, b] = ba
                for sp in range(16):
                    bv = np.int64(1) << 60
                    bf = 0
                    for f in range(16):
                        v = gbuf[f] + bundle_table[eid, sp, f]
                        if v < bv:
                            bv = v
                            bf = f
                    msg[c, sp] = bv
                    best_face[c, sp] = bf

        # --- traceback, root to leaves ---
        for idx in range(n_tree):
            c = tree_cells[idx]
            if parent_of[c] >= 0:
                u_p = cadj_shore[parent_entry[c]]
                sp = assigned[parent_of[c], u_p]
                f = best_face[c, sp]
                o = best_other[c, f]
                if u_p == 0:
                    assigned[c, 0] = f
                    assigned[c, 1] = o
                else:
                    assigned[c, 0] = o
                    assigned[c, 1] = f
            for u in range(2):
                sstate = assigned[c, u]
                for k in range(4):
                    state[cell_qpos[c, 4 * u + k]] = 1 if (sstate >> k) & 1 else -1

        work += n_tree
        new_energy = _full_energy_num(indptr, indices, jnum, hnum, state)
        if new_energy < energy:
            since_improve = 0
        else:
            since_improve += 1
        energy = new_energy

    return state, work


def hfs_solve(
    problem: IsingProblem,
    logical_graph: LogicalGraph,
    num_reads: int = 1,
    seed: int = 0,
    seconds_per_cell_update: float = DEFAULT_SECONDS_PER_CELL_UPDATE,
    stop_after: int | None = None,
) -> SampleSet:
    """Run HFS reads; read duration varies with the stopping rule."""
    if num_reads < 1:
        raise ValueError("num_reads must be >= 1")
    data = prepare_hfs(problem, logical_graph)
    indptr, indices, jslot = problem.adjacency_csr()
    m_stop = stop_after if stop_after is not None else data.n_cells

    states = np.zeros((num_reads, problem.num_vertices), dtype=np.int8)
    read_times = np.zeros(num_reads, dtype=np.float64)
    t0 = time.perf_counter()
    for r in range(num_reads):
        kseed = derive_kernel_seed(seed, r)
        state, work = hfs_read(
            indptr,
            indices,
            jslot,
            problem.h_num,
            data.n_cells,
            data.cell_qpos,
            data.cadj_indptr,
            data.cadj_nbr,
            data.cadj_eid,
            data.cadj_shore,
            data.intra_table,
            data.h_shore,
            data.bundle_table,
            data.bundle_joff,
            data.ext_indptr,
            data.ext_indices,
            data.ext_jnum,
            m_stop,
            kseed,
        )
        states[r] = state
        read_times[r] = float(work) * seconds_per_cell_update
    wall = time.perf_counter() - t0

    energy_num = all_energies_num(problem, states)
    config = {
        "solver": "hfs",
        "num_reads": num_reads,
        "seed": seed,
        "stop_after": m_stop,
        "seconds_per_cell_update": seconds_per_cell_update,
    }
    return SampleSet("hfs", config, states, energy_num, problem.denom, read_times, wall)
