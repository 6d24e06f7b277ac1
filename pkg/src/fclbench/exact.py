"""Exact ground states for lattice problems: transfer DP and brute force.

The dynamic program sweeps grid sites in column-major order, keeping one
minimum-energy table over the 2^w states of the trailing boundary (w = column
height).  Counting saturates just past the requested cap, which is exact for
the threshold test; full states come from a traceback over optimal
transitions.  Everything is integer arithmetic on energy numerators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceLimitError
from .ising import IsingProblem, all_energies_num
from .topology import LogicalGraph

DEFAULT_WIDTH_LIMIT = 16
BRUTE_FORCE_LIMIT = 24
_INF = np.int64(1) << 60


@dataclass(frozen=True)
class GroundStateSet:
    """Ground energy with an exact (possibly capped) count and state list.

    ``states`` is a (count, n) int8 array sorted lexicographically in the
    problem's vertex order (-1 before +1); empty when ``cap_exceeded``.
    """

    ground_energy: Fraction
    count: int
    cap_exceeded: bool
    states: np.ndarray

    @property
    def count_capped(self) -> tuple[int, bool]:
        return self.count, self.cap_exceeded


def _grid_layout(problem: IsingProblem):
    """Site grid, per-site couplings, and vertex positions for the DP sweep."""
    if problem.num_vertices == 0:
        raise ValueError("problem has no vertices")
    for v in problem.vertices:
        if not (isinstance(v, tuple) and len(v) == 2):
            raise ValueError("transfer DP needs (row, col) vertex labels")
    if isinstance(problem.graph, LogicalGraph):
        height, width = problem.graph.lattice_dims
    else:
        height = max(v[0] for v in problem.vertices) + 1
        width = max(v[1] for v in problem.vertices) + 1
    pos = {v: i for i, v in enumerate(problem.vertices)}
    jmap = {}
    for e in range(problem.num_edges):
        a = problem.vertices[problem.edges[e, 0]]
        b = problem.vertices[problem.edges[e, 1]]
        (ay, ax), (by, bx) = a, b
        if (abs(ay - by), abs(ax - bx)) not in ((1, 0), (0, 1)):
            raise ValueError(f"edge {a}-{b} is not a grid adjacency")
        jmap[frozenset((a, b))] = int(problem.j_num[e])
    return height, width, pos, jmap


def _dp_forward(problem: IsingProblem, width_limit: int, keep_tables: bool, cap: int | None):
    """Column-major min-DP; optionally keeps per-site tables and a saturating count.

    Boundary bit y=1 means spin +1 in row y; slots not yet holding a real site
    are pinned to bit 1, so every optimal path is counted exactly once.
    """
    height, width, pos, jmap = _grid_layout(problem)
    if height > width_limit:
        raise ResourceLimitError(
            f"lattice height {height} exceeds DP width limit {width_limit}"
        )
    size = 1 << height
    all_ones = size - 1
    bits = np.arange(size, dtype=np.int64)

    dp = np.full(size, _INF, dtype=np.int64)
    dp[all_ones] = 0
    counts = None
    sat = 0
    if cap is not None:
        sat = cap + 1
        counts = np.zeros(size, dtype=np.int64)
        counts[all_ones] = 1

    tables = [dp.copy()] if keep_tables else None
    sites = []  # (y, vertex_index or -1, h, jv, jh) per sweep step

    lo_masks = {}
    for x in range(width):
        for y in range(height):
            v = (y, x)
            real = v in pos
            h = int(problem.h_num[pos[v]]) if real else 0
            jv = jmap.get(frozenset(((y - 1, x), v)), 0) if (real and y > 0) else 0
            jh = jmap.get(frozenset(((y, x - 1), v)), 0) if (real and x > 0) else 0
            sites.append((y, pos[v] if real else -1, h, jv, jh))

            if y not in lo_masks:
                lo_masks[y] = np.nonzero(((bits >> y) & 1) == 0)[0]
            b0 = lo_masks[y]
            b1 = b0 | (1 << y)
            dp0 = dp[b0]
            dp1 = dp[b1]
            new_dp = np.full(size, _INF, dtype=np.int64)
            if real:
                vterm = jv * (((b0 >> (y - 1)) & 1) * 2 - 1) if y > 0 else 0
                base = h + vterm
                up0 = dp0 + (base - jh)   # new spin +1, old slot spin -1
                up1 = dp1 + (base + jh)   # new spin +1, old slot spin +1
                dn0 = dp0 + (-base + jh)  # new spin -1, old slot spin -1
                dn1 = dp1 + (-base - jh)  # new spin -1, old slot spin +1
                new_dp[b1] = np.minimum(up0, up1)
                new_dp[b0] = np.minimum(dn0, dn1)
                if counts is not None:
                    c1 = np.where(up0 == new_dp[b1], counts[b0], 0) + np.where(
                        up1 == new_dp[b1], counts[b1], 0
                    )
                    c0 = np.where(dn0 == new_dp[b0], counts[b0], 0) + np.where(
                        dn1 == new_dp[b0], counts[b1], 0
                    )
                    new_counts = np.zeros(size, dtype=np.int64)
                    new_counts[b1] = np.minimum(c1, sat)
                    new_counts[b0] = np.minimum(c0, sat)
                    counts = new_counts
            else:
                # absent site: slot forced to +1, no energy contribution
                new_dp[b1] = np.minimum(dp0, dp1)
                if counts is not None:
                    c1 = np.where(dp0 == new_dp[b1], counts[b0], 0) + np.where(
                        dp1 == new_dp[b1], counts[b1], 0
                    )
                    new_counts = np.zeros(size, dtype=np.int64)
                    new_counts[b1] = np.minimum(c1, sat)
                    counts = new_counts
            dp = new_dp
            if keep_tables:
                tables.append(dp.copy())

    return dp, counts, tables, sites, height


def dp_ground_energy(problem: IsingProblem, width_limit: int = DEFAULT_WIDTH_LIMIT) -> Fraction:
    """Exact minimum energy of a grid problem by boundary-state DP."""
    dp, _, _, _, _ = _dp_forward(problem, width_limit, keep_tables=False, cap=None)
    return Fraction(int(dp.min()), problem.denom)


def enumerate_ground_states(
    problem: IsingProblem, cap: int = 1000, width_limit: int = DEFAULT_WIDTH_LIMIT
) -> GroundStateSet:
    """All optimal states via traceback over optimal DP transitions.

    Counting is exact up to ``cap``; past it the set is flagged
    ``cap_exceeded`` (count reported as cap + 1) and no states are listed.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    dp, counts, tables, sites, height = _dp_forward(
        problem, width_limit, keep_tables=True, cap=cap
    )
    best = int(dp.min())
    optimal_finals = np.nonzero(dp == best)[0]
    total = int(counts[optimal_finals].sum())
    energy = Fraction(best, problem.denom)
    if total > cap:
        return GroundStateSet(energy, cap + 1, True, np.zeros((0, problem.num_vertices), np.int8))

    n_sites = len(sites)
    states = np.zeros((total, problem.num_vertices), dtype=np.int8)
    filled = 0
    # DFS over optimal transitions.  trail[i] holds the spin of site
    # n_sites-1-i; popping a node at level t truncates it to the n_sites-t
    # spins its ancestors decided.
    trail: list[int] = []
    for b_final in sorted(int(b) for b in optimal_finals):
        stack = [(n_sites, b_final)]
        while stack:
            t, b = stack.pop()
            del trail[n_sites - t:]
            if t == 0:
                for step, (y, vidx, _, _, _) in enumerate(sites):
                    if vidx >= 0:
                        states[filled, vidx] = trail[n_sites - 1 - step]
                filled += 1
                continue
            y, vidx, h, jv, jh = sites[t - 1]
            cur_bit = (b >> y) & 1
            if vidx < 0 and cur_bit != 1:
                continue
            sigma = 2 * cur_bit - 1
            sv = ((b >> (y - 1)) & 1) * 2 - 1 if y > 0 else 0
            target_val = int(tables[t][b])
            trail.append(sigma)
            for old_bit in (1, 0):
                b_prev = (b & ~(1 << y)) | (old_bit << y)
                prev_val = int(tables[t - 1][b_prev])
                if prev_val >= _INF // 2:
                    continue
                cost = sigma * (h + jv * sv + jh * (2 * old_bit - 1)) if vidx >= 0 else 0
                if prev_val + cost == target_val:
                    stack.append((t - 1, b_prev))

    assert filled == total, f"traceback found {filled} states, count pass said {total}"
    order = np.lexsort(states.T[::-1])
    states = states[order]
    return GroundStateSet(energy, total, False, states)


def brute_force(problem: IsingProblem, cap: int | None = None) -> GroundStateSet:
    """Exhaustive enumeration oracle for problems with at most 24 vertices."""
    n = problem.num_vertices
    if n == 0:
        raise ValueError("problem has no vertices")
    if n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"{n} vertices exceeds brute-force limit {BRUTE_FORCE_LIMIT}")
    total = 1 << n
    chunk = 1 << min(n, 18)
    best = None
    kept: list[np.ndarray] = []
    count = 0
    shifts = np.arange(n, dtype=np.uint32)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        block = (((codes[:, None] >> shifts[None, :]) & 1) * 2 - 1).astype(np.int8)
        energies = all_energies_num(problem, block)
        emin = int(energies.min())
        if best is None or emin < best:
            best = emin
            kept = []
            count = 0
        if emin == best:
            hits = block[energies == best]
            count += hits.shape[0]
            if cap is None or count <= cap:
                kept.append(hits)
            else:
                kept = []
    cap_exceeded = cap is not None and count > cap
    if cap_exceeded:
        states = np.zeros((0, n), dtype=np.int8)
        count = cap + 1
    else:
        states = np.concatenate(kept, axis=0) if kept else np.zeros((0, n), np.int8)
        order = np.lexsort(states.T[::-1])
        states = states[order]
    return GroundStateSet(Fraction(best, problem.denom), count, cap_exceeded, states)
