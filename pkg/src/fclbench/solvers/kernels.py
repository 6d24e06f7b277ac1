"""Compiled Monte Carlo kernels.

All kernels seed numba's MT19937 stream explicitly and draw one acceptance
uniform per spin update, so trajectories are reproducible and the
single-slice quantum walk consumes randomness exactly like the classical
kernel (their trajectories coincide when the effective temperatures match).
Metropolis decisions use float couplings; exact energies are recomputed
outside with integer arithmetic.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def metropolis_anneal(indptr, indices, jval, hval, betas, seed):
    """One annealing read: random init, then a fixed-order pass per beta."""
    np.random.seed(seed)
    n = hval.shape[0]
    state = np.empty(n, dtype=np.int8)
    for i in range(n):
        state[i] = 1 if np.random.random() < 0.5 else -1
    for t in range(betas.shape[0]):
        beta = betas[t]
        for i in range(n):
            field = hval[i]
            for k in range(indptr[i], indptr[i + 1]):
                field += jval[k] * state[indices[k]]
            de = -2.0 * state[i] * field
            if np.random.random() < np.exp(-beta * de):
                state[i] = -state[i]
    return state


@njit(cache=True)
def metropolis_chain(indptr, indices, jval, hval, beta, num_records, thin, burn_in, seed):
    """Fixed-temperature chain; records the state every ``thin`` sweeps."""
    np.random.seed(seed)
    n = hval.shape[0]
    state = np.empty(n, dtype=np.int8)
    for i in range(n):
        state[i] = 1 if np.random.random() < 0.5 else -1
    out = np.empty((num_records, n), dtype=np.int8)
    total = burn_in + num_records * thin
    rec = 0
    for t in range(total):
        for i in range(n):
            field = hval[i]
            for k in range(indptr[i], indptr[i + 1]):
                field += jval[k] * state[indices[k]]
            de = -2.0 * state[i] * field
            if np.random.random() < np.exp(-beta * de):
                state[i] = -state[i]
        if t >= burn_in and (t - burn_in + 1) % thin == 0:
            out[rec] = state
            rec += 1
    return out


@njit(cache=True)
def svmc_anneal(indptr, indices, jval, hval, a_vals, b_vals, beta, seed):
    """Rotor-model read: uniform angle proposals on [0, pi] at fixed beta."""
    np.random.seed(seed)
    n = hval.shape[0]
    theta = np.empty(n, dtype=np.float64)
    cos_t = np.empty(n, dtype=np.float64)
    for i in range(n):
        theta[i] = np.random.random() * np.pi
        cos_t[i] = np.cos(theta[i])
    for t in range(a_vals.shape[0]):
        at = a_vals[t]
        bt = b_vals[t]
        for i in range(n):
            field = hval[i]
            for k in range(indptr[i], indptr[i + 1]):
                field += jval[k] * cos_t[indices[k]]
            prop = np.random.random() * np.pi
            cp = np.cos(prop)
            de = -at * (np.sin(prop) - np.sin(theta[i])) + bt * (cp - cos_t[i]) * field
            if np.random.random() < np.exp(-beta * de):
                theta[i] = prop
                cos_t[i] = cp
    state = np.empty(n, dtype=np.int8)
    for i in range(n):
        if cos_t[i] > 0.0:
            state[i] = 1
        elif cos_t[i] < 0.0:
            state[i] = -1
        else:
            state[i] = 1 if np.random.random() < 0.5 else -1
    return state


@njit(cache=True)
def qmc_anneal(indptr, indices, jval, hval, bB, kappa, slices, seed):
    """Discrete-time path-integral read.

    bB[t] = beta * B(lambda_t) / P scales the classical energy; kappa[t] is
    the ferromagnetic inter-slice coupling.  Updates sweep (slice, spin) in
    fixed order at unit effective temperature.  With a single slice the
    inter-slice term vanishes and this reduces to `metropolis_anneal` with
    betas = bB.
    """
    np.random.seed(seed)
    n = hval.shape[0]
    state = np.empty((slices, n), dtype=np.int8)
    for k in range(slices):
        for i in range(n):
            state[k, i] = 1 if np.random.random() < 0.5 else -1
    for t in range(bB.shape[0]):
        bbt = bB[t]
        kt = kappa[t]
        for k in range(slices):
            up = (k + 1) % slices
            dn = (k - 1) % slices
            for i in range(n):
                field = hval[i]
                for kk in range(indptr[i], indptr[i + 1]):
                    field += jval[kk] * state[k, indices[kk]]
                de = bbt * (-2.0 * state[k, i] * field)
                if slices > 1:
                    de += 2.0 * kt * state[k, i] * (state[dn, i] + state[up, i])
                if np.random.random() < np.exp(-de):
                    state[k, i] = -state[k, i]
    return state


@njit(cache=True)
def pt_run(
    indptr,
    indices,
    jnum,
    hnum,
    inv_denom,
    betas,
    sweeps,
    seed,
    index_series,   # (sweeps, n_rep) int16: slot of each chain
    energy_series,  # (sweeps, n_rep) int64: energy numerator at each slot
    swap_accepts,   # (n_rep - 1,) int64
    swap_proposals,  # (n_rep - 1,) int64
    record_states,  # bool: fill state_series per sweep
    state_series,   # (sweeps, n_rep, n) int8 when recording, else (1, 1, 1)
):
    """Parallel tempering with adjacent replica exchange.

    Slot 0 must be beta = 0; its configuration is redrawn uniformly every
    sweep.  Energies are tracked as exact integer numerators.  Chains are
    configuration lineages: a swap moves two chains between ladder slots.
    """
    np.random.seed(seed)
    n_rep = betas.shape[0]
    n = hnum.shape[0]
    states = np.empty((n_rep, n), dtype=np.int8)
    for r in range(n_rep):
        for i in range(n):
            states[r, i] = 1 if np.random.random() < 0.5 else -1

    row_of_slot = np.arange(n_rep).astype(np.int16)
    chain_of_slot = np.arange(n_rep).astype(np.int16)
    slot_of_chain = np.arange(n_rep).astype(np.int16)

    energy = np.zeros(n_rep, dtype=np.int64)  # indexed by slot
    for r in range(n_rep):
        e = np.int64(0)
        row = row_of_slot[r]
        for i in range(n):
            e += hnum[i] * states[row, i]
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                if j > i:
                    e += jnum[k] * states[row, i] * states[row, j]
        energy[r] = e

    for t in range(sweeps):
        for r in range(n_rep):
            row = row_of_slot[r]
            beta = betas[r]
            if beta == 0.0:
                # perfect decorrelation at the hot end: fresh uniform state
                for i in range(n):
                    states[row, i] = 1 if np.random.random() < 0.5 else -1
                e = np.int64(0)
                for i in range(n):
                    e += hnum[i] * states[row, i]
                    for k in range(indptr[i], indptr[i + 1]):
                        j = indices[k]
                        if j > i:
                            e += jnum[k] * states[row, i] * states[row, j]
                energy[r] = e
            else:
                e = energy[r]
                for i in range(n):
                    f = hnum[i]
                    for k in range(indptr[i], indptr[i + 1]):
                        f += jnum[k] * states[row, indices[k]]
                    de = np.int64(-2) * states[row, i] * f
                    if np.random.random() < np.exp(-beta * (de * inv_denom)):
                        states[row, i] = -states[row, i]
                        e += de
                energy[r] = e

        for r in range(n_rep - 1):
            swap_proposals[r] += 1
            dbeta = betas[r + 1] - betas[r]
            de = (energy[r + 1] - energy[r]) * inv_denom
            if np.random.random() < np.exp(dbeta * de):
                swap_accepts[r] += 1
                row_of_slot[r], row_of_slot[r + 1] = row_of_slot[r + 1], row_of_slot[r]
                energy[r], energy[r + 1] = energy[r + 1], energy[r]
                ca = chain_of_slot[r]
                cb = chain_of_slot[r + 1]
                chain_of_slot[r] = cb
                chain_of_slot[r + 1] = ca
                slot_of_chain[ca] = r + 1
                slot_of_chain[cb] = r

        for c in range(n_rep):
            index_series[t, c] = slot_of_chain[c]
        for r in range(n_rep):
            energy_series[t, r] = energy[r]
        if record_states:
            for r in range(n_rep):
                row = row_of_slot[r]
                for i in range(n):
                    state_series[t, r, i] = states[row, i]
