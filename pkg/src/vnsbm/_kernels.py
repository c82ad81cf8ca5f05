"""Compiled inner loops: posterior enumeration and the swap-chain sampler.

Everything here is a pure function of its arguments. Randomness comes from
an explicit PCG32 state threaded through the chain kernel, so runs are
bit-reproducible and independent chains can execute on worker threads
(kernels are compiled with ``nogil=True``).
"""

import numpy as np
from numba import njit, uint32, uint64

_PCG_MULT = uint64(6364136223846793005)
_INV_2_32 = 2.3283064365386963e-10  # 2 ** -32


def pcg32_init(seed_material):
    """Build a (state, inc) pair from two uint64 seed words."""
    mask = (1 << 64) - 1
    mult = int(_PCG_MULT)
    s0 = int(seed_material[0])
    inc = ((int(seed_material[1]) << 1) | 1) & mask
    state = inc  # advance once from 0, then mix in the seed
    state = ((state + s0) * mult + inc) & mask
    return uint64(state), uint64(inc)


@njit(inline="always")
def _pcg32(state, inc):
    old = state
    state = old * _PCG_MULT + inc
    xorshifted = uint32(((old >> uint64(18)) ^ old) >> uint64(27))
    rot = uint32(old >> uint64(59))
    out = uint32(
        (xorshifted >> rot) | (xorshifted << (uint32(32 - rot) & uint32(31)))
    )
    return state, out


@njit(cache=True, nogil=True)
def full_loglik(indptr, indices, labels, log_lam, log_1m_lam, nvec):
    """log prod Lambda^e (1-Lambda)^c over block pairs, from scratch."""
    K = nvec.size
    e = np.zeros((K, K), np.int64)
    n = labels.size
    for v in range(n):
        lv = labels[v] - 1
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if w > v:
                lw = labels[w] - 1
                if lv <= lw:
                    e[lv, lw] += 1
                else:
                    e[lw, lv] += 1
    ll = 0.0
    for i in range(K):
        for j in range(i, K):
            if i == j:
                pairs = nvec[i] * (nvec[i] - 1) // 2
            else:
                pairs = nvec[i] * nvec[j]
            ll += e[i, j] * log_lam[i, j] + (pairs - e[i, j]) * log_1m_lam[i, j]
    return ll


@njit(cache=True, nogil=True)
def run_chain(indptr, indices, labels, amb, swap_tbl, n_steps, burn_in,
              state, inc, audit_interval, log_lam, log_1m_lam, nvec):
    """Metropolis-Hastings over label assignments with cross-block swaps.

    ``labels`` holds the initial state (seed labels fixed, ambiguous labels
    already drawn uniformly over the feasible assignments) and is mutated
    in place to the final state.

    ``swap_tbl[i, j, k]`` is the per-neighbor log factor for swapping a
    vertex from block i+1 to block j+1 past a neighbor in block k+1.

    Returns (block1_counts, n_accepted, max_audit_drift, final_loglik),
    where block1_counts[x] is the number of retained states in which
    ambiguous vertex amb[x] carried label 1.
    """
    n_amb = amb.size
    counts = np.zeros(n_amb, np.int64)
    last = np.zeros(n_amb, np.int64)
    pos_of = np.full(labels.size, -1, np.int64)
    for x in range(n_amb):
        pos_of[amb[x]] = x

    cur_ll = full_loglik(indptr, indices, labels, log_lam, log_1m_lam, nvec)
    max_drift = 0.0
    acc = 0

    for step in range(1, n_steps + 1):
        while True:
            state, r1 = _pcg32(state, inc)
            state, r2 = _pcg32(state, inc)
            ui = r1 % uint32(n_amb)
            vi = r2 % uint32(n_amb)
            u = amb[ui]
            v = amb[vi]
            if labels[u] != labels[v]:
                break
        i = labels[u]
        j = labels[v]
        tij = swap_tbl[i - 1, j - 1]
        dll = 0.0
        for p in range(indptr[u], indptr[u + 1]):
            w = indices[p]
            if w != v:
                dll += tij[labels[w] - 1]
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if w != u:
                dll -= tij[labels[w] - 1]
        if dll >= 0.0:
            accept = True
        else:
            state, r3 = _pcg32(state, inc)
            accept = (r3 + 0.5) * _INV_2_32 < np.exp(dll)
        if accept:
            acc += 1
            cur_ll += dll
            # close the label-1 occupancy segments ending at X_{step-1}
            for y in (ui, vi):
                x = amb[y]
                if labels[x] == 1:
                    lo = max(last[y], burn_in + 1)
                    hi = step - 1
                    if hi >= lo:
                        counts[y] += hi - lo + 1
                last[y] = step
            labels[u] = j
            labels[v] = i
        if audit_interval > 0 and step % audit_interval == 0:
            ref = full_loglik(indptr, indices, labels, log_lam, log_1m_lam, nvec)
            drift = abs(cur_ll - ref)
            if drift > max_drift:
                max_drift = drift
            cur_ll = ref

    for y in range(n_amb):
        if labels[amb[y]] == 1:
            lo = max(last[y], burn_in + 1)
            if n_steps >= lo:
                counts[y] += n_steps - lo + 1

    return counts, acc, max_drift, cur_ll


@njit(cache=True, nogil=True)
def enumerate_block1(amb_adj, base, rem0, log_lam, log_1m_lam):
    """Exact block-1 posterior by depth-first enumeration of assignments.

    amb_adj : (p, p) float64, 0/1 adjacency among the ambiguous vertices.
    base    : (p, K) per-vertex log contribution of all seed pairs.
    rem0    : (K,) number of ambiguous slots per block.

    Likelihood terms are accumulated incrementally along the search tree;
    sums over assignments use a streaming rescaled accumulation (running
    max), equivalent to log-sum-exp.

    Returns q[x] = posterior probability that ambiguous vertex x is in
    block 1.
    """
    p, K = base.shape
    dif = log_lam - log_1m_lam
    lab = np.zeros(p, np.int64)
    choice = np.zeros(p, np.int64)
    pw = np.zeros(p + 1, np.float64)
    rem = rem0.copy()
    num = np.zeros(p, np.float64)
    denom = 0.0
    running_max = -np.inf

    t = 0
    while t >= 0:
        k = choice[t]
        while k < K and rem[k] == 0:
            k += 1
        if k == K:
            t -= 1
            if t >= 0:
                kk = lab[t]
                rem[kk] += 1
                choice[t] = kk + 1
            continue
        c = base[t, k]
        for s in range(t):
            ks = lab[s]
            c += log_1m_lam[k, ks] + amb_adj[t, s] * dif[k, ks]
        lw = pw[t] + c
        lab[t] = k
        rem[k] -= 1
        if t == p - 1:
            if lw > running_max:
                scale = np.exp(running_max - lw)
                denom *= scale
                for s in range(p):
                    num[s] *= scale
                running_max = lw
            w = np.exp(lw - running_max)
            denom += w
            for s in range(p):
                if lab[s] == 0:
                    num[s] += w
            rem[k] += 1
            choice[t] = k + 1
        else:
            pw[t + 1] = lw
            t += 1
            choice[t] = 0

    return num / denom
