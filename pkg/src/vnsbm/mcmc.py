"""Canonical sampling via Metropolis-Hastings over label assignments.

The base chain swaps the labels of a uniformly chosen cross-block pair of
ambiguous vertices (a Bernoulli-Laplace move), which conserves block sizes.
The acceptance ratio touches only the two vertices' neighborhoods, so a
step costs O(deg(u) + deg(v)).

``propose`` / ``log_ratio`` / ``mh_step`` are the reference, pure-Python
implementations used by correctness tests; :func:`run_chain` drives the
compiled kernel in :mod:`vnsbm._kernels` with identical semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateChainError, ValidationError
from .nomlist import NominationList, rank_by_score
from .sbm import SbmParams, SeededGraph, log_assignment_weight, validate_assignment


def swap_table(bernoulli: np.ndarray) -> np.ndarray:
    """tbl[i, j, k]: log factor for moving a vertex from block i+1 to j+1
    past a single neighbor in block k+1."""
    log_lam = np.log(bernoulli)
    log_1m = np.log1p(-bernoulli)
    # tbl[i, j, k] = log(L[k,j](1-L[k,i])) - log(L[k,i](1-L[k,j]));
    # Lambda is symmetric, so L[k,j] == L[j,k].
    tbl = (
        log_lam[None, :, :] + log_1m[:, None, :]
        - log_lam[:, None, :] - log_1m[None, :, :]
    )
    return np.ascontiguousarray(tbl)


@dataclass
class McmcConfig:
    n_steps: int
    burn_in: int | None = None  # defaults to n_steps // 2
    rng_seed: int = 0
    audit_interval: int = 100_000

    def __post_init__(self):
        if self.burn_in is None:
            self.burn_in = self.n_steps // 2
        if self.n_steps <= 0 or self.burn_in < 0:
            raise ValidationError("n_steps must be positive, burn_in nonnegative")
        if self.burn_in >= self.n_steps:
            raise ValidationError("burn_in must be smaller than n_steps")


@dataclass
class PosteriorEstimate:
    """Sampled frequency of block-1 membership per ambiguous vertex."""

    vertices: np.ndarray
    q_hat: np.ndarray
    n_samples: int
    acceptance_rate: float = float("nan")
    max_audit_drift: float = 0.0


@dataclass
class ChainState:
    """Current assignment plus caches used by the reference implementation."""

    g: SeededGraph
    params: SbmParams
    labels: np.ndarray
    log_lik: float = field(default=None)
    by_block: list = field(default=None)

    def __post_init__(self):
        self.labels = validate_assignment(self.g, self.labels, self.params.block_sizes)
        if self.log_lik is None:
            self.log_lik = log_assignment_weight(self.g, self.labels, self.params)
        if self.by_block is None:
            amb = self.g.ambiguous
            self.by_block = [
                amb[self.labels[amb] == k] for k in range(1, self.params.K + 1)
            ]


def n_cross_pairs(free_counts) -> int:
    """Number of cross-block ambiguous pairs, C(n-m, 2) - sum C(n_i-m_i, 2)."""
    free = np.asarray(free_counts, dtype=np.int64)
    total = int(free.sum())
    return total * (total - 1) // 2 - int((free * (free - 1) // 2).sum())


def initial_assignment(g: SeededGraph, params: SbmParams, rng) -> np.ndarray:
    """Uniform draw from the feasible assignments: shuffle the free label
    multiset over the ambiguous vertices."""
    m = g.seed_counts(params.K)
    if np.any(m > params.block_sizes):
        raise ValidationError("more seeds than block size in some block")
    free = params.block_sizes - m
    labels = np.zeros(g.n, dtype=np.int64)
    labels[g.seeds] = g.seed_labels
    pool = np.repeat(np.arange(1, params.K + 1), free)
    labels[g.ambiguous] = rng.permutation(pool)
    return labels


def propose(state: ChainState, rng):
    """Uniform cross-block ambiguous pair, by rejection from A x A."""
    amb = state.g.ambiguous
    amb_labels = state.labels[amb]
    if amb.size == 0 or np.all(amb_labels == amb_labels[0]):
        raise DegenerateChainError(
            "all ambiguous vertices share one label; the state space is a point"
        )
    while True:
        u, v = rng.integers(0, amb.size, size=2)
        if state.labels[amb[u]] != state.labels[amb[v]]:
            return int(amb[u]), int(amb[v])


def log_ratio(state: ChainState, u: int, v: int) -> float:
    """log Q(phi'|G) - log Q(phi|G) for swapping the labels of u and v."""
    labels = state.labels
    i, j = int(labels[u]), int(labels[v])
    if i == j:
        raise ValidationError("u and v must carry different labels")
    tbl = swap_table(state.params.bernoulli)[i - 1, j - 1]
    adj = state.g.adj
    nu = np.flatnonzero(adj[u])
    nv = np.flatnonzero(adj[v])
    nu = nu[nu != v]
    nv = nv[nv != u]
    return float(tbl[labels[nu] - 1].sum() - tbl[labels[nv] - 1].sum())


def mh_step(state: ChainState, rng) -> bool:
    """One Metropolis-Hastings step, in place; returns True on acceptance."""
    u, v = propose(state, rng)
    dll = log_ratio(state, u, v)
    if dll >= 0.0 or rng.random() < np.exp(dll):
        i, j = int(state.labels[u]), int(state.labels[v])
        state.labels[u], state.labels[v] = j, i
        state.log_lik += dll
        bi, bj = state.by_block[i - 1], state.by_block[j - 1]
        state.by_block[i - 1] = np.concatenate([bi[bi != u], [v]])
        state.by_block[j - 1] = np.concatenate([bj[bj != v], [u]])
        return True
    return False


def run_chain(
    g: SeededGraph,
    params: SbmParams,
    config: McmcConfig,
    initial_labels: np.ndarray | None = None,
) -> PosteriorEstimate:
    """Run the sampler and estimate Q(phi(v)=1 | G) by retained-state
    frequencies. Deterministic given ``config.rng_seed``."""
    if g.n != params.n:
        raise ValidationError("graph order does not match block sizes")
    seq = np.random.SeedSequence(config.rng_seed)
    rng = np.random.default_rng(seq)
    if initial_labels is None:
        labels = initial_assignment(g, params, rng)
    else:
        labels = validate_assignment(g, initial_labels, params.block_sizes).copy()

    amb = g.ambiguous
    amb_labels = labels[amb]
    if amb.size == 0 or np.all(amb_labels == amb_labels[0]):
        raise DegenerateChainError(
            "all ambiguous vertices share one label; the state space is a point"
        )

    indptr, indices = g.neighbors_csr()
    state0, inc = _kernels.pcg32_init(seq.generate_state(2, np.uint64))
    counts, acc, drift, _final_ll = _kernels.run_chain(
        indptr,
        indices,
        labels,
        amb,
        swap_table(params.bernoulli),
        config.n_steps,
        config.burn_in,
        state0,
        inc,
        config.audit_interval,
        np.log(params.bernoulli),
        np.log1p(-params.bernoulli),
        params.block_sizes,
    )
    retained = config.n_steps - config.burn_in
    return PosteriorEstimate(
        vertices=amb,
        q_hat=counts / retained,
        n_samples=retained,
        acceptance_rate=acc / config.n_steps,
        max_audit_drift=drift,
    )


def cs_nominate(estimate: PosteriorEstimate) -> NominationList:
    """Order ambiguous vertices by nonincreasing sampled frequency."""
    return rank_by_score(estimate.vertices, estimate.q_hat, "lcs")
