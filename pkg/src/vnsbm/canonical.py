"""Exact canonical nomination by full enumeration of label assignments.

Feasible only when the number of assignments (a multinomial coefficient)
is small; the sampling scheme in :mod:`vnsbm.mcmc` covers everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapacityError, ValidationError
from .nomlist import NominationList, rank_by_score
from .sbm import SbmParams, SeededGraph

DEFAULT_MAX_ASSIGNMENTS = 10 ** 8


@dataclass
class PosteriorTable:
    """Exact posterior probability of block-1 membership per ambiguous vertex."""

    vertices: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.int64)
        self.q = np.asarray(self.q, dtype=np.float64)


def ambiguous_block_counts(g: SeededGraph, params: SbmParams) -> np.ndarray:
    """n_i - m_i per block; validates seed counts against block sizes."""
    m = g.seed_counts(params.K)
    if np.any(m > params.block_sizes):
        raise ValidationError("more seeds than block size in some block")
    if g.seed_labels.size and g.seed_labels.max() > params.K:
        raise ValidationError("seed label exceeds K")
    return params.block_sizes - m


def count_assignments(free_counts) -> int:
    """|Phi| = multinomial(n - m; n_1 - m_1, ..., n_K - m_K)."""
    free_counts = np.asarray(free_counts, dtype=np.int64)
    total = int(free_counts.sum())
    count = math.factorial(total)
    for c in free_counts:
        count //= math.factorial(int(c))
    return count


def enumerate_posterior(
    g: SeededGraph,
    params: SbmParams,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
) -> PosteriorTable:
    """Compute Q(phi(v) = 1 | G) for every ambiguous v by enumeration."""
    if g.n != params.n:
        raise ValidationError("graph order does not match block sizes")
    free = ambiguous_block_counts(g, params)
    n_phi = count_assignments(free)
    if n_phi > max_assignments:
        raise CapacityError(
            f"{n_phi} feasible assignments exceed the enumeration guard "
            f"({max_assignments}); use the sampling scheme instead"
        )
    amb = g.ambiguous
    if amb.size == 0:
        return PosteriorTable(amb, np.empty(0, np.float64))

    log_lam = np.log(params.bernoulli)
    log_1m = np.log1p(-params.bernoulli)
    amb_adj = g.adj[np.ix_(amb, amb)].astype(np.float64)
    # per-vertex contribution of all (seed, ambiguous) pairs, per candidate block
    if g.m:
        seed_adj = g.adj[np.ix_(amb, g.seeds)].astype(np.float64)
        sl = g.seed_labels - 1
        base = seed_adj @ log_lam[:, sl].T + (1.0 - seed_adj) @ log_1m[:, sl].T
    else:
        base = np.zeros((amb.size, params.K))
    q = _kernels.enumerate_block1(
        amb_adj, np.ascontiguousarray(base), free, log_lam, log_1m
    )
    return PosteriorTable(amb, q)


def canonical_nominate(posterior: PosteriorTable) -> NominationList:
    """Order ambiguous vertices by nonincreasing posterior probability."""
    return rank_by_score(posterior.vertices, posterior.q, "lc")
