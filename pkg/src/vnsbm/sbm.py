"""Stochastic block model: parameters, sampling, seeds, and estimation.

Vertices are 0-indexed integers; block labels are 1-indexed. Graphs are
simple and undirected, stored as a dense symmetric uint8 adjacency matrix
with zero diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnestimableEntryError, ValidationError

# Row-block size used when sampling large graphs; fixed so that results
# are reproducible independent of available memory.
_SAMPLE_CHUNK = 256


@dataclass(frozen=True)
class SbmParams:
    """SBM parameters: block sizes and the symmetric Bernoulli matrix."""

    block_sizes: np.ndarray
    bernoulli: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.block_sizes, dtype=np.int64)
        lam = np.asarray(self.bernoulli, dtype=np.float64)
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "bernoulli", lam)
        if sizes.ndim != 1 or sizes.size == 0:
            raise ValidationError("block_sizes must be a nonempty 1-d vector")
        if np.any(sizes < 1):
            raise ValidationError("every block size must be >= 1")
        k = sizes.size
        if lam.shape != (k, k):
            raise ValidationError(
                f"bernoulli matrix must be {k}x{k}, got {lam.shape}"
            )
        if not np.allclose(lam, lam.T, atol=0.0):
            raise ValidationError("bernoulli matrix must be symmetric")
        if np.any(lam <= 0.0) or np.any(lam >= 1.0):
            raise ValidationError("bernoulli entries must lie strictly in (0, 1)")

    @property
    def K(self) -> int:
        return int(self.block_sizes.size)

    @property
    def n(self) -> int:
        return int(self.block_sizes.sum())


@dataclass
class SeededGraph:
    """Undirected simple graph with an observed-seed / ambiguous split.

    ``seeds`` and ``seed_labels`` are parallel arrays; every vertex not in
    ``seeds`` is ambiguous. Ground-truth labels for ambiguous vertices are
    deliberately *not* stored here (see :func:`designate_seeds`).
    """

    adj: np.ndarray
    seeds: np.ndarray
    seed_labels: np.ndarray
    _csr: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.adj = np.asarray(self.adj, dtype=np.uint8)
        self.seeds = np.asarray(self.seeds, dtype=np.int64)
        self.seed_labels = np.asarray(self.seed_labels, dtype=np.int64)
        n = self.adj.shape[0]
        if self.adj.ndim != 2 or self.adj.shape != (n, n):
            raise ValidationError("adjacency must be a square matrix")
        if np.any(np.diagonal(self.adj)):
            raise ValidationError("self-loops are not allowed")
        if not np.array_equal(self.adj, self.adj.T):
            raise ValidationError("adjacency must be symmetric")
        if self.seeds.size != self.seed_labels.size:
            raise ValidationError("seeds and seed_labels must be parallel")
        if self.seeds.size:
            if self.seeds.min() < 0 or self.seeds.max() >= n:
                raise ValidationError("seed vertex id out of range")
            if np.unique(self.seeds).size != self.seeds.size:
                raise ValidationError("duplicate seed vertex")
            if self.seed_labels.min() < 1:
                raise ValidationError("seed labels must be >= 1")

    @property
    def n(self) -> int:
        return int(self.adj.shape[0])

    @property
    def m(self) -> int:
        return int(self.seeds.size)

    @property
    def ambiguous(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.seeds] = False
        return np.flatnonzero(mask)

    def seed_counts(self, K: int) -> np.ndarray:
        """m_i for i = 1..K."""
        return np.bincount(self.seed_labels, minlength=K + 1)[1:]

    def neighbors_csr(self):
        """(indptr, indices) neighbor lists; built once, then cached."""
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum(self.adj.sum(axis=1, dtype=np.int64))
            indices = np.flatnonzero(self.adj)[:] % self.n
            # flatnonzero on the full matrix already yields row-major order
            indices = indices.astype(np.int64)
            self._csr = (indptr, indices)
        return self._csr


def full_membership(params: SbmParams) -> np.ndarray:
    """The sorted block membership vector (n_1 ones, then n_2 twos, ...)."""
    return np.repeat(np.arange(1, params.K + 1), params.block_sizes)


def sample_graph(params: SbmParams, b, rng_seed) -> SeededGraph:
    """Sample a graph from SBM(K, n, b, Lambda); no seeds designated yet.

    ``b`` must assign exactly block_sizes[i-1] vertices to each block i.
    Deterministic given ``rng_seed`` (an int or a numpy Generator).
    """
    b = np.asarray(b, dtype=np.int64)
    n = params.n
    if b.shape != (n,):
        raise ValidationError(f"membership must have length {n}")
    counts = np.bincount(b, minlength=params.K + 1)[1:]
    if counts.size > params.K or not np.array_equal(
        counts[: params.K], params.block_sizes
    ):
        raise ValidationError("membership block counts do not match block_sizes")

    rng = np.random.default_rng(rng_seed)
    cols = params.bernoulli[:, b - 1]
    adj = np.zeros((n, n), dtype=np.uint8)
    for start in range(0, n, _SAMPLE_CHUNK):
        stop = min(start + _SAMPLE_CHUNK, n)
        u = rng.random((stop - start, n))
        adj[start:stop] = u < cols[b[start:stop] - 1]
    adj = np.triu(adj, 1)
    adj += adj.T
    return SeededGraph(adj=adj, seeds=np.empty(0, np.int64),
                       seed_labels=np.empty(0, np.int64))


def designate_seeds(g: SeededGraph, b, seed_counts, rng_seed):
    """Uniformly pick seed_counts[i-1] seeds from each block of b.

    Returns ``(seeded_graph, truth)`` where ``truth`` is the full membership
    vector, kept as an evaluation-only sidecar: nomination schemes must never
    see it.
    """
    b = np.asarray(b, dtype=np.int64)
    seed_counts = np.asarray(seed_counts, dtype=np.int64)
    if b.shape != (g.n,):
        raise ValidationError(f"membership must have length {g.n}")
    rng = np.random.default_rng(rng_seed)
    seeds = []
    labels = []
    for i, mi in enumerate(seed_counts, start=1):
        block = np.flatnonzero(b == i)
        if mi > block.size:
            raise ValidationError(
                f"requested {mi} seeds from block {i} of size {block.size}"
            )
        chosen = rng.choice(block, size=mi, replace=False)
        seeds.append(np.sort(chosen))
        labels.append(np.full(mi, i, dtype=np.int64))
    seeds = np.concatenate(seeds) if seeds else np.empty(0, np.int64)
    labels = np.concatenate(labels) if labels else np.empty(0, np.int64)
    seeded = SeededGraph(adj=g.adj, seeds=seeds, seed_labels=labels)
    return seeded, b.copy()


def estimate_bernoulli(g: SeededGraph, K: int | None = None) -> np.ndarray:
    """Plug-in estimate of Lambda from the seed-induced subgraph.

    Each entry is clipped into the open interval by half a pair-count unit
    (1 / (2 * number of seed pairs observed for that entry)); downstream
    likelihoods require probabilities strictly inside (0, 1).
    """
    if K is None:
        if g.m == 0:
            raise ValidationError("no seeds: cannot estimate Lambda")
        K = int(g.seed_labels.max())
    m = g.seed_counts(K)
    lam = np.zeros((K, K), dtype=np.float64)
    seed_by_block = [g.seeds[g.seed_labels == i + 1] for i in range(K)]
    for i in range(K):
        for j in range(i, K):
            si, sj = seed_by_block[i], seed_by_block[j]
            if i == j:
                if m[i] < 2:
                    raise UnestimableEntryError(
                        i + 1, j + 1, f"block {i + 1} has {m[i]} seed(s), needs >= 2"
                    )
                pairs = m[i] * (m[i] - 1)
                sub = g.adj[np.ix_(si, si)]
                lam[i, i] = np.clip(
                    sub.sum() / pairs, 0.5 / pairs, 1.0 - 0.5 / pairs
                )
            else:
                if m[i] == 0 or m[j] == 0:
                    empty = i + 1 if m[i] == 0 else j + 1
                    raise UnestimableEntryError(
                        i + 1, j + 1, f"block {empty} has no seeds"
                    )
                pairs = m[i] * m[j]
                sub = g.adj[np.ix_(si, sj)]
                lam[i, j] = lam[j, i] = np.clip(
                    sub.sum() / pairs, 0.5 / pairs, 1.0 - 0.5 / pairs
                )
    return lam


def estimate_block_sizes(g: SeededGraph, K: int | None = None) -> np.ndarray:
    """Estimate block sizes as (m_i / m) * n, repaired to a feasible vector.

    Rounding rule: floor the raw estimates, hand out the remaining vertices
    in order of largest fractional part, then raise any block below
    max(m_i, 1) to that floor, decrementing the currently largest block.
    Guarantees sum(n_hat) == n and n_hat_i >= max(m_i, 1).
    """
    if g.m == 0:
        raise ValidationError("no seeds: cannot estimate block sizes")
    if K is None:
        K = int(g.seed_labels.max())
    m = g.seed_counts(K)
    n = g.n
    raw = m * n / g.m
    n_hat = np.floor(raw).astype(np.int64)
    frac = raw - n_hat
    remainder = n - int(n_hat.sum())
    for idx in np.argsort(-frac, kind="stable")[:remainder]:
        n_hat[idx] += 1
    floors = np.maximum(m, 1)
    while True:
        deficit = np.flatnonzero(n_hat < floors)
        if deficit.size == 0:
            break
        i = deficit[0]
        donors = np.flatnonzero(n_hat > floors)
        if donors.size == 0:
            raise ValidationError("cannot repair block sizes: n too small")
        j = donors[np.argmax(n_hat[donors])]
        n_hat[j] -= 1
        n_hat[i] += 1
    return n_hat


def validate_assignment(g: SeededGraph, labels, block_sizes) -> np.ndarray:
    """Check that ``labels`` is a member of Phi and return it as an array."""
    labels = np.asarray(labels, dtype=np.int64)
    block_sizes = np.asarray(block_sizes, dtype=np.int64)
    K = block_sizes.size
    if labels.shape != (g.n,):
        raise ValidationError(f"assignment must have length {g.n}")
    if labels.min() < 1 or labels.max() > K:
        raise ValidationError("assignment labels out of range")
    if g.m and not np.array_equal(labels[g.seeds], g.seed_labels):
        raise ValidationError("assignment disagrees with seed labels")
    counts = np.bincount(labels, minlength=K + 1)[1:]
    if not np.array_equal(counts, block_sizes):
        raise ValidationError("assignment violates block-size constraint")
    return labels


def block_edge_counts(g: SeededGraph, labels, block_sizes):
    """Edge / non-edge counts (e, c) per unordered block pair, given labels.

    Both are K x K upper-triangular integer matrices.
    """
    labels = validate_assignment(g, labels, block_sizes)
    block_sizes = np.asarray(block_sizes, dtype=np.int64)
    K = block_sizes.size
    onehot = (labels[:, None] == np.arange(1, K + 1)).astype(np.int64)
    full = onehot.T @ g.adj.astype(np.int64) @ onehot
    e = np.triu(full, 1) + np.diag(np.diagonal(full) // 2)
    pairs = np.outer(block_sizes, block_sizes)
    np.fill_diagonal(pairs, block_sizes * (block_sizes - 1) // 2)
    c = np.triu(pairs) - e
    return e, c


def log_assignment_weight(g: SeededGraph, labels, params: SbmParams) -> float:
    """log of the unnormalized likelihood prod Lambda^e (1-Lambda)^c."""
    e, c = block_edge_counts(g, labels, params.block_sizes)
    lam = params.bernoulli
    iu = np.triu_indices(params.K)
    return float(
        np.sum(e[iu] * np.log(lam[iu])) + np.sum(c[iu] * np.log1p(-lam[iu]))
    )
