"""Adjacency spectral embedding and a profile-likelihood elbow helper."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ValidationError
from .sbm import SeededGraph

# Above this order, switch from a dense eigendecomposition to an iterative
# Lanczos-style partial one.
DENSE_LIMIT = 2000
_LANCZOS_PAD = 8
_LANCZOS_TOL = 1e-10


@dataclass
class Embedding:
    """Spectral coordinates: one row per vertex, columns ordered by
    nonincreasing singular value (|eigenvalue| of the adjacency)."""

    coords: np.ndarray
    singular_values: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])


def adjacency_spectral_embed(g, dim: int) -> Embedding:
    """Embed into R^dim as U |D|^{1/2} from the top-|.| adjacency eigenpairs.

    For a symmetric adjacency A, (A^T A)^{1/2} = |A| spectrally, so the top
    singular values are the largest-magnitude eigenvalues; negative
    eigenvalues enter through their absolute value.
    """
    adj = g.adj if isinstance(g, SeededGraph) else np.asarray(g)
    n = adj.shape[0]
    if not 1 <= dim <= n:
        raise ValidationError(f"embedding dimension must be in [1, {n}]")
    if not np.array_equal(adj, adj.T):
        raise ValidationError("adjacency must be symmetric")

    if n <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(adj.astype(np.float64))
    else:
        k = min(dim + _LANCZOS_PAD, n - 1)
        vals, vecs = spla.eigsh(
            sp.csr_matrix(adj, dtype=np.float64), k=k, which="LM",
            tol=_LANCZOS_TOL, v0=np.ones(n) / np.sqrt(n),
        )
    # sort by (|lambda| desc, lambda desc, solver index asc)
    order = np.lexsort((np.arange(vals.size), -vals, -np.abs(vals)))[:dim]
    vals = vals[order]
    vecs = vecs[:, order]
    sing = np.abs(vals)
    coords = vecs * np.sqrt(sing)
    return Embedding(coords=coords, singular_values=sing)


def full_spectrum(g) -> np.ndarray:
    """All n singular values of the adjacency, nonincreasing."""
    adj = g.adj if isinstance(g, SeededGraph) else np.asarray(g)
    vals = np.linalg.eigvalsh(adj.astype(np.float64))
    return np.sort(np.abs(vals))[::-1]


def scree_elbow(singular_values) -> int:
    """Profile-likelihood elbow (Zhu-Ghodsi): split the sorted values into
    two groups, model each with a Gaussian of common variance, and return
    the split (as a dimension count) maximizing the profile log-likelihood.
    """
    vals = np.sort(np.asarray(singular_values, dtype=np.float64))[::-1]
    p = vals.size
    if p < 3:
        raise ValidationError("scree_elbow needs at least 3 values")
    if np.allclose(vals, vals[0]):
        return 1
    best_q, best_ll = 1, -np.inf
    for q in range(1, p):
        head, tail = vals[:q], vals[q:]
        var = (
            np.sum((head - head.mean()) ** 2) + np.sum((tail - tail.mean()) ** 2)
        ) / p
        if var <= 0.0:
            var = np.finfo(float).tiny
        ll = -0.5 * p * np.log(2.0 * np.pi * var) - 0.5 * p
        if ll > best_ll:
            best_q, best_ll = q, ll
    return best_q
