"""Vertex nomination schemes behind one interface.

Every scheme consumes a seeded graph and returns a
:class:`~vnsbm.nomlist.NominationList` over the ambiguous vertices,
highest interest first. Block 1 is the block of interest by convention.

Schemes:

* ``lc``   exact canonical posterior, by enumeration (small graphs only)
* ``lcs``  sampled canonical posterior, by the swap chain
* ``lp``   spectral embedding + plain k-means, ranked by centroid distance
* ``lep``  spectral embedding + seeded Gaussian mixture, ranked by the
           estimated posterior weight of the interest component
"""

from __future__ import annotations

import numpy as np
from sklearn.cluster import KMeans

from . import canonical, gmm, mcmc
from .embed import adjacency_spectral_embed, scree_elbow
from .errors import ValidationError
from .nomlist import NominationList, rank_by_score
from .sbm import SbmParams, SeededGraph

SCHEMES = ("lc", "lcs", "lp", "lep")


def nominate_lc(
    g: SeededGraph,
    params: SbmParams,
    max_assignments: int = canonical.DEFAULT_MAX_ASSIGNMENTS,
) -> NominationList:
    """Exact canonical nomination."""
    table = canonical.enumerate_posterior(g, params, max_assignments)
    return canonical.canonical_nominate(table)


def nominate_lcs(
    g: SeededGraph,
    params: SbmParams,
    config: mcmc.McmcConfig,
) -> NominationList:
    """Sampled canonical nomination."""
    estimate = mcmc.run_chain(g, params, config)
    return mcmc.cs_nominate(estimate)


def _embed(g: SeededGraph, dim):
    """Embed, picking the dimension by scree elbow when not given."""
    if dim is None:
        probe = adjacency_spectral_embed(g, min(g.n, 50))
        dim = scree_elbow(probe.singular_values)
    return adjacency_spectral_embed(g, dim)


def _interest_cluster(centers, labels_hat, X, g: SeededGraph):
    """Cluster holding the most block-1 seeds; ties go to the center
    closest to the block-1 seed mean."""
    s1 = g.seeds[g.seed_labels == 1]
    if s1.size == 0:
        raise ValidationError("no block-1 seeds: the interest block is undefined")
    votes = np.bincount(labels_hat[s1], minlength=centers.shape[0])
    top = np.flatnonzero(votes == votes.max())
    if top.size == 1:
        return int(top[0])
    mu1 = X[s1].mean(axis=0)
    d = ((centers[top] - mu1) ** 2).sum(axis=1)
    return int(top[np.argmin(d)])


def nominate_lp(
    g: SeededGraph,
    dim: int | None = None,
    n_clusters: int | None = None,
    restarts: int = 1000,
    rng_seed: int = 0,
    random_ties: bool = False,
) -> NominationList:
    """Spectral scheme: k-means on the embedding ignores seed labels except
    to pick the interest cluster; ambiguous vertices are ranked by
    increasing Euclidean distance to its centroid.

    Distance ties break by ascending vertex id; ``random_ties`` switches to
    uniform-random tie-breaking instead.
    """
    emb = _embed(g, dim)
    X = emb.coords
    if n_clusters is None:
        n_clusters = int(g.seed_labels.max()) if g.m else 2
    km = KMeans(
        n_clusters=n_clusters, n_init=restarts, random_state=rng_seed & 0x7FFFFFFF
    ).fit(X)
    k1 = _interest_cluster(km.cluster_centers_, km.labels_, X, g)
    amb = g.ambiguous
    dist = np.sqrt(((X[amb] - km.cluster_centers_[k1]) ** 2).sum(axis=1))
    rng = np.random.default_rng(rng_seed) if random_ties else None
    return rank_by_score(amb, -dist, "lp", rng=rng)


def nominate_lep(
    g: SeededGraph,
    dim: int | None = None,
    max_K: int = 4,
    catalogue=gmm.IMPLEMENTED_MODELS,
    block_sizes=None,
    rng_seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 500,
    quasi: bool = False,
) -> NominationList:
    """Model-based spectral scheme: seeded Gaussian mixture on the embedding.

    With ``quasi=False`` every seed pins its component (component k holds the
    seeds labeled k). With ``quasi=True`` only block-1 seeds are fully
    supervised; the other seeds are constrained away from component 1 but
    otherwise free, for settings where their labels are not trusted or the
    chosen component count does not match the block count.

    Ambiguous vertices are ranked by the posterior probability of
    interest-component membership, pi_1 f_1(x) / sum_k pi_k f_k(x). The
    normalization lets the other fitted components explain away vertices
    that sit near their centers, which the bare density pi_1 f_1 cannot do,
    and it mirrors how the canonical scheme ranks by a posterior membership
    probability. (A single-component fit has a constant posterior, so that
    case falls back to the density.)
    """
    if g.m == 0 or not np.any(g.seed_labels == 1):
        raise ValidationError("no block-1 seeds: the interest block is undefined")
    emb = _embed(g, dim)
    X = emb.coords
    rng = np.random.default_rng(rng_seed)
    if quasi:
        seed_idx = g.seeds[g.seed_labels == 1]
        seed_labels = np.ones(seed_idx.size, dtype=np.int64)
        quasi_idx = g.seeds[g.seed_labels != 1]
    else:
        seed_idx, seed_labels = g.seeds, g.seed_labels
        quasi_idx = None
    fit = gmm.select_model(
        X,
        seed_idx=seed_idx,
        seed_labels=seed_labels,
        max_K=max_K,
        catalogue=catalogue,
        block_sizes=block_sizes,
        rng=rng,
        tol=tol,
        max_iter=max_iter,
        quasi_idx=quasi_idx,
    )
    amb = g.ambiguous
    logpi = np.log(np.maximum(fit.weights, 1e-300))
    logf = np.column_stack(
        [gmm._log_gauss(X[amb], fit.means[k], fit.covariances[k])
         for k in range(fit.K)]
    )
    if fit.K == 1:
        # single component: the posterior is constant, fall back to density
        score = logf[:, 0]
    else:
        joint = logf + logpi
        score = joint[:, 0] - np.logaddexp.reduce(joint, axis=1)
    return rank_by_score(amb, score, "lep")


def nominate(scheme: str, g: SeededGraph, **kwargs) -> NominationList:
    """Dispatch to one of the schemes by name."""
    scheme = scheme.lower()
    if scheme == "lc":
        return nominate_lc(g, **kwargs)
    if scheme == "lcs":
        return nominate_lcs(g, **kwargs)
    if scheme == "lp":
        return nominate_lp(g, **kwargs)
    if scheme == "lep":
        return nominate_lep(g, **kwargs)
    raise ValidationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def write_nomination(path, nomination: NominationList):
    """CSV with columns rank,vertex,score,scheme (rank is 1-based)."""
    with open(path, "w") as fh:
        fh.write("rank,vertex,score,scheme\n")
        for r, (v, s) in enumerate(
            zip(nomination.vertices, nomination.scores), start=1
        ):
            fh.write(f"{r},{v},{float(s)!r},{nomination.scheme}\n")


def read_nomination(path) -> NominationList:
    """Inverse of :func:`write_nomination`."""
    vertices, scores, schemes = [], [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "rank,vertex,score,scheme":
            raise ValidationError(f"unexpected nomination header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rank, vertex, score, scheme = line.split(",")
            vertices.append(int(vertex))
            scores.append(float(score))
            schemes.append(scheme)
    if schemes and len(set(schemes)) != 1:
        raise ValidationError("nomination file mixes schemes")
    return NominationList(
        np.asarray(vertices, np.int64),
        np.asarray(scores, np.float64),
        schemes[0] if schemes else "unknown",
    )
