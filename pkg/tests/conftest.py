"""Shared fixtures and brute-force oracles for the test suite."""

import itertools

import numpy as np
import pytest

from vnsbm.sbm import (
    SbmParams,
    SeededGraph,
    designate_seeds,
    full_membership,
    log_assignment_weight,
    sample_graph,
)


def pytest_addoption(parser):
    parser.addoption(
        "--skip-large-lc",
        action="store_true",
        default=False,
        help="skip the exact-enumeration scheme on the large-small protocol "
        "(the slowest acceptance check)",
    )


def make_instance(params: SbmParams, seed_counts, rng_seed):
    """Sample one seeded instance; memberships land on shuffled vertex ids."""
    rng = np.random.default_rng(rng_seed)
    b = rng.permutation(full_membership(params))
    g = sample_graph(params, b, rng)
    seeded, truth = designate_seeds(g, b, seed_counts, rng)
    return seeded, truth


def random_small_params(rng, max_free=8):
    """Random SBM parameters whose ambiguous set stays enumerable."""
    while True:
        K = int(rng.integers(2, 4))
        free = rng.integers(1, 4, size=K)
        if free.sum() <= max_free:
            break
    m = rng.integers(1, 3, size=K)
    lam = rng.uniform(0.1, 0.9, size=(K, K))
    lam = (lam + lam.T) / 2.0
    return SbmParams(block_sizes=m + free, bernoulli=lam), m


def brute_force_posterior(g: SeededGraph, params: SbmParams):
    """Exact block-1 posterior over the ambiguous set, by direct summation
    over every distinct feasible assignment (multiset permutations)."""
    amb = g.ambiguous
    m = g.seed_counts(params.K)
    free = params.block_sizes - m
    pool = np.repeat(np.arange(1, params.K + 1), free)
    labels = np.zeros(g.n, dtype=np.int64)
    labels[g.seeds] = g.seed_labels
    weights = []
    assignments = []
    for perm in set(itertools.permutations(pool.tolist())):
        labels[amb] = perm
        weights.append(log_assignment_weight(g, labels, params))
        assignments.append(perm)
    weights = np.asarray(weights)
    w = np.exp(weights - weights.max())
    w /= w.sum()
    q = np.zeros(amb.size)
    for wi, perm in zip(w, assignments):
        q += wi * (np.asarray(perm) == 1)
    return amb, q


@pytest.fixture
def tiny_instance():
    """A fixed enumerable three-block instance used across oracle tests."""
    params = SbmParams(
        block_sizes=[4, 3, 3],
        bernoulli=[[0.5, 0.3, 0.4], [0.3, 0.8, 0.6], [0.4, 0.6, 0.3]],
    )
    g, truth = make_instance(params, [2, 1, 1], rng_seed=12345)
    return g, params, truth
