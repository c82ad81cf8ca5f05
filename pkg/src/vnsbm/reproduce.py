"""Prebuilt experiment drivers for the published comparison tables.

Each driver wires nomination schemes (as ``fn(graph, seed)`` closures) into
:func:`vnsbm.evaluation.run_experiment` with the corresponding named
protocol. The equitime helpers budget sampler steps so its wall-clock
matches a reference scheme's measured runtime.
"""

from __future__ import annotations

import time

import numpy as np

from . import gmm
from .evaluation import equitime_mcmc_steps, run_experiment
from .mcmc import McmcConfig
from .nominate import nominate_lc, nominate_lcs, nominate_lep, nominate_lp
from .presets import Protocol, get_protocol
from .sbm import designate_seeds, full_membership, sample_graph


def scheme_lc(params, max_assignments=None):
    if max_assignments is None:
        return lambda g, seed: nominate_lc(g, params)
    return lambda g, seed: nominate_lc(g, params, max_assignments)


def scheme_lcs(params, n_steps, burn_in=None):
    return lambda g, seed: nominate_lcs(
        g, params, McmcConfig(n_steps=n_steps, burn_in=burn_in, rng_seed=seed)
    )


def scheme_lp(dim, n_clusters, restarts=1000):
    return lambda g, seed: nominate_lp(
        g, dim=dim, n_clusters=n_clusters, restarts=restarts, rng_seed=seed
    )


def scheme_lep(dim, max_K, catalogue=gmm.IMPLEMENTED_MODELS, block_sizes=None,
               quasi=False):
    return lambda g, seed: nominate_lep(
        g, dim=dim, max_K=max_K, catalogue=catalogue,
        block_sizes=block_sizes, rng_seed=seed, quasi=quasi,
    )


def _probe_graph(protocol: Protocol, rng_seed):
    rng = np.random.default_rng(rng_seed)
    b = rng.permutation(full_membership(protocol.params))
    g = sample_graph(protocol.params, b, rng)
    seeded, _ = designate_seeds(g, b, protocol.seed_counts, rng)
    return seeded


def _mean_runtime(fn, graphs, seeds):
    times = []
    for g, s in zip(graphs, seeds):
        t0 = time.perf_counter()
        fn(g, s)
        times.append(time.perf_counter() - t0)
    return float(np.mean(times))


def calibrate_equitime_steps(
    protocol: Protocol,
    reference_fn,
    rng_seed: int = 0,
    n_probe: int = 3,
    calib_steps: int = 200_000,
    burn_in=None,
):
    """Sampler step budget matching the reference scheme's mean runtime.

    Times both on probe graphs from the protocol (after a warm-up call, so
    one-time compilation does not contaminate the measurement) and
    extrapolates the sampler's per-step cost linearly.
    """
    graphs = [_probe_graph(protocol, rng_seed + i) for i in range(n_probe)]
    probe_seeds = list(range(n_probe))
    chain = scheme_lcs(protocol.params, calib_steps, burn_in)
    # warm-up: compile and fault in caches
    chain(graphs[0], 0)
    reference_fn(graphs[0], 0)
    target = _mean_runtime(reference_fn, graphs, probe_seeds)
    calib_seconds = _mean_runtime(chain, graphs, probe_seeds)
    return equitime_mcmc_steps(target, calib_steps, calib_seconds)


def run_small_scale(
    scale: str,
    n_mc: int = 2000,
    nmcmc: int = 10_000,
    rng_seed: int = 0,
    jobs: int = 1,
    include_lc: bool = True,
):
    """Exact vs sampled canonical nomination on one small-scale protocol."""
    protocol = get_protocol(scale)
    schemes = {}
    if include_lc:
        schemes["lc"] = scheme_lc(protocol.params)
    schemes["lcs"] = scheme_lcs(protocol.params, nmcmc)
    return run_experiment(protocol, schemes, n_mc, rng_seed, jobs,
                          configs={"lcs": {"nmcmc": nmcmc}})


def run_medium_comparison(
    n_mc: int = 50,
    rng_seed: int = 0,
    jobs: int = 1,
    dim: int = 3,
    n_clusters: int = 3,
    max_K: int = 4,
    restarts: int = 100,
    nmcmc: int = 100_000,
    catalogue=gmm.IMPLEMENTED_MODELS,
    include_equitime: bool = True,
    protocol_name: str = "medium",
):
    """Spectral, model-based spectral, and sampler schemes on one protocol."""
    protocol = get_protocol(protocol_name)
    lep = scheme_lep(dim, max_K, catalogue)
    schemes = {
        "lp": scheme_lp(dim, n_clusters, restarts),
        "lep": lep,
        f"lcs-{nmcmc}": scheme_lcs(protocol.params, nmcmc),
    }
    configs = {
        "lp": {"dim": dim, "k": n_clusters, "restarts": restarts},
        "lep": {"dim": dim, "max_k": max_K},
        f"lcs-{nmcmc}": {"nmcmc": nmcmc},
    }
    if include_equitime:
        steps = calibrate_equitime_steps(protocol, lep, rng_seed)
        schemes["lcs-equitime"] = scheme_lcs(protocol.params, steps)
        configs["lcs-equitime"] = {"nmcmc": steps}
    return run_experiment(protocol, schemes, n_mc, rng_seed, jobs, configs)


def run_dim_sweep(
    dims=(3, 10, 20),
    n_mc: int = 50,
    rng_seed: int = 0,
    jobs: int = 1,
    max_K: int = 10,
    catalogue=gmm.IMPLEMENTED_MODELS,
    burn_in: int = 5000,
    include_equitime: bool = True,
):
    """Embedding-dimension robustness sweep on the ten-block protocol.

    All ten blocks carry seeds, so the mixture is fully seeded (one pinned
    component per block) and the mixing weights are fixed to the known
    block proportions. The sampler's burn-in is held fixed (its step budget
    varies with the equitime target, so a proportional burn-in would be
    ill-defined).
    """
    protocol = get_protocol("ten-block")
    out = {}
    for dim in dims:
        lep = scheme_lep(dim, max_K, catalogue,
                         block_sizes=protocol.params.block_sizes)
        schemes = {"lep": lep}
        configs = {"lep": {"dim": dim, "max_k": max_K}}
        if include_equitime:
            steps = calibrate_equitime_steps(
                protocol, lep, rng_seed, burn_in=burn_in
            )
            steps = max(steps, burn_in + 1000)
            schemes["lcs-equitime"] = scheme_lcs(protocol.params, steps, burn_in)
            configs["lcs-equitime"] = {"nmcmc": steps, "burn_in": burn_in}
        out[dim] = run_experiment(protocol, schemes, n_mc, rng_seed, jobs, configs)
    return out


def run_nmcmc_sweep(
    budgets=(10 ** 3, 10 ** 4, 10 ** 5),
    n_mc: int = 50,
    rng_seed: int = 0,
    jobs: int = 1,
    protocol_name: str = "medium",
):
    """Sampler precision as a function of its step budget."""
    protocol = get_protocol(protocol_name)
    schemes = {
        f"lcs-{b}": scheme_lcs(protocol.params, b) for b in budgets
    }
    configs = {f"lcs-{b}": {"nmcmc": b} for b in budgets}
    return run_experiment(protocol, schemes, n_mc, rng_seed, jobs, configs)
