"""Command-line front end: generate, nominate, evaluate, reproduce.

Exit codes: 0 success, 2 invalid input, 3 capacity guard, 4 numerical
failure. Errors print as a single line on stderr. A JSON config file
(--config) may supply any flag; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import evaluation, gmm, io, reproduce
from .errors import CapacityError, NumericalError, ValidationError
from .mcmc import McmcConfig
from .nominate import (
    SCHEMES,
    nominate_lc,
    nominate_lcs,
    nominate_lep,
    nominate_lp,
    write_nomination,
    read_nomination,
)
from .presets import PROTOCOL_NAMES, get_protocol
from .sbm import (
    SbmParams,
    designate_seeds,
    estimate_bernoulli,
    estimate_block_sizes,
    full_membership,
    sample_graph,
)

TABLES = ("table3", "table4-medium", "table4-large", "table5", "nmcmc-sweep")


def build_parser():
    p = argparse.ArgumentParser(
        prog="vnsbm",
        description="Vertex nomination on stochastic block model graphs.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    # paths are validated after the optional --config merge, so none of
    # them is marked required at the argparse level
    g = sub.add_parser("generate", help="sample a graph, seeds, and truth files")
    g.add_argument("--config", help="JSON file of default flag values")
    g.add_argument("--preset", choices=PROTOCOL_NAMES,
                   help="named parameter setup")
    g.add_argument("--params", help="JSON parameter file (with seed_counts)")
    g.add_argument("--graph", help="edge-list output path")
    g.add_argument("--seeds", help="seed-file output path")
    g.add_argument("--truth", help="truth-file output path")
    g.add_argument("--params-out", help="echo resolved parameters to this file")
    g.add_argument("--seed", type=int, default=0)

    n = sub.add_parser("nominate", help="run one nomination scheme")
    n.add_argument("--config", help="JSON file of default flag values")
    n.add_argument("--scheme", choices=SCHEMES)
    n.add_argument("--graph")
    n.add_argument("--seeds")
    n.add_argument("--params", help="JSON parameter file (lc/lcs)")
    n.add_argument("--estimate-params", action="store_true",
                   help="estimate the model from the seed subgraph (lc/lcs)")
    n.add_argument("--dim", type=int, help="embedding dimension (lp/lep)")
    n.add_argument("--k", type=int, help="number of k-means clusters (lp)")
    n.add_argument("--max-k", type=int, default=4,
                   help="largest component count tried (lep)")
    n.add_argument("--catalogue", default=",".join(gmm.IMPLEMENTED_MODELS),
                   help="comma-separated covariance structures (lep)")
    n.add_argument("--nmcmc", type=int, default=10_000, help="sampler steps (lcs)")
    n.add_argument("--burn-in", type=int, help="burn-in steps (default half)")
    n.add_argument("--restarts", type=int, default=1000,
                   help="k-means restarts (lp)")
    n.add_argument("--quasi", action="store_true",
                   help="treat non-block-1 seeds as known-not-1 only (lep)")
    n.add_argument("--max-assignments", type=int,
                   default=None, help="enumeration size guard (lc)")
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--out", help="nomination CSV path (default stdout)")

    e = sub.add_parser("evaluate", help="score a nomination list against truth")
    e.add_argument("--config", help="JSON file of default flag values")
    e.add_argument("nomination", help="nomination CSV path")
    e.add_argument("--truth")
    e.add_argument("--out", help="precision-at-depth CSV path")

    r = sub.add_parser("reproduce", help="rerun a published comparison")
    r.add_argument("--config", help="JSON file of default flag values")
    r.add_argument("table", choices=TABLES)
    r.add_argument("--scale-down", type=float, default=1.0,
                   help="divide replicate counts by this factor")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--out", help="combined report CSV path")
    return p


def apply_config(args, argv):
    """Fill flags from --config for options absent from the command line."""
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        try:
            overrides = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}: invalid JSON: {exc}") from exc
    if not isinstance(overrides, dict):
        raise ValidationError(f"{args.config}: expected a JSON object")
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ValidationError(f"{args.config}: unknown option {key!r}")
        if f"--{key.replace('_', '-')}" in argv:
            continue  # explicit flag wins
        setattr(args, dest, value)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValidationError(f"missing required option(s): {flags}")


def cmd_generate(args):
    _require(args, "graph", "seeds", "truth")
    if (args.preset is None) == (args.params is None):
        raise ValidationError("generate needs exactly one of --preset / --params")
    if args.preset:
        protocol = get_protocol(args.preset)
        params, seed_counts = protocol.params, protocol.seed_counts
    else:
        params, seed_counts = io.read_params(args.params)
        if seed_counts is None:
            raise ValidationError("parameter file lacks seed_counts")
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    # block memberships land on uniformly random vertex ids
    b = rng.permutation(full_membership(params))
    g = sample_graph(params, b, rng)
    seeded, truth = designate_seeds(g, b, seed_counts, rng)
    io.write_edge_list(args.graph, seeded)
    io.write_seeds(args.seeds, seeded)
    io.write_truth(args.truth, truth)
    if args.params_out:
        io.write_params(args.params_out, params, seed_counts)
    print(json.dumps({
        "block_sizes": [int(x) for x in params.block_sizes],
        "seed_counts": [int(x) for x in seed_counts],
        "n": params.n,
        "edges": int(seeded.adj.sum()) // 2,
    }))
    return 0


def _resolve_params(args, g):
    if args.params and args.estimate_params:
        raise ValidationError("--params and --estimate-params are exclusive")
    if args.params:
        params, _ = io.read_params(args.params)
        return params
    if args.estimate_params:
        K = args.k if args.k else (int(g.seed_labels.max()) if g.m else 0)
        if K < 1:
            raise ValidationError("cannot infer K: no seeds and no --k")
        return SbmParams(
            block_sizes=estimate_block_sizes(g, K),
            bernoulli=estimate_bernoulli(g, K),
        )
    raise ValidationError(
        f"scheme {args.scheme!r} needs --params or --estimate-params"
    )


def cmd_nominate(args):
    _require(args, "scheme", "graph", "seeds")
    if args.scheme not in SCHEMES:
        raise ValidationError(
            f"unknown scheme {args.scheme!r}; expected one of {SCHEMES}"
        )
    g = io.load_graph(args.graph, args.seeds)
    if args.scheme == "lc":
        params = _resolve_params(args, g)
        guard = args.max_assignments
        nomination = (
            nominate_lc(g, params) if guard is None
            else nominate_lc(g, params, guard)
        )
    elif args.scheme == "lcs":
        params = _resolve_params(args, g)
        config = McmcConfig(n_steps=args.nmcmc, burn_in=args.burn_in,
                            rng_seed=args.seed)
        nomination = nominate_lcs(g, params, config)
    elif args.scheme == "lp":
        nomination = nominate_lp(
            g, dim=args.dim, n_clusters=args.k,
            restarts=args.restarts, rng_seed=args.seed,
        )
    else:
        catalogue = [s for s in args.catalogue.split(",") if s]
        nomination = nominate_lep(
            g, dim=args.dim, max_K=args.max_k,
            catalogue=catalogue, rng_seed=args.seed, quasi=args.quasi,
        )
    if args.out:
        write_nomination(args.out, nomination)
    else:
        write_nomination("/dev/stdout", nomination)
    return 0


def cmd_evaluate(args):
    _require(args, "truth")
    nomination = read_nomination(args.nomination)
    truth = io.read_truth(args.truth)
    flags = evaluation.interest_indicators(nomination, truth)
    ap = float(evaluation.average_precision(nomination, truth))
    n1 = int(flags.sum())
    depths = np.arange(1, n1 + 1)
    prec = np.cumsum(flags)[:n1] / depths
    print(f"average_precision {ap!r}")
    print("depth precision")
    for j, pj in zip(depths, prec):
        print(f"{j} {pj:.6f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("depth,precision\n")
            for j, pj in zip(depths, prec):
                fh.write(f"{j},{float(pj)!r}\n")
    return 0


def _emit(results_by_tag, out_path):
    rows = []
    for tag, results in results_by_tag.items():
        print(f"== {tag} ==")
        print(evaluation.format_report_table(results))
        for scheme, res in results.items():
            r = res.report
            rows.append((tag, scheme, r.map_estimate, r.std_error,
                         r.n_replicates, r.mean_seconds, r.median_seconds))
    if out_path:
        with open(out_path, "w") as fh:
            fh.write("protocol,scheme,map,std_error,"
                     "n_replicates,mean_seconds,median_seconds\n")
            for row in rows:
                fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                                  for x in row) + "\n")


def _scaled(n, factor, floor=2):
    return max(floor, int(round(n / factor)))


def cmd_reproduce(args):
    f = args.scale_down
    if f < 1.0:
        raise ValidationError("--scale-down must be >= 1")
    if args.table == "table3":
        out = {}
        for scale in ("small-small", "medium-small", "large-small"):
            out[scale] = reproduce.run_small_scale(
                scale, n_mc=_scaled(2000, f), rng_seed=args.seed, jobs=args.jobs
            )
        _emit(out, args.out)
    elif args.table == "table4-medium":
        results = reproduce.run_medium_comparison(
            n_mc=_scaled(50, f), rng_seed=args.seed, jobs=args.jobs
        )
        _emit({"medium": results}, args.out)
    elif args.table == "table4-large":
        results = reproduce.run_medium_comparison(
            n_mc=_scaled(50, 25.0 * f), rng_seed=args.seed, jobs=args.jobs,
            restarts=10, protocol_name="large",
        )
        _emit({"large": results}, args.out)
    elif args.table == "table5":
        sweep = reproduce.run_dim_sweep(
            n_mc=_scaled(50, f), rng_seed=args.seed, jobs=args.jobs
        )
        _emit({f"ten-block-dim{d}": r for d, r in sweep.items()}, args.out)
    else:
        results = reproduce.run_nmcmc_sweep(
            n_mc=_scaled(50, f), rng_seed=args.seed, jobs=args.jobs
        )
        _emit({"medium": results}, args.out)
    return 0


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = apply_config(args, argv)
        handler = {
            "generate": cmd_generate,
            "nominate": cmd_nominate,
            "evaluate": cmd_evaluate,
            "reproduce": cmd_reproduce,
        }[args.command]
        return handler(args)
    except ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"error: capacity: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
