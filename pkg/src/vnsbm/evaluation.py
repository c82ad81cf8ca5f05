"""Precision metrics and the Monte Carlo experiment harness.

Average precision of a nomination list averages precision-at-depth over
depths 1 .. n1 - m1 (the number of interest-block vertices hidden among
the ambiguous set). The harness repeats sample / seed / nominate / score
over independent replicates and aggregates MAP, its standard error,
per-position precision curves, and wall-clock timings.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .nomlist import NominationList
from .presets import Protocol
from .sbm import designate_seeds, full_membership, sample_graph


@dataclass
class PrecisionCurve:
    """Per list position, the fraction of replicates in which that position
    held a true interest-block vertex."""

    values: np.ndarray
    n_replicates: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise ValidationError("curve values must lie in [0, 1]")


@dataclass
class ExperimentReport:
    scheme: str
    map_estimate: float
    std_error: float
    n_replicates: int
    mean_seconds: float
    median_seconds: float
    config: dict = field(default_factory=dict)
    per_replicate_ap: np.ndarray | None = None


@dataclass
class SchemeResult:
    report: ExperimentReport
    curve: PrecisionCurve


def interest_indicators(nomination: NominationList, truth) -> np.ndarray:
    """0/1 vector along the list: was the vertex truly in block 1."""
    truth = np.asarray(truth, dtype=np.int64)
    if nomination.vertices.size and nomination.vertices.max() >= truth.size:
        raise ValidationError("truth vector does not cover the nomination list")
    return (truth[nomination.vertices] == 1).astype(np.float64)


def average_precision(nomination: NominationList, truth) -> float:
    """Mean of precision-at-depth over depths 1 .. (number of hidden
    interest-block vertices)."""
    flags = interest_indicators(nomination, truth)
    n1 = int(flags.sum())
    if n1 == 0:
        raise ValidationError(
            "no interest-block vertices among the ambiguous set; AP undefined"
        )
    depths = np.arange(1, n1 + 1, dtype=np.float64)
    return float(np.mean(np.cumsum(flags)[:n1] / depths))


def ap_position_weights(n1: int, length: int) -> np.ndarray:
    """Linear weights alpha such that AP = sum_i alpha_i * indicator_i.

    alpha_i = (1/n1) * sum_{j=i}^{n1} 1/j for positions i <= n1, else 0.
    """
    if n1 < 1 or n1 > length:
        raise ValidationError("need 1 <= n1 <= list length")
    inv = 1.0 / np.arange(1, n1 + 1, dtype=np.float64)
    alpha = np.zeros(length)
    alpha[:n1] = np.cumsum(inv[::-1])[::-1] / n1
    return alpha


def map_from_curve(curve: PrecisionCurve, n1: int) -> float:
    """MAP recovered from the per-position curve; equals the mean of the
    per-replicate APs exactly (both are linear in the indicators)."""
    alpha = ap_position_weights(n1, curve.values.size)
    return float(alpha @ curve.values)


def expected_chance_ap(n1: int, n_amb: int) -> float:
    """E[AP] of a uniformly random list: each position is interest-block
    with probability n1/n_amb and the alpha weights sum to 1."""
    if not 1 <= n1 <= n_amb:
        raise ValidationError("need 1 <= n1 <= n_amb")
    return n1 / n_amb


def equitime_mcmc_steps(
    target_seconds: float,
    calib_steps: int,
    calib_seconds: float,
    overhead_seconds: float = 0.0,
) -> int:
    """Step budget whose projected runtime matches ``target_seconds``,
    extrapolating linearly from a calibration run."""
    if calib_steps < 1 or calib_seconds <= overhead_seconds:
        raise ValidationError("calibration run shorter than its overhead")
    if target_seconds <= overhead_seconds:
        raise ValidationError(
            f"target {target_seconds:.4g}s is below the fixed overhead "
            f"{overhead_seconds:.4g}s"
        )
    rate = calib_steps / (calib_seconds - overhead_seconds)
    return max(1, int(round((target_seconds - overhead_seconds) * rate)))


def _run_replicate(protocol: Protocol, schemes, child_seq):
    """One replicate: sample, seed, run every scheme against the same graph."""
    graph_seq, scheme_seq = child_seq.spawn(2)
    rng = np.random.default_rng(graph_seq)
    # memberships are assigned to uniformly random vertex ids, so that no
    # scheme can profit from id-correlated structure (e.g. tie-breaking)
    b = rng.permutation(full_membership(protocol.params))
    g = sample_graph(protocol.params, b, rng)
    seeded, truth = designate_seeds(g, b, protocol.seed_counts, rng)
    scheme_seeds = {
        name: int(s.generate_state(1, np.uint64)[0] >> np.uint64(1))
        for name, s in zip(schemes, scheme_seq.spawn(len(schemes)))
    }
    out = {}
    for name, fn in schemes.items():
        t0 = time.perf_counter()
        nomination = fn(seeded, scheme_seeds[name])
        elapsed = time.perf_counter() - t0
        flags = interest_indicators(nomination, truth)
        if flags.size != seeded.ambiguous.size or not np.array_equal(
            np.sort(nomination.vertices), seeded.ambiguous
        ):
            raise ValidationError(
                f"scheme {name!r} did not return a permutation of the "
                "ambiguous vertices"
            )
        ap = average_precision(nomination, truth)
        out[name] = (flags, ap, elapsed)
    return out


def run_experiment(
    protocol: Protocol,
    schemes: dict,
    n_replicates: int,
    rng_seed: int = 0,
    jobs: int = 1,
    configs: dict | None = None,
) -> dict:
    """Monte Carlo evaluation of one or more schemes on a protocol.

    ``schemes`` maps a scheme tag to ``fn(seeded_graph, replicate_seed)``
    returning a NominationList. Deterministic given ``rng_seed`` (timing
    fields excluded); replicates run on ``jobs`` worker threads with
    independent RNG streams, and aggregation is order-independent.

    Returns a dict mapping each scheme tag to a :class:`SchemeResult`.
    """
    if n_replicates < 2:
        raise ValidationError("need at least 2 replicates for a standard error")
    children = np.random.SeedSequence(rng_seed).spawn(n_replicates)

    def one(i):
        try:
            return _run_replicate(protocol, schemes, children[i])
        except Exception as exc:
            raise type(exc)(f"replicate {i} failed: {exc}") from exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, range(n_replicates)))
    else:
        results = [one(i) for i in range(n_replicates)]

    out = {}
    for name in schemes:
        flags = np.stack([r[name][0] for r in results])
        aps = np.array([r[name][1] for r in results])
        secs = np.array([r[name][2] for r in results])
        out[name] = SchemeResult(
            report=ExperimentReport(
                scheme=name,
                map_estimate=float(aps.mean()),
                std_error=float(aps.std(ddof=1) / np.sqrt(n_replicates)),
                n_replicates=n_replicates,
                mean_seconds=float(secs.mean()),
                median_seconds=float(np.median(secs)),
                config=dict((configs or {}).get(name, {})),
                per_replicate_ap=aps,
            ),
            curve=PrecisionCurve(flags.mean(axis=0), n_replicates),
        )
    return out


def write_report_csv(path, results: dict):
    """One row per scheme: tag, MAP, standard error, timings."""
    with open(path, "w") as fh:
        fh.write("scheme,map,std_error,n_replicates,mean_seconds,median_seconds\n")
        for name, res in results.items():
            r = res.report
            fh.write(
                f"{name},{r.map_estimate!r},{r.std_error!r},"
                f"{r.n_replicates},{r.mean_seconds!r},{r.median_seconds!r}\n"
            )


def write_curve_csv(path, curve: PrecisionCurve):
    with open(path, "w") as fh:
        fh.write("position,probability\n")
        for i, p in enumerate(curve.values, start=1):
            fh.write(f"{i},{float(p)!r}\n")


def format_report_table(results: dict) -> str:
    """Human-readable summary, one line per scheme."""
    lines = [
        f"{'scheme':<10} {'MAP':>8} {'+/-2se':>8} {'mean s':>10} {'median s':>10}"
    ]
    for name, res in results.items():
        r = res.report
        lines.append(
            f"{name:<10} {r.map_estimate:>8.4f} {2 * r.std_error:>8.4f} "
            f"{r.mean_seconds:>10.4f} {r.median_seconds:>10.4f}"
        )
    return "\n".join(lines)
