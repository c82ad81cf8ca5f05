"""Vertex nomination on stochastic block model graphs.

Four schemes for ranking the unlabeled (ambiguous) vertices of a partially
labeled SBM graph by their probability of belonging to the block of
interest, plus a Monte Carlo evaluation harness and a CLI.
"""

from .canonical import PosteriorTable, canonical_nominate, enumerate_posterior
from .embed import Embedding, adjacency_spectral_embed, scree_elbow
from .errors import (
    CapacityError,
    DegenerateChainError,
    NumericalError,
    UnestimableEntryError,
    ValidationError,
    VnsbmError,
)
from .evaluation import (
    ExperimentReport,
    PrecisionCurve,
    average_precision,
    equitime_mcmc_steps,
    expected_chance_ap,
    format_report_table,
    run_experiment,
)
from .gmm import GmmFit, em_fit, select_model, ss_kmeanspp_init
from .mcmc import McmcConfig, PosteriorEstimate, cs_nominate, run_chain
from .nominate import (
    SCHEMES,
    nominate,
    nominate_lc,
    nominate_lcs,
    nominate_lep,
    nominate_lp,
)
from .nomlist import NominationList, rank_by_score
from .presets import Protocol, get_protocol, lambda_alpha
from .sbm import (
    SbmParams,
    SeededGraph,
    designate_seeds,
    estimate_bernoulli,
    estimate_block_sizes,
    full_membership,
    sample_graph,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DegenerateChainError",
    "Embedding",
    "ExperimentReport",
    "GmmFit",
    "McmcConfig",
    "NominationList",
    "NumericalError",
    "PosteriorEstimate",
    "PosteriorTable",
    "PrecisionCurve",
    "Protocol",
    "SbmParams",
    "SCHEMES",
    "SeededGraph",
    "UnestimableEntryError",
    "ValidationError",
    "VnsbmError",
    "adjacency_spectral_embed",
    "average_precision",
    "canonical_nominate",
    "cs_nominate",
    "designate_seeds",
    "em_fit",
    "enumerate_posterior",
    "equitime_mcmc_steps",
    "estimate_bernoulli",
    "estimate_block_sizes",
    "expected_chance_ap",
    "format_report_table",
    "full_membership",
    "get_protocol",
    "lambda_alpha",
    "nominate",
    "nominate_lc",
    "nominate_lcs",
    "nominate_lep",
    "nominate_lp",
    "rank_by_score",
    "run_chain",
    "run_experiment",
    "sample_graph",
    "scree_elbow",
    "select_model",
    "ss_kmeanspp_init",
]
