"""Named experiment setups used by the evaluation harness and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .sbm import SbmParams

# Three-block family: a structured matrix interpolated toward the flat 0.5
# matrix; alpha = 0 is Erdos-Renyi, alpha = 1 fully structured.
LAMBDA_BASE = np.array([
    [0.5, 0.3, 0.4],
    [0.3, 0.8, 0.6],
    [0.4, 0.6, 0.3],
])


def lambda_alpha(alpha: float) -> np.ndarray:
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError("alpha must lie in [0, 1]")
    return alpha * LAMBDA_BASE + (1.0 - alpha) * np.full((3, 3), 0.5)


def banded_bernoulli(K: int = 10, values=(0.30, 0.27, 0.24, 0.21)) -> np.ndarray:
    """Banded matrix: entry depends on |i - j|, flat beyond the band."""
    idx = np.arange(K)
    band = np.minimum(np.abs(idx[:, None] - idx[None, :]), len(values) - 1)
    return np.asarray(values)[band]


@dataclass(frozen=True)
class Protocol:
    """A named generative setup: model parameters plus seed counts."""

    name: str
    params: SbmParams
    seed_counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "seed_counts", np.asarray(self.seed_counts, dtype=np.int64)
        )
        if self.seed_counts.shape != self.params.block_sizes.shape:
            raise ValidationError("seed_counts must have one entry per block")
        if np.any(self.seed_counts < 0) or np.any(
            self.seed_counts > self.params.block_sizes
        ):
            raise ValidationError("seed counts must satisfy 0 <= m_i <= n_i")


def _three_block(name, m, free, alpha):
    m = np.asarray(m, np.int64)
    return Protocol(
        name=name,
        params=SbmParams(block_sizes=m + np.asarray(free, np.int64),
                         bernoulli=lambda_alpha(alpha)),
        seed_counts=m,
    )


def get_protocol(name: str) -> Protocol:
    key = name.lower().replace("_", "-")
    try:
        return _PROTOCOLS[key]
    except KeyError:
        raise ValidationError(
            f"unknown protocol {name!r}; available: {', '.join(sorted(_PROTOCOLS))}"
        ) from None


_PROTOCOLS = {
    "small-small": _three_block("small-small", [4, 0, 0], [4, 3, 3], 1.0),
    "medium-small": _three_block("medium-small", [4, 0, 0], [7, 4, 4], 1.0),
    "large-small": _three_block("large-small", [4, 0, 0], [8, 5, 4], 1.0),
    "medium": _three_block("medium", [20, 0, 0], [200, 150, 150], 0.3),
    "large": _three_block("large", [40, 0, 0], [4000, 3000, 3000], 0.13),
    "ten-block": Protocol(
        name="ten-block",
        params=SbmParams(block_sizes=np.full(10, 100, np.int64),
                         bernoulli=banded_bernoulli()),
        seed_counts=np.full(10, 20, np.int64),
    ),
}

PROTOCOL_NAMES = tuple(sorted(_PROTOCOLS))
