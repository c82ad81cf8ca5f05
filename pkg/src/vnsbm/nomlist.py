"""Nomination lists: ranked ambiguous vertices with per-vertex scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass
class NominationList:
    """Ordering of the ambiguous vertices, highest score first.

    ``vertices`` and ``scores`` are parallel; ``scores`` is nonincreasing.
    """

    vertices: np.ndarray
    scores: np.ndarray
    scheme: str

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.vertices.shape != self.scores.shape:
            raise ValidationError("vertices and scores must be parallel")
        if np.unique(self.vertices).size != self.vertices.size:
            raise ValidationError("nomination list repeats a vertex")
        if self.scores.size > 1 and np.any(np.diff(self.scores) > 0):
            raise ValidationError("scores must be nonincreasing")

    def __len__(self):
        return int(self.vertices.size)


def rank_by_score(vertices, scores, scheme, rng=None) -> NominationList:
    """Sort by nonincreasing score; ties broken by ascending vertex id.

    If ``rng`` is given, ties are instead broken uniformly at random
    (the tie rule used in the source definitions of the spectral scheme).
    """
    vertices = np.asarray(vertices, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if rng is None:
        order = np.lexsort((vertices, -scores))
    else:
        jitter = rng.permutation(vertices.size)
        order = np.lexsort((jitter, -scores))
    return NominationList(vertices[order], scores[order], scheme)
