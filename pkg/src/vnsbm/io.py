"""Readers and writers for the on-disk formats.

Edge list: one "u v" pair per line, 0-indexed, '#' starts a comment. The
writer records the vertex count in a leading comment so isolated vertices
survive a round trip. Seed and truth files: "vertex block" lines with
1-indexed blocks. Parameter files: JSON with block_sizes, bernoulli, and
optionally seed_counts.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ValidationError
from .presets import Protocol
from .sbm import SbmParams, SeededGraph


def _data_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def write_edge_list(path, g: SeededGraph):
    iu, ju = np.nonzero(np.triu(g.adj, 1))
    with open(path, "w") as fh:
        fh.write(f"# vertices: {g.n}\n")
        for u, v in zip(iu, ju):
            fh.write(f"{u} {v}\n")


def read_edge_list(path, n: int | None = None) -> np.ndarray:
    """Dense symmetric uint8 adjacency from an edge-list file."""
    if n is None:
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if line.startswith("#") and "vertices:" in line:
                    n = int(line.split("vertices:", 1)[1])
                    break
    edges = []
    max_v = -1
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise ValidationError(f"{path}:{lineno}: self-loop on vertex {u}")
        if u < 0 or v < 0:
            raise ValidationError(f"{path}:{lineno}: negative vertex id")
        edges.append((u, v))
        max_v = max(max_v, u, v)
    if n is None:
        n = max_v + 1
    if max_v >= n:
        raise ValidationError(f"{path}: vertex id {max_v} exceeds n={n}")
    adj = np.zeros((n, n), dtype=np.uint8)
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1
    return adj


def _write_labeled(path, vertices, labels):
    with open(path, "w") as fh:
        for v, k in zip(vertices, labels):
            fh.write(f"{v} {k}\n")


def _read_labeled(path):
    vertices, labels = [], []
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(
                f"{path}:{lineno}: expected 'vertex block', got {line!r}"
            )
        v, k = int(parts[0]), int(parts[1])
        if v < 0:
            raise ValidationError(f"{path}:{lineno}: negative vertex id")
        if k < 1:
            raise ValidationError(f"{path}:{lineno}: block labels are 1-indexed")
        vertices.append(v)
        labels.append(k)
    return np.asarray(vertices, np.int64), np.asarray(labels, np.int64)


def write_seeds(path, g: SeededGraph):
    _write_labeled(path, g.seeds, g.seed_labels)


def read_seeds(path):
    """(seed vertices, seed labels) from a seed file."""
    return _read_labeled(path)


def write_truth(path, truth):
    truth = np.asarray(truth, np.int64)
    _write_labeled(path, np.arange(truth.size), truth)


def read_truth(path) -> np.ndarray:
    """Full membership vector; requires every vertex 0..n-1 exactly once."""
    vertices, labels = _read_labeled(path)
    n = vertices.size
    if n == 0 or not np.array_equal(np.sort(vertices), np.arange(n)):
        raise ValidationError(f"{path}: truth file must label every vertex once")
    truth = np.empty(n, np.int64)
    truth[vertices] = labels
    return truth


def load_graph(graph_path, seeds_path=None, n=None) -> SeededGraph:
    adj = read_edge_list(graph_path, n=n)
    if seeds_path is None:
        seeds = np.empty(0, np.int64)
        labels = np.empty(0, np.int64)
    else:
        seeds, labels = read_seeds(seeds_path)
    return SeededGraph(adj=adj, seeds=seeds, seed_labels=labels)


def write_params(path, params: SbmParams, seed_counts=None):
    doc = {
        "block_sizes": [int(x) for x in params.block_sizes],
        "bernoulli": [[float(x) for x in row] for row in params.bernoulli],
    }
    if seed_counts is not None:
        doc["seed_counts"] = [int(x) for x in seed_counts]
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_params(path):
    """(SbmParams, seed_counts-or-None) from a JSON parameter file."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected a JSON object at top level")
    for key in ("block_sizes", "bernoulli"):
        if key not in doc:
            raise ValidationError(f"{path}: missing key {key!r}")
    params = SbmParams(
        block_sizes=np.asarray(doc["block_sizes"], dtype=np.int64),
        bernoulli=np.asarray(doc["bernoulli"], dtype=np.float64),
    )
    seed_counts = doc.get("seed_counts")
    if seed_counts is not None:
        seed_counts = np.asarray(seed_counts, dtype=np.int64)
        if seed_counts.shape != params.block_sizes.shape:
            raise ValidationError(f"{path}: seed_counts length must equal K")
    return params, seed_counts


def protocol_from_params(name, params, seed_counts) -> Protocol:
    if seed_counts is None:
        raise ValidationError("parameter file lacks seed_counts")
    return Protocol(name=name, params=params, seed_counts=seed_counts)
