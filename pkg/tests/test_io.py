"""On-disk formats: edge lists, seed/truth files, parameter files."""

import numpy as np
import pytest

from conftest import make_instance
from vnsbm import io
from vnsbm.errors import ValidationError
from vnsbm.sbm import SbmParams, SeededGraph


@pytest.fixture
def instance():
    params = SbmParams(
        block_sizes=[4, 3, 3],
        bernoulli=[[0.5, 0.3, 0.4], [0.3, 0.8, 0.6], [0.4, 0.6, 0.3]],
    )
    g, truth = make_instance(params, [2, 1, 1], 8)
    return g, params, truth


def test_edge_list_round_trip(tmp_path, instance):
    g, _, _ = instance
    path = tmp_path / "g.edges"
    io.write_edge_list(path, g)
    adj = io.read_edge_list(path)
    assert np.array_equal(adj, g.adj)


def test_isolated_vertices_survive(tmp_path):
    adj = np.zeros((5, 5), dtype=np.uint8)
    adj[0, 1] = adj[1, 0] = 1  # vertices 2..4 isolated
    g = SeededGraph(adj=adj, seeds=[], seed_labels=[])
    path = tmp_path / "g.edges"
    io.write_edge_list(path, g)
    assert io.read_edge_list(path).shape == (5, 5)


def test_edge_list_errors(tmp_path):
    p = tmp_path / "bad.edges"
    p.write_text("1 1\n")
    with pytest.raises(ValidationError, match="self-loop"):
        io.read_edge_list(p)
    p.write_text("-1 2\n")
    with pytest.raises(ValidationError, match="negative"):
        io.read_edge_list(p)
    p.write_text("1 2 3\n")
    with pytest.raises(ValidationError, match="expected"):
        io.read_edge_list(p)
    p.write_text("# vertices: 3\n1 5\n")
    with pytest.raises(ValidationError, match="exceeds"):
        io.read_edge_list(p)


def test_comments_ignored(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# vertices: 4\n0 1  # a comment\n\n# full-line comment\n2 3\n")
    adj = io.read_edge_list(p)
    assert adj[0, 1] == 1 and adj[2, 3] == 1 and adj.sum() == 4


def test_seed_and_truth_round_trip(tmp_path, instance):
    g, _, truth = instance
    io.write_seeds(tmp_path / "s", g)
    io.write_truth(tmp_path / "t", truth)
    seeds, labels = io.read_seeds(tmp_path / "s")
    assert np.array_equal(seeds, g.seeds)
    assert np.array_equal(labels, g.seed_labels)
    assert np.array_equal(io.read_truth(tmp_path / "t"), truth)


def test_truth_must_cover_every_vertex(tmp_path):
    p = tmp_path / "t"
    p.write_text("0 1\n2 2\n")  # vertex 1 missing
    with pytest.raises(ValidationError, match="every vertex"):
        io.read_truth(p)


def test_labeled_file_errors(tmp_path):
    p = tmp_path / "s"
    p.write_text("0 0\n")
    with pytest.raises(ValidationError, match="1-indexed"):
        io.read_seeds(p)
    p.write_text("-2 1\n")
    with pytest.raises(ValidationError, match="negative"):
        io.read_seeds(p)


def test_load_graph(tmp_path, instance):
    g, _, _ = instance
    io.write_edge_list(tmp_path / "g", g)
    io.write_seeds(tmp_path / "s", g)
    back = io.load_graph(tmp_path / "g", tmp_path / "s")
    assert np.array_equal(back.adj, g.adj)
    assert np.array_equal(back.seeds, g.seeds)
    assert back.m == g.m


def test_params_round_trip(tmp_path, instance):
    _, params, _ = instance
    path = tmp_path / "params.json"
    io.write_params(path, params, seed_counts=[2, 1, 1])
    back, seed_counts = io.read_params(path)
    assert np.array_equal(back.block_sizes, params.block_sizes)
    np.testing.assert_allclose(back.bernoulli, params.bernoulli)
    assert np.array_equal(seed_counts, [2, 1, 1])


def test_params_errors(tmp_path):
    p = tmp_path / "p.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError, match="invalid JSON"):
        io.read_params(p)
    p.write_text("[1, 2]")
    with pytest.raises(ValidationError, match="object"):
        io.read_params(p)
    p.write_text('{"block_sizes": [2, 2]}')
    with pytest.raises(ValidationError, match="bernoulli"):
        io.read_params(p)
    p.write_text(
        '{"block_sizes": [2, 2], '
        '"bernoulli": [[0.5, 0.2], [0.2, 0.5]], "seed_counts": [1]}'
    )
    with pytest.raises(ValidationError, match="seed_counts"):
        io.read_params(p)


def test_protocol_from_params(instance):
    _, params, _ = instance
    prot = io.protocol_from_params("custom", params, [2, 1, 1])
    assert prot.name == "custom"
    with pytest.raises(ValidationError):
        io.protocol_from_params("custom", params, None)
