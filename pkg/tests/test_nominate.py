"""The four nomination schemes and the nomination-list file format."""

import numpy as np
import pytest

from conftest import make_instance
from vnsbm.errors import ValidationError
from vnsbm.mcmc import McmcConfig
from vnsbm.nomlist import NominationList, rank_by_score
from vnsbm.nominate import (
    nominate,
    nominate_lc,
    nominate_lcs,
    nominate_lep,
    nominate_lp,
    read_nomination,
    write_nomination,
)
from vnsbm.sbm import SbmParams, SeededGraph


def assortative_instance(seed=0, sizes=(9, 7, 7), seeds=(4, 3, 3)):
    """Strongly assortative: every scheme should beat chance easily."""
    K = len(sizes)
    lam = np.full((K, K), 0.08)
    np.fill_diagonal(lam, 0.75)
    params = SbmParams(block_sizes=sizes, bernoulli=lam)
    g, truth = make_instance(params, seeds, seed)
    return g, params, truth


def top_heavy(nom, truth, depth):
    """Fraction of the top-``depth`` entries truly in block 1."""
    return np.mean(truth[nom.vertices[:depth]] == 1)


class TestNominationList:
    def test_invariants(self):
        with pytest.raises(ValidationError):
            NominationList(vertices=[1, 1], scores=[0.5, 0.4], scheme="lc")
        with pytest.raises(ValidationError):
            NominationList(vertices=[1, 2], scores=[0.4, 0.5], scheme="lc")
        with pytest.raises(ValidationError):
            NominationList(vertices=[1, 2], scores=[0.5], scheme="lc")

    def test_rank_by_score_tie_break_by_id(self):
        nom = rank_by_score([7, 3, 5], [0.2, 0.2, 0.9], "x")
        assert np.array_equal(nom.vertices, [5, 3, 7])

    def test_rank_by_score_random_ties_still_valid(self):
        rng = np.random.default_rng(0)
        nom = rank_by_score([7, 3, 5], [0.2, 0.2, 0.9], "x", rng=rng)
        assert nom.vertices[0] == 5
        assert set(nom.vertices.tolist()) == {3, 5, 7}


class TestSchemes:
    def test_all_schemes_permute_ambiguous_and_beat_chance(self):
        g, params, truth = assortative_instance()
        n1_free = np.sum(truth[g.ambiguous] == 1)
        chance = n1_free / g.ambiguous.size
        noms = {
            "lc": nominate_lc(g, params),
            "lcs": nominate_lcs(g, params, McmcConfig(50_000, rng_seed=1)),
            "lp": nominate_lp(g, dim=3, n_clusters=3, restarts=50),
            "lep": nominate_lep(g, dim=3, max_K=3),
        }
        for name, nom in noms.items():
            assert nom.scheme == name
            assert np.array_equal(np.sort(nom.vertices), g.ambiguous)
            assert top_heavy(nom, truth, int(n1_free)) > chance

    def test_lc_and_lcs_agree_on_separated_posterior(self):
        g, params, _ = assortative_instance(3, sizes=(5, 4, 4), seeds=(2, 2, 2))
        lc = nominate_lc(g, params)
        lcs = nominate_lcs(g, params, McmcConfig(400_000, rng_seed=2))
        # same vertices promoted: scores are close, so compare top halves
        k = len(lc) // 2
        assert set(lc.vertices[:k]) == set(lcs.vertices[:k])

    def test_lep_quasi_mode_runs(self):
        g, _, truth = assortative_instance(5)
        nom = nominate_lep(g, dim=3, max_K=3, quasi=True)
        assert np.array_equal(np.sort(nom.vertices), g.ambiguous)
        n1_free = int(np.sum(truth[g.ambiguous] == 1))
        assert top_heavy(nom, truth, n1_free) > n1_free / g.ambiguous.size

    def test_interest_block_requires_block1_seeds(self):
        g, _, _ = assortative_instance(7)
        no1 = g.seed_labels != 1
        stripped = SeededGraph(
            adj=g.adj, seeds=g.seeds[no1], seed_labels=g.seed_labels[no1]
        )
        with pytest.raises(ValidationError):
            nominate_lp(stripped, dim=2, n_clusters=3)
        with pytest.raises(ValidationError):
            nominate_lep(stripped, dim=2, max_K=3)

    def test_automatic_dimension_pick(self):
        g, _, _ = assortative_instance(9)
        nom = nominate_lp(g, dim=None, n_clusters=3, restarts=20)
        assert np.array_equal(np.sort(nom.vertices), g.ambiguous)

    def test_dispatcher(self):
        g, params, _ = assortative_instance(11)
        nom = nominate("lc", g, params=params)
        assert nom.scheme == "lc"
        with pytest.raises(ValidationError):
            nominate("bogus", g)

    def test_deterministic_given_seed(self):
        g, _, _ = assortative_instance(13)
        a = nominate_lep(g, dim=3, max_K=3, rng_seed=4)
        b = nominate_lep(g, dim=3, max_K=3, rng_seed=4)
        assert np.array_equal(a.vertices, b.vertices)
        assert np.array_equal(a.scores, b.scores)


class TestNominationIo:
    def test_round_trip_exact(self, tmp_path):
        g, params, _ = assortative_instance(15, sizes=(5, 4, 4), seeds=(2, 1, 1))
        nom = nominate_lc(g, params)
        path = tmp_path / "nom.csv"
        write_nomination(path, nom)
        back = read_nomination(path)
        assert np.array_equal(back.vertices, nom.vertices)
        assert np.array_equal(back.scores, nom.scores)  # repr round-trips
        assert back.scheme == nom.scheme

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("vertex,score\n1,0.5\n")
        with pytest.raises(ValidationError):
            read_nomination(path)

    def test_mixed_schemes_rejected(self, tmp_path):
        path = tmp_path / "mixed.csv"
        path.write_text(
            "rank,vertex,score,scheme\n1,1,0.9,lc\n2,2,0.8,lp\n"
        )
        with pytest.raises(ValidationError):
            read_nomination(path)
