"""Semi-supervised Gaussian mixtures: EM, covariance structures, selection."""

import numpy as np
import pytest

from vnsbm import gmm
from vnsbm.errors import NumericalError, ValidationError


def planted(rng_seed=0, n_per=80, spread=0.25):
    """Three well-separated 2-d Gaussians with a few seeds per class."""
    rng = np.random.default_rng(rng_seed)
    means = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
    X = np.concatenate(
        [m + spread * rng.standard_normal((n_per, 2)) for m in means]
    )
    labels = np.repeat([1, 2, 3], n_per)
    perm = rng.permutation(X.shape[0])
    X, labels = X[perm], labels[perm]
    seed_idx = np.concatenate(
        [np.flatnonzero(labels == k)[:5] for k in (1, 2, 3)]
    )
    return X, labels, seed_idx, labels[seed_idx]


class TestModelNames:
    def test_implemented_accepted(self):
        for name in gmm.IMPLEMENTED_MODELS:
            assert gmm.check_model_name(name.lower()) == name

    def test_recognized_but_unimplemented(self):
        for name in gmm.RECOGNIZED_UNIMPLEMENTED:
            with pytest.raises(ValidationError, match="not implemented"):
                gmm.check_model_name(name)

    def test_unknown_rejected(self):
        with pytest.raises(ValidationError, match="unknown"):
            gmm.check_model_name("ZZZ")

    def test_covariance_param_counts(self):
        K, d = 3, 4
        full = d * (d + 1) // 2
        expected = {
            "EII": 1, "VII": K, "EEI": d, "VVI": K * d,
            "EEE": full, "VVV": K * full,
            "EEV": full + (K - 1) * d * (d - 1) // 2,
        }
        for name, count in expected.items():
            assert gmm.covariance_param_count(name, K, d) == count

    def test_model_param_count_adds_weights_and_means(self):
        assert gmm.model_param_count("EEI", 3, 4, pi_free=True) == 2 + 12 + 4
        assert gmm.model_param_count("EEI", 3, 4, pi_free=False) == 12 + 4


class TestEmFit:
    def test_planted_recovery(self):
        X, labels, seed_idx, seed_labels = planted()
        fit = gmm.em_fit(X, seed_idx, seed_labels, K=3, cov_model="VVV")
        assert fit.converged
        acc = np.mean(fit.hard_labels == labels)
        assert acc > 0.98

    def test_responsibilities_normalized(self):
        X, _, seed_idx, seed_labels = planted(3)
        fit = gmm.em_fit(X, seed_idx, seed_labels, K=3, cov_model="VVI")
        resp = fit.responsibilities
        assert resp.shape == (X.shape[0] - seed_idx.size, 3)
        assert np.all(resp >= 0) and np.all(resp <= 1)
        np.testing.assert_allclose(resp.sum(axis=1), 1.0, atol=1e-12)

    def test_observed_loglik_monotone_in_iterations(self):
        X, _, seed_idx, seed_labels = planted(5, spread=1.2)
        init = gmm.ss_kmeanspp_init(
            X, seed_idx, seed_labels, 3, np.random.default_rng(0)
        )
        lls = [
            gmm.em_fit(
                X, seed_idx, seed_labels, 3, "EEE",
                init_labels=init, max_iter=t, tol=0.0,
            ).observed_log_likelihood
            for t in (1, 2, 3, 5, 10, 25)
        ]
        assert np.all(np.diff(lls) >= -1e-8)

    def test_fixed_weights(self):
        X, _, seed_idx, seed_labels = planted(7)
        fit = gmm.em_fit(
            X, seed_idx, seed_labels, K=3, cov_model="EEE",
            block_sizes=[2, 1, 1],
        )
        np.testing.assert_allclose(fit.weights, [0.5, 0.25, 0.25], atol=1e-12)
        assert not fit.pi_free

    def test_seed_quasi_overlap_rejected(self):
        X, _, seed_idx, seed_labels = planted(1)
        with pytest.raises(ValidationError):
            gmm.em_fit(
                X, seed_idx, seed_labels, 3, "EII", quasi_idx=seed_idx[:1]
            )

    def test_collapsed_data_fails_numerically(self):
        X = np.zeros((40, 2))
        with pytest.raises(NumericalError):
            gmm.em_fit(
                X, np.array([0, 1]), np.array([1, 2]), K=2, cov_model="VVV"
            )

    def test_bic_prime_consistency(self):
        X, _, seed_idx, seed_labels = planted(2)
        fit = gmm.em_fit(X, seed_idx, seed_labels, K=3, cov_model="EEI")
        assert fit.bic_prime == pytest.approx(
            gmm.bic_prime(fit, X.shape[0], seed_idx.size), abs=1e-9
        )

    def test_bic_prime_value_guards(self):
        with pytest.raises(ValidationError):
            gmm.bic_prime_value(0.0, 3, 10, 10)


def _all_equal(covs):
    return all(np.allclose(covs[0], c, atol=1e-8) for c in covs)


def _diagonal(covs):
    return all(
        np.allclose(c, np.diag(np.diagonal(c)), atol=1e-10) for c in covs
    )


def _spherical(covs):
    return all(
        np.allclose(c, c[0, 0] * np.eye(c.shape[0]), atol=1e-10) for c in covs
    )


def _equal_spectra(covs):
    ref = np.sort(np.linalg.eigvalsh(covs[0]))
    return all(
        np.allclose(np.sort(np.linalg.eigvalsh(c)), ref, rtol=1e-6)
        for c in covs
    )


COV_CHECKS = {
    "EII": lambda c: _spherical(c) and _all_equal(c),
    "VII": lambda c: _spherical(c),
    "EEI": lambda c: _diagonal(c) and _all_equal(c),
    "VVI": lambda c: _diagonal(c),
    "EEE": lambda c: _all_equal(c),
    "VVV": lambda c: True,
    "EEV": lambda c: _equal_spectra(c),
}


@pytest.mark.parametrize("name", gmm.IMPLEMENTED_MODELS)
def test_covariance_structural_constraints(name):
    # anisotropic, rotated planted clusters exercise every structure
    rng = np.random.default_rng(42)
    X = np.concatenate([
        [0, 0] + rng.standard_normal((90, 2)) @ np.array([[0.8, 0.3], [0.0, 0.2]]),
        [5, 1] + rng.standard_normal((90, 2)) @ np.array([[0.3, 0.0], [0.2, 0.9]]),
        [1, 6] + rng.standard_normal((90, 2)) @ np.array([[0.5, 0.1], [0.1, 0.5]]),
    ])
    labels = np.repeat([1, 2, 3], 90)
    seed_idx = np.concatenate([np.flatnonzero(labels == k)[:4] for k in (1, 2, 3)])
    fit = gmm.em_fit(X, seed_idx, labels[seed_idx], K=3, cov_model=name)
    assert fit.cov_model == name
    assert COV_CHECKS[name](fit.covariances)
    for c in fit.covariances:  # symmetric positive definite throughout
        assert np.allclose(c, c.T)
        assert np.linalg.eigvalsh(c)[0] > 0


class TestQuasiSeeding:
    def test_reduces_to_plain_fit_without_quasi_points(self):
        X, _, seed_idx, seed_labels = planted(11)
        s1 = seed_idx[seed_labels == 1]
        a = gmm.quasi_seed_em_fit(X, s1, np.empty(0, np.int64), 3, "EEE")
        b = gmm.em_fit(X, s1, np.ones(s1.size, np.int64), 3, "EEE")
        np.testing.assert_allclose(a.means, b.means, atol=1e-10)
        assert a.observed_log_likelihood == pytest.approx(
            b.observed_log_likelihood, abs=1e-9
        )

    def test_quasi_points_stay_out_of_component_one(self):
        X, labels, seed_idx, seed_labels = planted(13)
        s1 = seed_idx[seed_labels == 1]
        not1 = seed_idx[seed_labels != 1]
        fit = gmm.quasi_seed_em_fit(X, s1, not1, 3, "VVI")
        assert np.all(fit.hard_labels[not1] != 1)
        # component 1 still tracks the class-1 cloud
        mu1_true = X[labels == 1].mean(axis=0)
        assert np.linalg.norm(fit.means[0] - mu1_true) < 0.5


class TestInits:
    def test_kmeanspp_respects_seed_labels(self):
        X, _, seed_idx, seed_labels = planted(17)
        init = gmm.ss_kmeanspp_init(
            X, seed_idx, seed_labels, 4, np.random.default_rng(1)
        )
        assert np.array_equal(init[seed_idx], seed_labels)
        assert init.min() >= 1 and init.max() <= 4

    def test_kmeanspp_rejects_small_K(self):
        X, _, seed_idx, seed_labels = planted(19)
        with pytest.raises(ValidationError):
            gmm.ss_kmeanspp_init(
                X, seed_idx, seed_labels, 2, np.random.default_rng(0)
            )

    def test_discriminant_init_classifies_planted_data(self):
        X, labels, seed_idx, seed_labels = planted(23)
        init = gmm.seed_discriminant_init(X, seed_idx, seed_labels, 3)
        assert np.array_equal(init[seed_idx], seed_labels)
        assert np.mean(init == labels) > 0.95

    def test_discriminant_init_needs_two_seeds_per_class(self):
        X, _, seed_idx, seed_labels = planted(29)
        with pytest.raises(ValidationError):
            gmm.seed_discriminant_init(X, seed_idx[:1], seed_labels[:1], 3)


class TestSelectModel:
    def test_selects_reasonable_model(self):
        X, labels, seed_idx, seed_labels = planted(31)
        fit = gmm.select_model(X, seed_idx, seed_labels, max_K=4)
        assert 3 <= fit.K <= 4
        assert fit.cov_model in gmm.IMPLEMENTED_MODELS
        assert np.mean(fit.hard_labels[labels == 1] == 1) > 0.9
        assert fit.bic_prime == pytest.approx(
            gmm.bic_prime(fit, X.shape[0], seed_idx.size), abs=1e-9
        )

    def test_max_K_below_seed_classes_rejected(self):
        X, _, seed_idx, seed_labels = planted(37)
        with pytest.raises(ValidationError):
            gmm.select_model(X, seed_idx, seed_labels, max_K=2)

    def test_unimplemented_catalogue_entry_rejected(self):
        X, _, seed_idx, seed_labels = planted(41)
        with pytest.raises(ValidationError):
            gmm.select_model(
                X, seed_idx, seed_labels, max_K=3, catalogue=("VEV",)
            )

    def test_empty_catalogue_rejected(self):
        X, _, seed_idx, seed_labels = planted(43)
        with pytest.raises(ValidationError):
            gmm.select_model(X, seed_idx, seed_labels, max_K=3, catalogue=())
