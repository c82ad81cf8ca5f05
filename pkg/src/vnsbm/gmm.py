"""Semi-supervised Gaussian mixture clustering with structured covariances.

Seed points carry known component labels and contribute one-hot
responsibilities (their likelihood terms carry no mixing weight); the
remaining points are soft-assigned by EM. Model selection maximizes a BIC
variant whose complexity penalty counts only the unsupervised points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NumericalError, ValidationError

IMPLEMENTED_MODELS = ("EII", "VII", "EEI", "VVI", "EEE", "VVV", "EEV")
# Catalogued in the literature but needing iterative M-steps we don't carry.
RECOGNIZED_UNIMPLEMENTED = (
    "E", "V", "X", "VEI", "EVI", "EVE", "VEE", "VVE", "VEV", "EVV",
    "XII", "XXI", "XXX",
)

_RIDGE_EPS = 1e-8
_COLLAPSE_EIG = 1e-12
_EMPTY_WEIGHT = 1e-6


def check_model_name(name: str) -> str:
    name = name.upper()
    if name in IMPLEMENTED_MODELS:
        return name
    if name in RECOGNIZED_UNIMPLEMENTED:
        raise ValidationError(
            f"covariance model {name!r} is recognized but not implemented; "
            f"available: {', '.join(IMPLEMENTED_MODELS)}"
        )
    raise ValidationError(f"unknown covariance model {name!r}")


def covariance_param_count(name: str, K: int, d: int) -> int:
    """Number of free covariance parameters for the structure."""
    name = check_model_name(name)
    full = d * (d + 1) // 2
    return {
        "EII": 1,
        "VII": K,
        "EEI": d,
        "VVI": K * d,
        "EEE": full,
        "VVV": K * full,
        "EEV": full + (K - 1) * d * (d - 1) // 2,
    }[name]


def model_param_count(name: str, K: int, d: int, pi_free: bool) -> int:
    """tau_M: mixing weights (if free) + means + covariance parameters."""
    return (K - 1 if pi_free else 0) + K * d + covariance_param_count(name, K, d)


@dataclass
class GmmFit:
    """A fitted semi-supervised mixture plus its selection score."""

    K: int
    cov_model: str
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    log_likelihood: float  # complete-data value at the hard labels
    observed_log_likelihood: float
    bic_prime: float
    responsibilities: np.ndarray  # unsupervised points, in unsup_idx order
    hard_labels: np.ndarray  # all points, 1..K
    pi_free: bool
    n_iter: int = 0
    converged: bool = True


def _log_gauss(X, mean, cov):
    """Row-wise multivariate normal log density."""
    d = X.shape[1]
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"covariance not positive definite: {exc}") from exc
    dev = solve_triangular(L, (X - mean).T, lower=True)
    return -0.5 * (
        d * np.log(2.0 * np.pi)
        + 2.0 * np.sum(np.log(np.diagonal(L)))
        + np.sum(dev * dev, axis=0)
    )


def _covariance_mstep(name, scatters, weights_per_cluster, d):
    """Structure-constrained covariance update from per-cluster scatter
    matrices (sum of weighted outer products around the cluster mean)."""
    K = len(scatters)
    W = np.asarray(scatters)
    Nk = np.asarray(weights_per_cluster, dtype=np.float64)
    N = Nk.sum()
    covs = np.empty((K, d, d))
    if name == "EII":
        lam = np.trace(W.sum(axis=0)) / (N * d)
        covs[:] = lam * np.eye(d)
    elif name == "VII":
        for k in range(K):
            covs[k] = (np.trace(W[k]) / (Nk[k] * d)) * np.eye(d)
    elif name == "EEI":
        diag = np.einsum("kii->i", W) / N
        covs[:] = np.diag(diag)
    elif name == "VVI":
        for k in range(K):
            covs[k] = np.diag(np.diagonal(W[k]) / Nk[k])
    elif name == "EEE":
        covs[:] = W.sum(axis=0) / N
    elif name == "VVV":
        for k in range(K):
            covs[k] = W[k] / Nk[k]
    elif name == "EEV":
        # shared eigenvalue profile, per-cluster orientations
        omegas = np.empty((K, d))
        bases = np.empty((K, d, d))
        for k in range(K):
            vals, vecs = np.linalg.eigh(W[k])
            order = np.argsort(vals)[::-1]
            omegas[k] = vals[order]
            bases[k] = vecs[:, order]
        shared = np.maximum(omegas.sum(axis=0), 0.0) / N
        for k in range(K):
            covs[k] = (bases[k] * shared) @ bases[k].T
    else:  # pragma: no cover - guarded by check_model_name
        raise ValidationError(f"unknown covariance model {name!r}")
    return covs


def _regularize(covs):
    """Ridge each covariance; report clusters that stay near-singular."""
    K, d, _ = covs.shape
    for k in range(K):
        tr = np.trace(covs[k])
        covs[k] = covs[k] + (_RIDGE_EPS * max(tr, _RIDGE_EPS) / d) * np.eye(d)
        min_eig = np.linalg.eigvalsh(covs[k])[0]
        if min_eig < _COLLAPSE_EIG:
            raise NumericalError(
                f"covariance of cluster {k + 1} collapsed "
                f"(smallest eigenvalue {min_eig:.3e})"
            )
    return covs


def ss_kmeanspp_init(X, seed_idx, seed_labels, K, rng):
    """Hard initial labels: seed classes keep their labels and centroids;
    remaining centers come from D^2-weighted k-means++ among unsupervised
    points; Lloyd iterations reassign unsupervised points only."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    seed_idx = np.asarray(seed_idx, dtype=np.int64)
    seed_labels = np.asarray(seed_labels, dtype=np.int64)
    classes = np.unique(seed_labels) if seed_idx.size else np.empty(0, np.int64)
    if classes.size > K:
        raise ValidationError(
            f"K={K} is smaller than the {classes.size} observed seed classes"
        )
    unsup_mask = np.ones(n, dtype=bool)
    unsup_mask[seed_idx] = False
    unsup_idx = np.flatnonzero(unsup_mask)
    if unsup_idx.size == 0:
        labels = np.zeros(n, dtype=np.int64)
        labels[seed_idx] = seed_labels
        return labels

    centers = np.zeros((K, X.shape[1]))
    have = np.zeros(K, dtype=bool)
    for c in classes:
        centers[c - 1] = X[seed_idx[seed_labels == c]].mean(axis=0)
        have[c - 1] = True
    # k-means++ seeding for the remaining components
    Xu = X[unsup_idx]
    for slot in np.flatnonzero(~have):
        if not have.any():
            pick = rng.integers(0, Xu.shape[0])
        else:
            d2 = np.min(
                ((Xu[:, None, :] - centers[have][None, :, :]) ** 2).sum(-1), axis=1
            )
            total = d2.sum()
            if total <= 0:
                pick = rng.integers(0, Xu.shape[0])
            else:
                pick = rng.choice(Xu.shape[0], p=d2 / total)
        centers[slot] = Xu[pick]
        have[slot] = True

    assign = np.full(unsup_idx.size, -1, dtype=np.int64)
    for _ in range(100):
        d2 = ((Xu[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        new_assign = np.argmin(d2, axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for k in range(K):
            pts = [Xu[assign == k]]
            if seed_idx.size:
                pts.append(X[seed_idx[seed_labels == k + 1]])
            pts = np.concatenate([p for p in pts if p.size], axis=0) \
                if any(p.size for p in pts) else np.empty((0, X.shape[1]))
            if pts.shape[0]:
                centers[k] = pts.mean(axis=0)
            else:
                # empty component: restart it at the farthest unsupervised point
                far = np.argmax(np.min(d2, axis=1))
                centers[k] = Xu[far]

    labels = np.zeros(n, dtype=np.int64)
    labels[seed_idx] = seed_labels
    labels[unsup_idx] = assign + 1
    return labels


def seed_discriminant_init(X, seed_idx, seed_labels, K):
    """Hard initial labels from a per-class Gaussian discriminant whose
    parameters come from the seeds alone. Needs >= 2 seeds in every class;
    class covariances are ridged against rank deficiency."""
    X = np.asarray(X, dtype=np.float64)
    seed_idx = np.asarray(seed_idx, dtype=np.int64)
    seed_labels = np.asarray(seed_labels, dtype=np.int64)
    d = X.shape[1]
    logf = np.empty((X.shape[0], K))
    for k in range(1, K + 1):
        pts = X[seed_idx[seed_labels == k]]
        if pts.shape[0] < 2:
            raise ValidationError(
                f"class {k} has {pts.shape[0]} seed(s); discriminant "
                "initialization needs at least 2 per class"
            )
        cov = np.cov(pts.T).reshape(d, d)
        cov += (1e-6 * max(np.trace(cov) / d, 1e-6)) * np.eye(d)
        logf[:, k - 1] = _log_gauss(X, pts.mean(axis=0), cov)
    labels = np.argmax(logf, axis=1) + 1
    labels[seed_idx] = seed_labels
    return labels


def em_fit(
    X,
    seed_idx,
    seed_labels,
    K,
    cov_model,
    block_sizes=None,
    init_labels=None,
    tol=1e-6,
    max_iter=500,
    quasi_idx=None,
    rng=None,
):
    """Fit the seeded mixture by EM under a structured covariance model.

    ``quasi_idx`` lists points known only to be outside component 1; their
    responsibilities range over components 2..K with renormalized weights.
    With ``block_sizes`` given (length K), mixing weights are fixed to
    n_k / n instead of being estimated.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    cov_model = check_model_name(cov_model)
    seed_idx = np.asarray(seed_idx, dtype=np.int64)
    seed_labels = np.asarray(seed_labels, dtype=np.int64)
    quasi_idx = (
        np.asarray(quasi_idx, dtype=np.int64)
        if quasi_idx is not None
        else np.empty(0, np.int64)
    )
    if np.intersect1d(seed_idx, quasi_idx).size:
        raise ValidationError("a point cannot be both seeded and quasi-seeded")
    if seed_idx.size and (seed_labels.min() < 1 or seed_labels.max() > K):
        raise ValidationError("seed labels out of range for K")

    sup_mask = np.zeros(n, dtype=bool)
    sup_mask[seed_idx] = True
    quasi_mask = np.zeros(n, dtype=bool)
    quasi_mask[quasi_idx] = True
    unsup_idx = np.flatnonzero(~sup_mask & ~quasi_mask)
    n_free = unsup_idx.size + quasi_idx.size
    if n_free == 0:
        raise ValidationError("no unsupervised points to cluster")

    pi_free = block_sizes is None
    if not pi_free:
        block_sizes = np.asarray(block_sizes, dtype=np.float64)
        if block_sizes.size != K:
            raise ValidationError("block_sizes must have length K")
        pi_fixed = block_sizes / block_sizes.sum()

    if rng is None:
        rng = np.random.default_rng(0)
    if init_labels is None:
        init_labels = ss_kmeanspp_init(X, seed_idx, seed_labels, K, rng)
    init_labels = np.asarray(init_labels, dtype=np.int64)
    if seed_idx.size and not np.array_equal(init_labels[seed_idx], seed_labels):
        raise ValidationError("initial labels disagree with seed labels")
    if quasi_idx.size and np.any(init_labels[quasi_idx] == 1):
        raise ValidationError("initial labels place a quasi-seed in component 1")

    # responsibilities: rows = all points; supervised rows stay one-hot
    resp = np.zeros((n, K))
    resp[np.arange(n), init_labels - 1] = 1.0

    pi = pi_fixed.copy() if not pi_free else np.full(K, 1.0 / K)
    means = np.zeros((K, d))
    covs = np.tile(np.eye(d), (K, 1, 1))
    prev_obs_ll = -np.inf
    obs_ll = -np.inf
    reinit_counts = np.zeros(K, dtype=np.int64)
    n_iter = 0
    converged = False

    for n_iter in range(1, max_iter + 1):
        # M-step
        Nk = resp.sum(axis=0)
        reinit_this_iter = False
        for k in np.flatnonzero(Nk < _EMPTY_WEIGHT):
            reinit_counts[k] += 1
            if reinit_counts[k] > 1:
                raise NumericalError(f"cluster {k + 1} emptied twice; fit failed")
            worst = unsup_idx[np.argmin(resp[unsup_idx].max(axis=1))]
            resp[worst] = 0.0
            resp[worst, k] = 1.0
            Nk = resp.sum(axis=0)
            reinit_this_iter = True
        means = (resp.T @ X) / Nk[:, None]
        scatters = np.empty((K, d, d))
        for k in range(K):
            dev = X - means[k]
            scatters[k] = (resp[:, k][:, None] * dev).T @ dev
        covs = _regularize(_covariance_mstep(cov_model, scatters, Nk, d))
        if pi_free:
            a = resp[unsup_idx].sum(axis=0)
            b = resp[quasi_idx].sum(axis=0) if quasi_idx.size else np.zeros(K)
            pi1 = a[0] / a.sum()
            pi = np.empty(K)
            pi[0] = pi1
            rest = a[1:] + b[1:]
            rest_total = rest.sum()
            if rest_total > 0:
                pi[1:] = (1.0 - pi1) * rest / rest_total
            else:
                pi[1:] = (1.0 - pi1) / max(K - 1, 1)
        else:
            pi = pi_fixed.copy()

        # E-step
        logf = np.column_stack([_log_gauss(X, means[k], covs[k]) for k in range(K)])
        logpi = np.log(np.maximum(pi, 1e-300))
        work = logf[unsup_idx] + logpi
        shift = work.max(axis=1, keepdims=True)
        lse_u = shift[:, 0] + np.log(np.exp(work - shift).sum(axis=1))
        resp[unsup_idx] = np.exp(work - shift)
        resp[unsup_idx] /= resp[unsup_idx].sum(axis=1, keepdims=True)

        obs_ll = float(lse_u.sum())
        if quasi_idx.size:
            logpi_q = logpi[1:] - np.log(max(1.0 - pi[0], 1e-300))
            work_q = logf[quasi_idx][:, 1:] + logpi_q
            shift_q = work_q.max(axis=1, keepdims=True)
            lse_q = shift_q[:, 0] + np.log(np.exp(work_q - shift_q).sum(axis=1))
            rq = np.exp(work_q - shift_q)
            rq /= rq.sum(axis=1, keepdims=True)
            resp[quasi_idx, 0] = 0.0
            resp[np.ix_(quasi_idx, np.arange(1, K))] = rq
            obs_ll += float(lse_q.sum())
        if seed_idx.size:
            obs_ll += float(logf[seed_idx, seed_labels - 1].sum())

        if not reinit_this_iter and obs_ll < prev_obs_ll - 1e-9 * max(
            1.0, abs(prev_obs_ll)
        ):
            raise NumericalError(
                f"EM log-likelihood decreased: {prev_obs_ll} -> {obs_ll}"
            )
        if np.isfinite(prev_obs_ll) and abs(obs_ll - prev_obs_ll) <= tol * max(
            1.0, abs(prev_obs_ll)
        ):
            converged = True
            break
        prev_obs_ll = obs_ll

    # hard labels and complete-data log-likelihood
    hard = np.argmax(resp, axis=1) + 1
    if seed_idx.size:
        hard[seed_idx] = seed_labels
    logf = np.column_stack([_log_gauss(X, means[k], covs[k]) for k in range(K)])
    logpi = np.log(np.maximum(pi, 1e-300))
    comp_ll = 0.0
    if seed_idx.size:
        comp_ll += float(logf[seed_idx, seed_labels - 1].sum())
    if quasi_idx.size:
        kq = hard[quasi_idx] - 1
        comp_ll += float(
            (logf[quasi_idx, kq] + logpi[kq]
             - np.log(max(1.0 - pi[0], 1e-300))).sum()
        )
    ku = hard[unsup_idx] - 1
    comp_ll += float((logf[unsup_idx, ku] + logpi[ku]).sum())

    # Model selection scores the maximized observed-data likelihood; the
    # complete-data value at hard labels carries an extra -sum log pi term
    # that any K >= 2 pays and K = 1 does not, which would degenerately
    # steer selection toward a single component.
    tau = model_param_count(cov_model, K, d, pi_free)
    bic = bic_prime_value(obs_ll, tau, n, n - n_free)

    return GmmFit(
        K=K,
        cov_model=cov_model,
        weights=pi,
        means=means,
        covariances=covs,
        log_likelihood=comp_ll,
        observed_log_likelihood=obs_ll,
        bic_prime=bic,
        responsibilities=resp[unsup_idx].copy(),
        hard_labels=hard,
        pi_free=pi_free,
        n_iter=n_iter,
        converged=converged,
    )


def quasi_seed_em_fit(X, s1_idx, not1_idx, K, cov_model, **kwargs):
    """em_fit variant where ``not1_idx`` points are known only to be
    outside component 1."""
    s1_idx = np.asarray(s1_idx, dtype=np.int64)
    return em_fit(
        X,
        seed_idx=s1_idx,
        seed_labels=np.ones(s1_idx.size, dtype=np.int64),
        K=K,
        cov_model=cov_model,
        quasi_idx=not1_idx,
        **kwargs,
    )


def bic_prime_value(log_lik, tau, n, m) -> float:
    """2 * maximized log-likelihood - tau * log(n - m): the usual BIC with
    the complexity penalty counting only the unsupervised points."""
    if n <= m:
        raise ValidationError("BIC' needs at least one unsupervised point")
    return 2.0 * log_lik - tau * np.log(n - m)


def bic_prime(model: GmmFit, n: int, m: int) -> float:
    return bic_prime_value(model.observed_log_likelihood,
                           model_param_count(model.cov_model, model.K,
                                             model.means.shape[1],
                                             model.pi_free),
                           n, m)


def select_model(
    X,
    seed_idx,
    seed_labels,
    max_K,
    catalogue=IMPLEMENTED_MODELS,
    block_sizes=None,
    rng=None,
    tol=1e-6,
    max_iter=500,
    quasi_idx=None,
) -> GmmFit:
    """Fit every (K <= max_K, covariance model) candidate and return the
    BIC'-argmax. Ties prefer fewer parameters, then smaller K, then
    catalogue order. Failed fits are skipped with a warning."""
    if not catalogue:
        raise ValidationError("empty model catalogue")
    catalogue = [check_model_name(m) for m in catalogue]
    seed_labels = np.asarray(seed_labels, dtype=np.int64)
    min_K = max(1, int(np.unique(seed_labels).size) if seed_labels.size else 1)
    if quasi_idx is not None and len(quasi_idx) and min_K < 2:
        min_K = 2
    if max_K < min_K:
        raise ValidationError(f"max_K={max_K} below minimum feasible K={min_K}")
    if rng is None:
        rng = np.random.default_rng(0)

    d = np.asarray(X).shape[1]
    best = None
    best_key = None
    for K in range(min_K, max_K + 1):
        no_quasi = quasi_idx is None or len(quasi_idx) == 0
        if no_quasi and seed_labels.size and np.all(
            np.bincount(seed_labels, minlength=K + 1)[1:] >= 2
        ):
            # every component is seeded: start from the seed-informed
            # discriminant, which anchors each component to its seed class
            inits = [seed_discriminant_init(X, seed_idx, seed_labels, K)]
        else:
            inits = [ss_kmeanspp_init(X, seed_idx, seed_labels, K, rng)]
        if not no_quasi:
            for init in inits:
                bad = np.asarray(quasi_idx)[init[np.asarray(quasi_idx)] == 1]
                if bad.size and K >= 2:
                    init[bad] = 2
        for order, name in enumerate(catalogue):
            bs = None
            if block_sizes is not None and len(block_sizes) == K:
                bs = block_sizes
            for init in inits:
                try:
                    fit = em_fit(
                        X, seed_idx, seed_labels, K, name,
                        block_sizes=bs, init_labels=init,
                        tol=tol, max_iter=max_iter, quasi_idx=quasi_idx, rng=rng,
                    )
                except NumericalError as exc:
                    warnings.warn(f"fit K={K} model={name} failed: {exc}")
                    continue
                tau = model_param_count(name, K, d, fit.pi_free)
                key = (-fit.bic_prime, tau, K, order)
                if best is None or key < best_key:
                    best, best_key = fit, key
    if best is None:
        raise NumericalError("all candidate mixture fits failed")
    return best
