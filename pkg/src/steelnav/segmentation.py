"""EM-GMM segmentation and neighbor-ratio model selection.

The cluster-count sweep scores each candidate count by
r = n_m / (n_m + n_s) + n_m / n_c, where n_m and n_s are the highest and
second-highest per-cluster neighbor counts; the count with the highest r
wins (ties go to the smaller count).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .boundary import Border, Boundary, are_neighbors, cluster_border, ncbe
from .errors import SingularCovariance, TooFewPoints

_DEFAULT_RESTARTS = 3
_COV_FLOOR_SCALE = 1e-6


@dataclass(frozen=True)
class GmmModel:
    k: int
    weights: np.ndarray  # (k,) simplex
    means: np.ndarray  # (k, 2)
    covariances: np.ndarray  # (k, 2, 2) SPD
    log_likelihood: float
    ll_history: tuple = ()  # per-iteration log-likelihood of the winning restart


@dataclass
class RatioRecord:
    n_c: int
    n_m: int
    n_s: int
    r: float

    def to_json(self):
        return {"n_c": self.n_c, "n_m": self.n_m, "n_s": self.n_s, "r": self.r}


@dataclass
class ClusterSet:
    points: np.ndarray  # (N, 2)
    labels: np.ndarray  # (N,) int in [0, n_c)
    n_c: int
    means: np.ndarray  # (k, 2) component means
    model: GmmModel | None = None
    boundaries: list[Boundary] | None = None
    borders: dict[tuple[int, int], Border] | None = None
    neighbor_matrix: np.ndarray | None = None  # (k, k) bool, false diagonal
    neighbor_counts: np.ndarray | None = None
    ratio_table: list[RatioRecord] = field(default_factory=list)
    seed: int | None = None

    def cluster_points(self, i: int) -> np.ndarray:
        return self.points[self.labels == i]

    def cluster_mean(self, i: int) -> np.ndarray:
        pts = self.cluster_points(i)
        return pts.mean(axis=0) if len(pts) else self.means[i]

    def to_json(self):
        return {
            "n_c": self.n_c,
            "labels": [int(v) for v in self.labels],
            "means": [[float(v) for v in m] for m in self.means],
            "ratio_table": [r.to_json() for r in self.ratio_table],
            "seed": self.seed,
        }


def _kmeanspp_means(points, k, rng):
    n = len(points)
    means = np.empty((k, 2))
    means[0] = points[rng.integers(n)]
    d2 = np.sum((points - means[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            means[i] = points[rng.integers(n)]
        else:
            means[i] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - means[i]) ** 2, axis=1))
    return means


def _log_gaussians(points, means, covariances):
    """(N, k) log-densities via per-component Cholesky factors."""
    n, k = len(points), len(means)
    out = np.empty((n, k))
    for j in range(k):
        try:
            chol = np.linalg.cholesky(covariances[j])
        except np.linalg.LinAlgError:
            raise SingularCovariance(f"component {j} covariance not SPD")
        diff = points - means[j]
        sol = np.linalg.solve(chol, diff.T)
        maha = np.sum(sol ** 2, axis=0)
        logdet = 2.0 * np.sum(np.log(np.diag(chol)))
        out[:, j] = -0.5 * (maha + logdet + 2.0 * np.log(2.0 * np.pi))
    return out


def _em_once(points, k, rng, max_iter, rel_tol, floor):
    n = len(points)
    means = _kmeanspp_means(points, k, rng)
    weights = np.full(k, 1.0 / k)
    iso = max(float(np.var(points, axis=0).mean()), floor)
    covariances = np.tile(np.eye(2) * iso, (k, 1, 1))

    history = []
    prev_ll = -np.inf
    for _ in range(max_iter):
        log_prob = _log_gaussians(points, means, covariances) + np.log(weights)
        log_norm = logsumexp(log_prob, axis=1)
        ll = float(log_norm.sum())
        history.append(ll)
        resp = np.exp(log_prob - log_norm[:, None])

        nk = resp.sum(axis=0)
        nk_safe = np.maximum(nk, 1e-300)
        weights = nk / n
        means = (resp.T @ points) / nk_safe[:, None]
        for j in range(k):
            diff = points - means[j]
            cov = (resp[:, j][:, None] * diff).T @ diff / nk_safe[j]
            covariances[j] = cov + floor * np.eye(2)

        if ll - prev_ll < rel_tol * max(abs(ll), 1.0) and np.isfinite(prev_ll):
            break
        prev_ll = ll
    return GmmModel(k, weights, means, covariances, history[-1], tuple(history))


def em_gmm_fit(points: np.ndarray, k: int, seed: int = 0, max_iter: int = 200,
               rel_tol: float = 1e-7, restarts: int = _DEFAULT_RESTARTS) -> GmmModel:
    """Full-covariance 2D EM with k-means++ seeding and restarts.

    Deterministic given `seed`; the best of `restarts` runs by final
    log-likelihood is returned.  Covariances carry a diagonal floor
    derived from the data scale, which keeps thin-bar fits from
    collapsing.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("points must have shape (N, 2)")
    if k < 1 or len(points) < k:
        raise TooFewPoints(f"need at least k={k} points, got {len(points)}")

    sample_cov = np.cov(points.T) if len(points) > 1 else np.zeros((2, 2))
    floor = max(_COV_FLOOR_SCALE * float(np.trace(np.atleast_2d(sample_cov))) / 2.0,
                1e-12)

    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        model = _em_once(points, k, rng, max_iter, rel_tol, floor)
        if best is None or model.log_likelihood > best.log_likelihood:
            best = model
    return best


def assign_clusters(model: GmmModel, points: np.ndarray) -> np.ndarray:
    """Hard labels by maximum posterior; ties break to the lowest index."""
    points = np.asarray(points, dtype=float)
    log_prob = _log_gaussians(points, model.means, model.covariances) \
        + np.log(np.maximum(model.weights, 1e-300))
    return np.argmax(log_prob, axis=1)


def _cluster_boundaries(points, labels, n_c, alpha_s):
    boundaries = []
    for i in range(n_c):
        cluster = points[labels == i]
        if len(cluster) == 0:
            boundaries.append(Boundary(np.zeros((0, 2)), np.zeros(2), alpha_s))
        else:
            boundaries.append(ncbe(cluster, alpha_s))
    return boundaries


def neighbor_stats(boundaries: list[Boundary], l_b: float, eps_border: float):
    """Pairwise borders, neighbor matrix, and the (n_m, n_s) statistics.

    n_s is the count of the second-ranked cluster and may equal n_m.
    """
    n_c = len(boundaries)
    matrix = np.zeros((n_c, n_c), dtype=bool)
    borders: dict[tuple[int, int], Border] = {}
    for i in range(n_c):
        for j in range(i + 1, n_c):
            border = cluster_border(boundaries[i], boundaries[j], eps_border, i, j)
            borders[(i, j)] = border
            if are_neighbors(border, l_b):
                matrix[i, j] = matrix[j, i] = True
    counts = matrix.sum(axis=1).astype(int)
    ranked = np.sort(counts)[::-1]
    n_m = int(ranked[0]) if n_c >= 1 else 0
    n_s = int(ranked[1]) if n_c >= 2 else 0
    return n_m, n_s, counts, matrix, borders


def cluster_ratio(n_m: int, n_s: int, n_c: int) -> float:
    """r = n_m/(n_m+n_s) + n_m/n_c, with the first term 0 when n_m = 0."""
    if n_c < 1:
        raise ValueError("n_c must be >= 1")
    if n_m < n_s or n_s < 0:
        raise ValueError("require n_m >= n_s >= 0")
    if n_m == 0:
        return 0.0
    return n_m / (n_m + n_s) + n_m / n_c


def segment_structure(points: np.ndarray, n_cmin: int, n_cmax: int,
                      l_b: float, eps_border: float, alpha_s: float,
                      seed: int = 0, max_iter: int = 200,
                      rel_tol: float = 1e-7,
                      restarts: int = _DEFAULT_RESTARTS) -> ClusterSet:
    """Sweep the cluster count, score each by the neighbor ratio, keep the best.

    Deterministic given (points, parameters, seed); each candidate count
    gets its own derived seed so the winning fit can be reproduced.
    """
    points = np.asarray(points, dtype=float)
    if n_cmin < 2 or n_cmax < n_cmin:
        raise ValueError("require n_cmax >= n_cmin >= 2")
    if len(points) < n_cmax:
        raise TooFewPoints(f"need >= {n_cmax} points, got {len(points)}")

    table = []
    best = None  # (r, n_c, model, labels, boundaries, counts, matrix, borders)
    for n_c in range(n_cmin, n_cmax + 1):
        child_seed = seed * 1009 + n_c
        model = em_gmm_fit(points, n_c, seed=child_seed, max_iter=max_iter,
                           rel_tol=rel_tol, restarts=restarts)
        labels = assign_clusters(model, points)
        boundaries = _cluster_boundaries(points, labels, n_c, alpha_s)
        n_m, n_s, counts, matrix, borders = neighbor_stats(boundaries, l_b, eps_border)
        r = cluster_ratio(n_m, n_s, n_c)
        table.append(RatioRecord(n_c, n_m, n_s, r))
        if best is None or r > best[0]:
            best = (r, n_c, model, labels, boundaries, counts, matrix, borders)

    _, n_o, model, labels, boundaries, counts, matrix, borders = best
    return ClusterSet(
        points=points,
        labels=labels,
        n_c=n_o,
        means=model.means,
        model=model,
        boundaries=boundaries,
        borders=borders,
        neighbor_matrix=matrix,
        neighbor_counts=counts,
        ratio_table=table,
        seed=seed,
    )
