"""Spectral community recovery: top-K eigenvectors, k-means, error rate."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import orthogonal_procrustes
from scipy.optimize import linear_sum_assignment

from .sbm import membership_matrix


@dataclass(frozen=True, eq=False)
class SpectralEmbedding:
    eigenvalues: np.ndarray  # descending |lambda|
    vectors: np.ndarray  # n x K, orthonormal columns


def top_k_eigen(M, K: int) -> SpectralEmbedding:
    """K eigenpairs of largest |lambda|.

    Ties go to the larger signed value, then the lower index. Each vector is
    flipped so that its first non-negligible coordinate is positive.
    """
    M = np.asarray(getattr(M, "entries", M), dtype=float)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix must be square")
    if not 1 <= K <= n:
        raise ValueError(f"K={K} must lie in [1, {n}]")
    scale = max(1.0, np.abs(M).max())
    if np.abs(M - M.T).max() > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    lam, vec = np.linalg.eigh((M + M.T) / 2)
    order = np.lexsort((np.arange(n), -lam, -np.abs(lam)))[:K]
    lam, vec = lam[order], vec[:, order].copy()
    for c in range(K):
        nz = np.flatnonzero(np.abs(vec[:, c]) > 1e-12)
        if len(nz) and vec[nz[0], c] < 0:
            vec[:, c] = -vec[:, c]
    return SpectralEmbedding(lam, vec)


@dataclass(frozen=True, eq=False)
class ClusterResult:
    labels: np.ndarray
    centers: np.ndarray
    objective: float
    repairs: int = 0
    history: tuple = ()
    restart: int = 0
    error_rate: float | None = None

    @property
    def membership(self) -> np.ndarray:
        return membership_matrix(self.labels, self.centers.shape[0])


def _sq_dists(X, C):
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _plusplus(X, K, rng):
    n = len(X)
    centers = [X[rng.integers(n)]]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for _ in range(1, K):
        total = d2.sum()
        idx = rng.integers(n) if total <= 0 else rng.choice(n, p=d2 / total)
        centers.append(X[idx])
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return np.array(centers, dtype=float)


def _lloyd(X, C, max_iters):
    n, K = len(X), len(C)
    labels = None
    repairs = 0
    history = []
    for _ in range(max_iters):
        D = _sq_dists(X, C)
        new = D.argmin(axis=1)
        if labels is not None:
            # keep the current label on ties so repaired clusters stay put
            tied = D[np.arange(n), labels] <= D[np.arange(n), new]
            new = np.where(tied, labels, new)
        for k in range(K):
            if not np.any(new == k):
                # empty cluster: move the point farthest from its center into it
                far = int(np.argmax(D[np.arange(n), new]))
                new[far] = k
                repairs += 1
        C = np.array([X[new == k].mean(axis=0) for k in range(K)])
        history.append(float(((X - C[new]) ** 2).sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
    return labels, C, history, repairs


def kmeans_cluster(rows, K: int, restarts: int = 32, max_iters: int = 300, seed: int = 0,
                   threads: int = 1) -> ClusterResult:
    """Best of ``restarts`` k-means++ seeded Lloyd runs (lowest cost, then index)."""
    X = np.asarray(getattr(rows, "vectors", rows), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = len(X)
    if K > n:
        raise ValueError(f"K={K} exceeds the number of points {n}")
    if restarts < 1:
        raise ValueError("need at least one restart")

    def run(rep):
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, rep])
        labels, C, hist, rep_count = _lloyd(X, _plusplus(X, K, rng), max_iters)
        return ClusterResult(labels, C, hist[-1], rep_count, tuple(hist), rep)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(rep) for rep in range(restarts)]
    return min(results, key=lambda res: (res.objective, res.restart))


def _labels(x):
    x = np.asarray(getattr(x, "labels", x))
    if x.ndim == 2:
        if np.any(x.sum(axis=1) != 1):
            raise ValueError("membership rows must contain exactly one 1")
        return x.argmax(axis=1)
    return x.astype(np.int64)


def misclassification_rate(predicted, truth) -> float:
    """Fraction of misclassified nodes under the best label permutation."""
    p, g = _labels(predicted), _labels(truth)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {g.shape}")
    if len(g) == 0:
        return 0.0
    K = int(max(p.max(), g.max())) + 1
    confusion = np.zeros((K, K), dtype=np.int64)
    np.add.at(confusion, (p, g), 1)
    r, c = linear_sum_assignment(confusion, maximize=True)
    return float(1.0 - confusion[r, c].sum() / len(g))


def spectral_communities(M, K: int, restarts: int = 32, seed: int = 0,
                         truth=None) -> tuple[SpectralEmbedding, ClusterResult]:
    emb = top_k_eigen(M, K)
    res = kmeans_cluster(emb.vectors, K, restarts=restarts, seed=seed)
    if truth is not None:
        res = ClusterResult(res.labels, res.centers, res.objective, res.repairs,
                            res.history, res.restart, misclassification_rate(res.labels, truth))
    return emb, res


@dataclass(frozen=True)
class GeometryReport:
    within_spread: float
    cross: dict = field(default_factory=dict)  # (r, s) -> (distance, expected, deviation)

    @property
    def max_cross_deviation(self) -> float:
        return max((abs(v[2]) for v in self.cross.values()), default=0.0)


def eigen_geometry_report(M0, assignment, K: int | None = None) -> GeometryReport:
    """Row geometry of the top-K eigenvectors against sqrt(1/n_r + 1/n_s)."""
    g = np.asarray(getattr(assignment, "labels", assignment))
    K = int(g.max()) + 1 if K is None else K
    V = top_k_eigen(M0, K).vectors
    spread = 0.0
    means = []
    for r in range(K):
        R = V[g == r]
        diff = np.sqrt(((R[:, None, :] - R[None, :, :]) ** 2).sum(axis=2))
        spread = max(spread, float(diff.max()))
        means.append(R.mean(axis=0))
    sizes = np.bincount(g, minlength=K)
    cross = {}
    for r in range(K):
        for s in range(r + 1, K):
            dist = float(np.linalg.norm(means[r] - means[s]))
            expected = float(np.sqrt(1 / sizes[r] + 1 / sizes[s]))
            cross[(r, s)] = (dist, expected, dist - expected)
    return GeometryReport(spread, cross)


def procrustes_distance(V, V0) -> float:
    """min over orthogonal O of ||V - V0 O||_F."""
    O, _ = orthogonal_procrustes(V0, V)
    return float(np.linalg.norm(V - V0 @ O))


def davis_kahan_bound(noise_frob: float, eigenvalues, K: int) -> float:
    return float(np.sqrt(8 * K) * noise_frob / np.min(np.abs(eigenvalues)))
