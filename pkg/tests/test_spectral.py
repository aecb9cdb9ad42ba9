import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sbmwalk.mmatrix import noiseless_m0
from sbmwalk.sbm import block_assignment, build_block_model
from sbmwalk.spectral import (
    davis_kahan_bound, eigen_geometry_report, kmeans_cluster, misclassification_rate,
    procrustes_distance, spectral_communities, top_k_eigen,
)


def test_top_k_examples():
    assert top_k_eigen(np.eye(2), 1).eigenvalues.tolist() == [1.0]
    assert top_k_eigen(np.diag([3.0, -5.0]), 1).eigenvalues.tolist() == [-5.0]
    emb = top_k_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)
    np.testing.assert_allclose(emb.eigenvalues, [1.0, -1.0], atol=1e-15)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(emb.vectors, [[s, s], [s, -s]], atol=1e-15)


def test_top_k_tie_break_prefers_positive():
    emb = top_k_eigen(np.diag([-2.0, 1.0, 2.0]), 2)
    assert emb.eigenvalues.tolist() == [2.0, -2.0]


def test_top_k_errors():
    with pytest.raises(ValueError):
        top_k_eigen(np.array([[0.0, 1.0], [0.5, 0.0]]), 1)
    with pytest.raises(ValueError):
        top_k_eigen(np.eye(2), 3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), K=st.integers(1, 5))
def test_top_k_is_an_eigendecomposition(seed, K):
    X = np.random.default_rng(seed).normal(size=(7, 7))
    M = X + X.T
    emb = top_k_eigen(M, K)
    V, lam = emb.vectors, emb.eigenvalues
    np.testing.assert_allclose(M @ V, V * lam, atol=1e-10)
    np.testing.assert_allclose(V.T @ V, np.eye(K), atol=1e-12)
    assert np.all(np.diff(np.abs(lam)) <= 1e-12)
    for c in range(K):
        first = V[np.flatnonzero(np.abs(V[:, c]) > 1e-12)[0], c]
        assert first > 0


def test_kmeans_point_masses():
    X = np.array([[0.0, 0.0]] * 4 + [[1.0, 2.0]] * 3)
    res = kmeans_cluster(X, 2, restarts=4)
    assert res.objective == 0.0
    assert misclassification_rate(res.labels, [0] * 4 + [1] * 3) == 0.0


def test_kmeans_identical_rows_repairs_once():
    res = kmeans_cluster(np.ones((6, 2)), 2, restarts=1)
    assert res.repairs == 1
    assert res.objective == 0.0
    assert sorted(np.bincount(res.labels).tolist()) == [1, 5]


def test_kmeans_on_noiseless_eigenvectors():
    m = build_block_model(3, [10, 12, 8], [[0.9, 0.3, 0.2], [0.3, 0.8, 0.25], [0.2, 0.25, 0.7]],
                          0.5)
    a = block_assignment(m)
    M0 = noiseless_m0(m, a, "deepwalk", 2, 3, 10)
    emb, res = spectral_communities(M0, 3, restarts=8, seed=1, truth=a.labels)
    assert res.objective <= 1e-16
    assert res.error_rate == 0.0
    assert res.membership.shape == (30, 3)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_kmeans_history_and_objective(seed):
    X = np.random.default_rng(seed).normal(size=(40, 2))
    res = kmeans_cluster(X, 3, restarts=3, seed=seed)
    assert all(b <= a + 1e-12 for a, b in zip(res.history, res.history[1:]))
    cost = sum(((X[res.labels == k] - res.centers[k]) ** 2).sum() for k in range(3))
    assert res.objective == pytest.approx(cost, rel=1e-12)
    again = kmeans_cluster(X, 3, restarts=3, seed=seed, threads=3)
    assert np.array_equal(again.labels, res.labels) and again.objective == res.objective


def test_kmeans_errors():
    with pytest.raises(ValueError):
        kmeans_cluster(np.zeros((2, 1)), 3)
    with pytest.raises(ValueError):
        kmeans_cluster(np.zeros((4, 1)), 2, restarts=0)


def test_misclassification_examples():
    truth = np.array([0, 0, 1, 1])
    assert misclassification_rate(truth, truth) == 0.0
    assert misclassification_rate(1 - truth, truth) == 0.0
    assert misclassification_rate([0, 1, 1, 1], truth) == 0.25
    assert misclassification_rate(np.eye(2)[[0, 1, 1, 1]], np.eye(2)[truth]) == 0.25
    with pytest.raises(ValueError):
        misclassification_rate([0, 1], truth)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=12), st.data())
def test_misclassification_matches_brute_force(truth, data):
    pred = data.draw(st.lists(st.integers(0, 3), min_size=len(truth), max_size=len(truth)))
    relabel = data.draw(st.permutations(range(4)))
    p, g = np.array(pred), np.array(truth)
    best = min(np.mean(np.array(perm)[p] != g) for perm in itertools.permutations(range(4)))
    rate = misclassification_rate(p, g)
    assert rate == pytest.approx(best, abs=1e-15)
    assert misclassification_rate(np.array(relabel)[p], g) == pytest.approx(rate, abs=1e-15)
    assert 0.0 <= rate <= 1.0


def test_geometry_balanced_two_blocks():
    m = build_block_model(2, [50, 50], [[0.9, 0.3], [0.3, 0.9]], 0.5)
    a = block_assignment(m)
    rep = eigen_geometry_report(noiseless_m0(m, a, "deepwalk", 3, 3, 10), a)
    assert rep.within_spread <= 1e-8
    dist, expected, dev = rep.cross[(0, 1)]
    assert expected == pytest.approx(0.2, abs=1e-15)
    assert abs(dev) <= 1e-8


def test_procrustes_recovers_rotation():
    rng = np.random.default_rng(0)
    V0, _ = np.linalg.qr(rng.normal(size=(10, 3)))
    O, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert procrustes_distance(V0 @ O, V0) <= 1e-12
    assert procrustes_distance(V0, V0) <= 1e-12


def test_davis_kahan_on_synthetic_noise():
    m = build_block_model(2, [20, 20], [[0.9, 0.3], [0.3, 0.9]], 0.5)
    M0 = noiseless_m0(m, block_assignment(m), "deepwalk", 2, 2, 10).entries
    emb0 = top_k_eigen(M0, 2)
    rng = np.random.default_rng(4)
    for scale in (1e-3, 1e-2, 1e-1):
        E = rng.normal(size=M0.shape)
        E = scale * (E + E.T)
        V = top_k_eigen(M0 + E, 2).vectors
        bound = davis_kahan_bound(np.linalg.norm(E), emb0.eigenvalues, 2)
        assert procrustes_distance(V, emb0.vectors) <= bound
