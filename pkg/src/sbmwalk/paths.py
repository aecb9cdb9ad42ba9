"""Brute-force path enumeration for checking path-count moments on tiny SBMs.

Everything here is deliberately exponential and guarded by an enumeration
budget; it exists to validate the fast code, not to scale.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PathComposition:
    """Block labels b_0..b_t for paths from node i to node j."""

    b: tuple
    i: int
    j: int

    @property
    def t(self) -> int:
        return len(self.b) - 1


@dataclass(frozen=True)
class PathStats:
    y_b: float
    path_count: int
    expectation: float | None = None


def _labels(assignment):
    return np.asarray(getattr(assignment, "labels", assignment), dtype=np.int64)


def make_composition(assignment, b, i, j) -> PathComposition:
    g = _labels(assignment)
    b = tuple(int(x) for x in b)
    if len(b) < 2:
        raise ValueError("a composition needs t >= 1")
    if b[0] != g[i] or b[-1] != g[j]:
        raise ValueError("endpoint labels do not match the composition")
    return PathComposition(b, int(i), int(j))


def compositions(assignment, K: int, i: int, j: int, t: int):
    """All compositions of length-t paths from i to j."""
    g = _labels(assignment)
    for mid in itertools.product(range(K), repeat=t - 1):
        yield PathComposition((int(g[i]),) + mid + (int(g[j]),), int(i), int(j))


def path_count(assignment, comp: PathComposition) -> int:
    g = _labels(assignment)
    sizes = np.bincount(g, minlength=max(comp.b) + 1)
    return int(np.prod([sizes[x] for x in comp.b[1:-1]], dtype=np.int64))


def enumerate_paths(assignment, comp: PathComposition, budget: int = BUDGET):
    """Yield every (i_0, ..., i_t) with the composition's labels, lexicographically."""
    g = _labels(assignment)
    if comp.b[0] != g[comp.i] or comp.b[-1] != g[comp.j]:
        raise ValueError("endpoint labels do not match the composition")
    if path_count(assignment, comp) > budget:
        raise BudgetExceeded(f"more than {budget} paths")
    pools = [np.flatnonzero(g == x).tolist() for x in comp.b[1:-1]]
    for mid in itertools.product(*pools):
        yield (comp.i,) + mid + (comp.j,)


def backtrack_count(path) -> int:
    """Number of positions l in [2, t] with i_{l-2} == i_l."""
    return sum(1 for a, c in zip(path, path[2:]) if a == c)


def _adjacency(graph):
    return graph.adjacency() if hasattr(graph, "adjacency") else np.asarray(graph, dtype=float)


def y_b(graph, assignment, comp: PathComposition, alpha: float = 1.0,
        budget: int = BUDGET) -> PathStats:
    """sum over paths of prod A_{i_l i_{l+1}} * alpha ** backtracks."""
    A = _adjacency(graph)
    total = 0.0
    count = 0
    for p in enumerate_paths(assignment, comp, budget):
        count += 1
        x = 1.0
        for a, c in zip(p, p[1:]):
            x *= A[a, c]
            if x == 0.0:
                break
        if x:
            total += x * alpha ** backtrack_count(p)
    return PathStats(total, count)


def expected_y_b(P, assignment, comp: PathComposition, zero_diagonal: bool = True,
                 alpha: float = 1.0, budget: int = BUDGET) -> float:
    """Exact E Y_b: each path contributes the product of P over its distinct edges.

    A repeated edge is the same Bernoulli variable, so it enters once.
    """
    P = np.array(P, dtype=float)
    if zero_diagonal:
        np.fill_diagonal(P, 0.0)
    total = 0.0
    for p in enumerate_paths(assignment, comp, budget):
        edges = {(min(a, c), max(a, c)) for a, c in zip(p, p[1:])}
        x = 1.0
        for a, c in edges:
            x *= P[a, c]
        total += x * alpha ** backtrack_count(p)
    return total


def u_b_l_b(model, comp: PathComposition, k: int = 1) -> tuple[float, float]:
    """Upper and lower path-count terms; lower factors are floored at 0."""
    B = model.B
    sizes = model.block_sizes
    b, t = comp.b, comp.t
    upper = lower = 1.0
    for x in range(1, t):
        upper *= sizes[b[x]] * B[b[x - 1], b[x]]
        lower *= max(sizes[b[x]] - (k * (t - 1) + 1), 0) * B[b[x - 1], b[x]]
    upper *= B[b[t - 1], b[t]]
    lower *= B[b[t - 1], b[t]]
    return float(upper), float(lower)


def sample_adjacencies(P, samples: int, seed: int) -> np.ndarray:
    """Independent SBM adjacency draws, shape (samples, n, n)."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    rng = np.random.default_rng(seed)
    U = rng.random((samples, n, n))
    A = np.triu(U < P[None], 1).astype(np.float64)
    return A + A.transpose(0, 2, 1)


def monte_carlo_y_b(A_samples, assignment, t: int, alpha: float = 1.0) -> dict:
    """Per-sample Y_b for every (i, j, composition) of length t.

    Returns ``{(i, j, b): array of length samples}``.
    """
    g = _labels(assignment)
    n = len(g)
    mids = np.array(list(itertools.product(range(n), repeat=t - 1)), dtype=np.int64).reshape(-1, t - 1)
    keys = [tuple(g[m]) for m in mids]
    out = {}
    for i in range(n):
        for j in range(n):
            nodes = np.column_stack([np.full(len(mids), i), mids, np.full(len(mids), j)])
            vals = np.ones((A_samples.shape[0], len(mids)))
            for s in range(t):
                vals *= A_samples[:, nodes[:, s], nodes[:, s + 1]]
            back = np.array([backtrack_count(tuple(p)) for p in nodes])
            vals *= alpha ** back
            for col, key in enumerate(keys):
                b = (int(g[i]),) + tuple(int(x) for x in key) + (int(g[j]),)
                slot = out.setdefault((i, j, b), np.zeros(A_samples.shape[0]))
                slot += vals[:, col]
    return out
