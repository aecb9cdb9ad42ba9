"""DeepWalk and node2vec walk generation, plus the exact edge-state chain."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import kernels
from .sbm import Graph, ModelError

CHUNK = 4096


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    walks: np.ndarray  # (r, l) node ids
    kind: str
    r: int
    l: int
    seed: int
    alpha: float = 1.0
    beta: float = 1.0
    dead_ends: int = 0

    @property
    def params(self) -> dict:
        return dict(r=self.r, l=self.l, kind=self.kind, alpha=self.alpha,
                    beta=self.beta, seed=self.seed)


def _edge_src(graph: Graph) -> np.ndarray:
    return np.repeat(np.arange(graph.n, dtype=np.int64), graph.degrees)


def _check(graph, r, l):
    if graph.two_m == 0:
        raise ModelError("cannot walk on an edgeless graph")
    if l < 2:
        raise ModelError("walk length l must be >= 2")
    if r < 1:
        raise ModelError("need at least one walk")


def _uniforms(seed, c, size, l):
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, c]).random((size, l))


def _run_chunks(r, l, seed, threads, job):
    starts = list(range(0, r, CHUNK))

    def one(c):
        size = min(CHUNK, r - starts[c])
        return job(_uniforms(seed, c, size, l))

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(len(starts))))
    return [one(c) for c in range(len(starts))]


def deepwalk_walks(graph: Graph, r: int, l: int, seed: int, threads: int = 1) -> WalkCorpus:
    """Simple random walks started from the degree-proportional law.

    Walks are produced in fixed-size chunks, chunk ``c`` drawing its
    uniforms from the stream keyed by ``(seed, c)``; the thread count only
    changes scheduling.
    """
    _check(graph, r, l)
    src = _edge_src(graph)
    parts = _run_chunks(r, l, seed, threads,
                        lambda u: kernels.deepwalk_kernel(graph.indptr, graph.indices, src, u))
    return WalkCorpus(np.concatenate(parts), "deepwalk", r, l, int(seed))


def node2vec_walks(graph: Graph, r: int, l: int, alpha: float, beta: float, seed: int,
                   threads: int = 1) -> WalkCorpus:
    """Second-order walks with backtrack weight ``alpha`` and out weight ``beta``.

    The first pair is uniform over ordered edges. When every candidate weight
    is zero (alpha = 0 at a degree-one node) the walker steps back and the
    event is counted in ``dead_ends``.
    """
    _check(graph, r, l)
    if alpha < 0 or beta <= 0:
        raise ModelError("need alpha >= 0 and beta > 0")
    src = _edge_src(graph)
    parts = _run_chunks(
        r, l, seed, threads,
        lambda u: kernels.node2vec_kernel(graph.indptr, graph.indices, src, u,
                                          float(alpha), float(beta)))
    walks = np.concatenate([p[0] for p in parts])
    dead = sum(int(p[1]) for p in parts)
    return WalkCorpus(walks, "node2vec", r, l, int(seed), float(alpha), float(beta), dead)


@dataclass(frozen=True, eq=False)
class EdgeStateChain:
    """First-order chain on ordered edges; state k is the CSR entry (u, v)."""

    states: np.ndarray  # (2m, 2)
    transition: sp.csr_matrix
    initial: np.ndarray
    dead_end_states: int = 0


def edge_state_chain(graph: Graph, alpha: float = 1.0, beta: float = 1.0) -> EdgeStateChain:
    if graph.two_m == 0:
        raise ModelError("cannot build an edge chain on an edgeless graph")
    indptr, indices = graph.indptr, graph.indices
    src = _edge_src(graph)
    neigh = [set(graph.neighbors(v).tolist()) for v in range(graph.n)]
    rows, cols, vals = [], [], []
    dead = 0
    for e in range(graph.two_m):
        u, v = int(src[e]), int(indices[e])
        lo, hi = indptr[v], indptr[v + 1]
        targets = np.arange(lo, hi)
        nxt = indices[lo:hi]
        w = np.where(nxt == u, alpha, np.where([x in neigh[u] for x in nxt], 1.0, beta))
        total = w.sum()
        if total == 0.0:
            dead += 1
            back = lo + int(np.flatnonzero(nxt == u)[0])
            rows.append(e)
            cols.append(back)
            vals.append(1.0)
            continue
        rows.extend([e] * len(targets))
        cols.extend(targets.tolist())
        vals.extend((w / total).tolist())
    T = sp.csr_matrix((vals, (rows, cols)), shape=(graph.two_m, graph.two_m))
    initial = np.full(graph.two_m, 1.0 / graph.two_m)
    return EdgeStateChain(np.column_stack([src, indices]), T, initial, dead)


def evolve_edge_distribution(chain: EdgeStateChain, dist, steps: int) -> np.ndarray:
    """Push a row distribution ``steps`` times through the chain."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    dist = np.asarray(dist, dtype=float)
    if abs(dist.sum() - 1.0) > 1e-12:
        raise ValueError("input is not a probability vector")
    Tt = chain.transition.T.tocsr()
    for _ in range(steps):
        dist = Tt @ dist
    return dist


def write_corpus(corpus: WalkCorpus, path) -> None:
    """Binary export: little-endian uint32 header (r, l) then r*l uint32 ids."""
    header = np.array([corpus.r, corpus.l], dtype="<u4")
    Path(path).write_bytes(header.tobytes() + corpus.walks.astype("<u4").tobytes())


def read_walks(path) -> np.ndarray:
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<u4")
    r, l = int(raw[0]), int(raw[1])
    if len(raw) != 2 + r * l:
        raise ValueError("truncated walk file")
    return raw[2:].astype(np.int64).reshape(r, l)
