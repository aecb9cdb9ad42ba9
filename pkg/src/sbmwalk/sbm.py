"""Stochastic block model: parameters, edge probabilities and graph sampling."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ModelError(ValueError):
    """Invalid block model, assignment or graph input."""


@dataclass(frozen=True)
class BlockModel:
    K: int
    block_sizes: tuple
    B0: np.ndarray
    rho: float

    @property
    def n(self) -> int:
        return int(sum(self.block_sizes))

    @property
    def B(self) -> np.ndarray:
        return self.rho * self.B0


def build_block_model(K, block_sizes, B0, rho) -> BlockModel:
    """Validate and freeze an SBM with density matrix ``B = rho * B0``."""
    K = int(K)
    if K < 1:
        raise ModelError("K must be positive")
    sizes = tuple(int(s) for s in block_sizes)
    if len(sizes) != K:
        raise ModelError(f"dimension mismatch: {len(sizes)} block sizes for K={K}")
    if any(s < 1 for s in sizes):
        raise ModelError("every block size must be >= 1")
    B0 = np.array(B0, dtype=float)
    if B0.shape != (K, K):
        raise ModelError(f"dimension mismatch: B0 has shape {B0.shape}, expected {(K, K)}")
    if np.any(B0 <= 0.0) or np.any(B0 > 1.0):
        raise ModelError("B0 entry out of range (0, 1]")
    if not np.array_equal(B0, B0.T):
        raise ModelError("B0 must be symmetric")
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ModelError("rho must lie in [0, 1]")
    if rho * B0.max() > 1.0:
        raise ModelError("rho * max(B0) exceeds 1")
    B0.setflags(write=False)
    return BlockModel(K=K, block_sizes=sizes, B0=B0, rho=rho)


@dataclass(frozen=True)
class CommunityAssignment:
    labels: np.ndarray

    @property
    def n(self) -> int:
        return len(self.labels)


def block_assignment(model: BlockModel) -> CommunityAssignment:
    """Nodes grouped by block, block 0 first."""
    labels = np.repeat(np.arange(model.K), model.block_sizes)
    labels.setflags(write=False)
    return CommunityAssignment(labels)


def make_assignment(model: BlockModel, labels) -> CommunityAssignment:
    labels = np.asarray(labels, dtype=np.int64).copy()
    _check_assignment(model, labels)
    labels.setflags(write=False)
    return CommunityAssignment(labels)


def _check_assignment(model, labels):
    if labels.ndim != 1 or len(labels) != model.n:
        raise ModelError(f"inconsistent assignment: expected {model.n} labels")
    if len(labels) and (labels.min() < 0 or labels.max() >= model.K):
        raise ModelError("inconsistent assignment: label out of range")
    counts = np.bincount(labels, minlength=model.K)
    if tuple(counts.tolist()) != model.block_sizes:
        raise ModelError("inconsistent assignment: label counts differ from block sizes")


def membership_matrix(labels, K: int) -> np.ndarray:
    """n x K 0/1 matrix with a single 1 per row."""
    labels = np.asarray(getattr(labels, "labels", labels), dtype=np.int64)
    if len(labels) and (labels.min() < 0 or labels.max() >= K):
        raise ModelError(f"label out of range for K={K}")
    theta = np.zeros((len(labels), K), dtype=np.int64)
    theta[np.arange(len(labels)), labels] = 1
    return theta


def edge_probability_matrix(model: BlockModel, assignment: CommunityAssignment) -> np.ndarray:
    """P = Theta B Theta^T, diagonal included."""
    _check_assignment(model, np.asarray(assignment.labels))
    g = np.asarray(assignment.labels)
    return model.B[np.ix_(g, g)]


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph in CSR form; neighbour lists sorted ascending."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray = field(init=False)
    two_m: int = field(init=False)

    def __post_init__(self):
        deg = np.diff(self.indptr).astype(np.int64)
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "two_m", int(deg.sum()))

    @property
    def m(self) -> int:
        return self.two_m // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), self.degrees)
        A[rows, self.indices] = 1.0
        return A

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges i < j in lexicographic order."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))


def graph_from_edges(n: int, edges) -> Graph:
    """Build a graph from an iterable of unordered pairs; duplicates collapse."""
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                   dtype=np.int64).reshape(-1, 2)
    if len(e) and (e.min() < 0 or e.max() >= n):
        raise ModelError("edge endpoint out of range")
    if np.any(e[:, 0] == e[:, 1]):
        raise ModelError("self-loops are not allowed")
    both = np.concatenate([e, e[:, ::-1]])
    keys = np.unique(both[:, 0] * n + both[:, 1])
    rows, cols = np.divmod(keys, n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return Graph(n, indptr, cols.astype(np.int64))


def graph_from_adjacency(A) -> Graph:
    A = np.asarray(A)
    if A.shape[0] != A.shape[1] or not np.array_equal(A, A.T):
        raise ModelError("adjacency must be square and symmetric")
    if np.any(np.diag(A) != 0):
        raise ModelError("self-loops are not allowed")
    i, j = np.nonzero(np.triu(A, 1))
    return graph_from_edges(A.shape[0], np.column_stack([i, j]))


def sample_graph(model: BlockModel, assignment: CommunityAssignment, seed: int) -> Graph:
    """Draw A_ij ~ Bernoulli(P_ij) for i < j, mirror, keep A_ii = 0.

    Row i uses its own stream seeded by ``(seed, i)``, so the result does not
    depend on evaluation order.
    """
    P = edge_probability_matrix(model, assignment)
    n = model.n
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    chunks = []
    for i in range(n - 1):
        u = np.random.default_rng([seed, i]).random(n - i - 1)
        j = np.flatnonzero(u < P[i, i + 1:]) + i + 1
        if len(j):
            chunks.append(np.column_stack([np.full(len(j), i), j]))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return graph_from_edges(n, edges)


def write_graph(graph: Graph, path) -> None:
    e = graph.edges()
    lines = [f"{graph.n} {len(e)}"] + [f"{i} {j}" for i, j in e]
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> Graph:
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise ModelError("graph file needs an 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    body = np.array(tokens[2:], dtype=np.int64)
    if len(body) != 2 * m:
        raise ModelError(f"graph file declares {m} edges but holds {len(body) // 2}")
    e = body.reshape(-1, 2)
    if np.any(e[:, 0] >= e[:, 1]):
        raise ModelError("edges must be written as 'i j' with i < j")
    return graph_from_edges(n, e)
