"""Shifted-PMI matrices: empirical from counts, r -> infinity limit, and noiseless."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .sbm import ModelError, edge_probability_matrix


@dataclass(frozen=True, eq=False)
class MMatrix:
    entries: np.ndarray
    mask: np.ndarray  # True where the entry is forced to 0
    meta: dict = field(default_factory=dict)

    @property
    def masked_pairs(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True, eq=False)
class JointWindowTable:
    """joint[i, j] = sum_t (l - t) [Pr(w_1=i, w_1+t=j) + Pr(w_1=j, w_1+t=i)]."""

    joint: np.ndarray
    marginal: np.ndarray
    window: tuple
    l: int
    kind: str = "deepwalk"
    alpha: float = 1.0


def gamma(l: int, t_lo: int, t_hi: int) -> float:
    return (2 * l - t_lo - t_hi) * (t_hi - t_lo + 1) / 2


def _check_window(t_lo, t_hi, l):
    if not 1 <= t_lo <= t_hi:
        raise ValueError(f"invalid window [{t_lo}, {t_hi}]")
    if t_hi >= l:
        raise ValueError(f"t_U={t_hi} must be smaller than l={l}")


def _weights(weights, allow_isolated):
    W = np.asarray(weights, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError("weights must be a square matrix")
    if np.any(W < 0):
        raise ValueError("weights must be non-negative")
    if not np.allclose(W, W.T, rtol=0, atol=1e-12):
        raise ValueError("weights must be symmetric")
    rs = W.sum(axis=1)
    if not allow_isolated and np.any(rs == 0):
        raise ModelError("zero row sum in weights")
    if rs.sum() == 0:
        raise ModelError("all-zero weights")
    return W, rs


def _assemble(per_t, t_lo, t_hi, l):
    n = per_t[0].shape[0]
    joint = np.zeros((n, n))
    for t in range(t_lo, t_hi + 1):
        S = per_t[t - 1]
        joint += (l - t) * (S + S.T)
    return joint


def deepwalk_joint(weights, t_lo: int, t_hi: int, l: int,
                   allow_isolated: bool = False) -> JointWindowTable:
    """Window joint law of the simple walk on ``weights`` started at stationarity.

    The stationary vector is propagated through the transition operator in
    probability space; ``allow_isolated`` lets zero rows through as
    unreachable nodes.
    """
    _check_window(t_lo, t_hi, l)
    W, rs = _weights(weights, allow_isolated)
    total = rs.sum()
    inv = np.divide(1.0, rs, out=np.zeros_like(rs), where=rs > 0)
    T = W * inv[:, None]
    S = W / total  # Pr(w_1 = i, w_2 = j)
    per_t = [S]
    for _ in range(1, t_hi):
        S = S @ T
        per_t.append(S)
    return JointWindowTable(_assemble(per_t, t_lo, t_hi, l), rs / total, (t_lo, t_hi), l)


def node2vec_path_sums(weights, t_max: int, alpha: float, allow_isolated: bool = False,
                       threads: int = 1) -> np.ndarray:
    """Stack of t-step node2vec path sums, t = 1..t_max, shape (t_max, n, n).

    Each path i_0 .. i_t carries prod W / |W|, a factor 1 / (|W_v| - 1 + alpha)
    per interior node and alpha per backtrack (i_{l-2} = i_l). On a 0/1
    adjacency with beta = 1 these are exactly Pr(w_1 = i, w_{1+t} = j).
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    W, rs = _weights(weights, allow_isolated)
    live = rs > 0
    norm = rs - 1.0 + alpha
    if np.any(norm[live] <= 0):
        raise ModelError("zero normalizer |W_v| - 1 + alpha (dead end for alpha = 0)")
    scale = np.divide(1.0, norm, out=np.zeros_like(norm), where=live)
    sources = np.flatnonzero(live).astype(np.int64)
    W = np.ascontiguousarray(W)
    start = 1.0 / rs.sum()

    def job(src):
        return kernels.n2v_joint_kernel(W, scale, start, float(alpha), int(t_max), src)

    chunks = np.array_split(sources, max(1, min(threads, len(sources))))
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]
    n = W.shape[0]
    out = np.zeros((t_max, n, n))
    out[:, sources, :] = np.concatenate(parts, axis=1)
    return out


def node2vec_joint(weights, t_lo: int, t_hi: int, l: int, alpha: float,
                   allow_isolated: bool = False, threads: int = 1) -> JointWindowTable:
    _check_window(t_lo, t_hi, l)
    stack = node2vec_path_sums(weights, t_hi, alpha, allow_isolated, threads)
    rs = np.asarray(weights, dtype=float).sum(axis=1)
    return JointWindowTable(_assemble(list(stack), t_lo, t_hi, l), rs / rs.sum(),
                            (t_lo, t_hi), l, "node2vec", float(alpha))


def limit_m(table: JointWindowTable, b: float = 1.0) -> MMatrix:
    if b <= 0:
        raise ValueError("b must be positive")
    t_lo, t_hi = table.window
    pi = table.marginal
    denom = 2.0 * b * gamma(table.l, t_lo, t_hi) * np.outer(pi, pi)
    mask = ~((table.joint > 0) & (denom > 0))
    entries = np.zeros_like(table.joint)
    entries[~mask] = np.log(table.joint[~mask] / denom[~mask])
    meta = dict(kind=table.kind, window=table.window, l=table.l, b=b, alpha=table.alpha)
    return MMatrix(entries, mask, meta)


def empirical_m(C, b: float = 1.0) -> MMatrix:
    """log(C_ij |C| / (|C_i*| |C_*j|)) - log b, and 0 where C_ij = 0."""
    if b <= 0:
        raise ValueError("b must be positive")
    counts = np.asarray(getattr(C, "entries", C), dtype=float)
    total = counts.sum()
    if total == 0:
        raise ValueError("co-occurrence matrix is all zero")
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    mask = counts <= 0
    entries = np.zeros_like(counts)
    i, j = np.nonzero(~mask)
    entries[i, j] = np.log(counts[i, j] * total / (rows[i] * cols[j])) - np.log(b)
    meta = dict(kind="empirical", window=getattr(C, "window", None), b=b)
    return MMatrix(entries, mask, meta)


def noiseless_m0(model, assignment, kernel: str, t_lo: int, t_hi: int, l: int,
                 b: float = 1.0, alpha: float = 1.0, threads: int = 1) -> MMatrix:
    """M-matrix of the complete graph weighted by P (diagonal kept)."""
    if model.rho == 0:
        raise ModelError("rho = 0 gives an all-zero P")
    P = edge_probability_matrix(model, assignment)
    if kernel == "deepwalk":
        table = deepwalk_joint(P, t_lo, t_hi, l)
    elif kernel == "node2vec":
        table = node2vec_joint(P, t_lo, t_hi, l, alpha, threads=threads)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return limit_m(table, b)


def graph_m(graph, kernel: str, t_lo: int, t_hi: int, l: int, b: float = 1.0,
            alpha: float = 1.0, threads: int = 1) -> MMatrix:
    """Closed-form limit M for a sampled graph; isolated nodes end up masked."""
    A = graph.adjacency()
    if kernel == "deepwalk":
        table = deepwalk_joint(A, t_lo, t_hi, l, allow_isolated=True)
    elif kernel == "node2vec":
        table = node2vec_joint(A, t_lo, t_hi, l, alpha, allow_isolated=True, threads=threads)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return limit_m(table, b)


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def sgns_objective(C, F, Fp, b: float = 1.0) -> float:
    """sum_ij C_ij (log s(<f_i, f'_j>) + b E_{l ~ P_C} log s(-<f_i, f'_l>))."""
    counts = np.asarray(getattr(C, "entries", C), dtype=float)
    F = np.asarray(F, dtype=float)
    Fp = np.asarray(Fp, dtype=float)
    n = counts.shape[0]
    if F.shape[0] != n or Fp.shape[0] != n or F.shape[1] != Fp.shape[1]:
        raise ValueError("F and F' must both be n x d")
    if b <= 0:
        raise ValueError("b must be positive")
    S = F @ Fp.T
    p_c = counts.sum(axis=0) / counts.sum()
    pos = (counts * _log_sigmoid(S)).sum()
    neg = counts.sum(axis=1) @ (_log_sigmoid(-S) @ p_c)
    return float(pos + b * neg)


def frobenius_distance(M1, M2) -> float:
    a = np.asarray(getattr(M1, "entries", M1), dtype=float)
    c = np.asarray(getattr(M2, "entries", M2), dtype=float)
    if a.shape != c.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {c.shape}")
    return float(np.sqrt(((a - c) ** 2).sum()))


def write_matrix(M, path, mask_path=None) -> None:
    """``n n`` header, then rows of %.17g decimals; optional 0/1 mask file."""
    X = np.asarray(getattr(M, "entries", M), dtype=float)
    rows = [f"{X.shape[0]} {X.shape[1]}"] + [" ".join(f"{v:.17g}" for v in row) for row in X]
    Path(path).write_text("\n".join(rows) + "\n")
    if mask_path is not None:
        mask = np.asarray(M.mask, dtype=int)
        rows = [f"{mask.shape[0]} {mask.shape[1]}"] + [" ".join(map(str, row)) for row in mask]
        Path(mask_path).write_text("\n".join(rows) + "\n")


def read_matrix(path) -> np.ndarray:
    lines = Path(path).read_text().split("\n")
    n, m = map(int, lines[0].split())
    return np.array([[float(v) for v in line.split()] for line in lines[1:1 + n]]).reshape(n, m)
