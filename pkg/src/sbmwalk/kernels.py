"""Hot inner loops, each in a numba form and a vectorised numpy form.

The public names at the bottom resolve to one or the other according to
``SBMWALK_DISABLE_NUMBA``. Walk and co-occurrence kernels return identical
output on both paths because they consume the same pre-drawn uniforms and
do the same floating-point work in the same order.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# -- walks -------------------------------------------------------------------

def _deepwalk_loop(indptr, indices, edge_src, u):
    r, l = u.shape
    two_m = len(indices)
    out = np.empty((r, l), dtype=np.int64)
    for m in range(r):
        e = min(int(u[m, 0] * two_m), two_m - 1)
        v = edge_src[e]
        out[m, 0] = v
        for k in range(1, l):
            d = indptr[v + 1] - indptr[v]
            v = indices[indptr[v] + min(int(u[m, k] * d), d - 1)]
            out[m, k] = v
    return out


def _deepwalk_vec(indptr, indices, edge_src, u):
    r, l = u.shape
    two_m = len(indices)
    out = np.empty((r, l), dtype=np.int64)
    e = np.minimum((u[:, 0] * two_m).astype(np.int64), two_m - 1)
    v = edge_src[e]
    out[:, 0] = v
    for k in range(1, l):
        d = indptr[v + 1] - indptr[v]
        v = indices[indptr[v] + np.minimum((u[:, k] * d).astype(np.int64), d - 1)]
        out[:, k] = v
    return out


def _is_edge(indptr, indices, a, b):
    lo = indptr[a]
    hi = indptr[a + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        x = indices[mid]
        if x == b:
            return True
        if x < b:
            lo = mid + 1
        else:
            hi = mid
    return False


_is_edge = njit(_is_edge)


def _node2vec_loop(indptr, indices, edge_src, u, alpha, beta):
    r, l = u.shape
    two_m = len(indices)
    out = np.empty((r, l), dtype=np.int64)
    dead_ends = 0
    for m in range(r):
        e = min(int(u[m, 0] * two_m), two_m - 1)
        prev = edge_src[e]
        cur = indices[e]
        out[m, 0] = prev
        out[m, 1] = cur
        for k in range(2, l):
            lo = indptr[cur]
            hi = indptr[cur + 1]
            total = 0.0
            for p in range(lo, hi):
                w = indices[p]
                if w == prev:
                    total += alpha
                elif _is_edge(indptr, indices, prev, w):
                    total += 1.0
                else:
                    total += beta
            if total == 0.0:
                dead_ends += 1
                nxt = prev
            else:
                target = u[m, k] * total
                acc = 0.0
                nxt = -1
                last = -1
                for p in range(lo, hi):
                    w = indices[p]
                    if w == prev:
                        wt = alpha
                    elif _is_edge(indptr, indices, prev, w):
                        wt = 1.0
                    else:
                        wt = beta
                    acc += wt
                    if wt > 0.0:
                        last = w
                    if acc > target:
                        nxt = w
                        break
                if nxt < 0:
                    nxt = last
            out[m, k] = nxt
            prev = cur
            cur = nxt
    return out, dead_ends


def _node2vec_vec(indptr, indices, edge_src, u, alpha, beta):
    r, l = u.shape
    n = len(indptr) - 1
    two_m = len(indices)
    deg = np.diff(indptr)
    width = int(deg.max())
    # padded neighbour table, -1 beyond the degree
    pad = np.full((n, width), -1, dtype=np.int64)
    col = np.arange(two_m) - indptr[edge_src]
    pad[edge_src, col] = indices
    keys = edge_src * n + indices  # sorted, since CSR rows are sorted

    out = np.empty((r, l), dtype=np.int64)
    e = np.minimum((u[:, 0] * two_m).astype(np.int64), two_m - 1)
    prev = edge_src[e]
    cur = indices[e]
    out[:, 0] = prev
    out[:, 1] = cur
    dead_ends = 0
    rows = np.arange(r)
    for k in range(2, l):
        nb = pad[cur]
        valid = nb >= 0
        q = prev[:, None] * n + nb
        pos = np.minimum(np.searchsorted(keys, q), two_m - 1)
        common = keys[pos] == q
        wt = np.where(nb == prev[:, None], alpha, np.where(common, 1.0, beta))
        wt = np.where(valid, wt, 0.0)
        acc = np.cumsum(wt, axis=1)
        total = acc[:, -1]
        hit = acc > (u[:, k] * total)[:, None]
        found = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        last = width - 1 - np.argmax((wt > 0.0)[:, ::-1], axis=1)
        nxt = nb[rows, np.where(found, first, last)]
        dead = total == 0.0
        dead_ends += int(dead.sum())
        nxt = np.where(dead, prev, nxt)
        out[:, k] = nxt
        prev, cur = cur, nxt
    return out, dead_ends


# -- co-occurrence -----------------------------------------------------------

def _pair_counts_loop(walks, n, t_lo, t_hi):
    r, l = walks.shape
    counts = np.zeros((n, n), dtype=np.int64)
    for m in range(r):
        for t in range(t_lo, t_hi + 1):
            for k in range(l - t):
                counts[walks[m, k], walks[m, k + t]] += 1
    return counts


def _pair_counts_vec(walks, n, t_lo, t_hi):
    l = walks.shape[1]
    flat = np.zeros(n * n, dtype=np.int64)
    for t in range(t_lo, t_hi + 1):
        key = walks[:, : l - t] * n + walks[:, t:]
        flat += np.bincount(key.ravel(), minlength=n * n)
    return flat.reshape(n, n)


# -- node2vec path sums --------------------------------------------------------

def _n2v_joint_loop(W, scale, start, alpha, t_max, sources):
    """For each source i: rows J[t-1, s, :] = sum over step weights of t-step paths.

    State is (previous, current). ``scale[v] = 1 / (|W_v| - 1 + alpha)``.
    """
    n = W.shape[0]
    q = 1.0 - alpha
    out = np.zeros((t_max, len(sources), n))
    X = np.zeros((n, n))
    Xn = np.zeros((n, n))
    Y = np.zeros(n)
    for s in range(len(sources)):
        i = sources[s]
        X[:, :] = 0.0
        for w in range(n):
            X[i, w] = W[i, w] * start
        for t in range(t_max):
            for w in range(n):
                acc = 0.0
                for v in range(n):
                    acc += X[v, w]
                Y[w] = acc
            for w in range(n):
                out[t, s, w] = Y[w]
            if t + 1 == t_max:
                break
            for v in range(n):
                cv = scale[v]
                for w in range(n):
                    Xn[v, w] = W[v, w] * cv * (Y[v] - q * X[w, v])
            X, Xn = Xn, X
    return out


def _n2v_joint_vec(W, scale, start, alpha, t_max, sources, batch=16):
    n = W.shape[0]
    q = 1.0 - alpha
    Wc = W * scale[:, None]
    out = np.zeros((t_max, len(sources), n))
    for b0 in range(0, len(sources), batch):
        src = np.asarray(sources[b0:b0 + batch])
        X = np.zeros((len(src), n, n))
        X[np.arange(len(src)), src, :] = W[src] * start
        for t in range(t_max):
            Y = X.sum(axis=1)
            out[t, b0:b0 + len(src)] = Y
            if t + 1 == t_max:
                break
            X = Wc[None] * (Y[:, :, None] - q * X.transpose(0, 2, 1))
    return out


deepwalk_loop = njit(_deepwalk_loop)
node2vec_loop = njit(_node2vec_loop)
pair_counts_loop = njit(_pair_counts_loop)
n2v_joint_loop = njit(_n2v_joint_loop)

if USE_NUMBA:
    deepwalk_kernel = deepwalk_loop
    node2vec_kernel = node2vec_loop
    pair_counts_kernel = pair_counts_loop
    n2v_joint_kernel = n2v_joint_loop
else:
    deepwalk_kernel = _deepwalk_vec
    node2vec_kernel = _node2vec_vec
    pair_counts_kernel = _pair_counts_vec
    n2v_joint_kernel = _n2v_joint_vec

numpy_kernels = {
    "deepwalk": _deepwalk_vec,
    "node2vec": _node2vec_vec,
    "pair_counts": _pair_counts_vec,
    "n2v_joint": _n2v_joint_vec,
}
numba_kernels = {
    "deepwalk": deepwalk_loop,
    "node2vec": node2vec_loop,
    "pair_counts": pair_counts_loop,
    "n2v_joint": n2v_joint_loop,
}
