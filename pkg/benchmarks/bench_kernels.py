"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--walks 100000] [--n 300] [--repeat 3]

Each pair is first checked for identical output, then timed (best of
``--repeat``, after one warm-up call so JIT compilation is excluded).
If numba is disabled or missing, the "numba" column runs the plain
Python loops and will be very slow.
"""
import argparse
import time

import numpy as np

from sbmwalk import USE_NUMBA
from sbmwalk.kernels import numba_kernels, numpy_kernels
from sbmwalk.sbm import block_assignment, build_block_model, edge_probability_matrix, sample_graph


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "f":
        return np.allclose(a, b, rtol=1e-12, atol=0)
    return np.array_equal(a, b)


def cases(n, walks, l):
    model = build_block_model(2, [n // 2, n - n // 2], [[0.9, 0.3], [0.3, 0.9]], 20 / n)
    assign = block_assignment(model)
    g = sample_graph(model, assign, seed=0)
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    u = np.random.default_rng(1).random((walks, l))
    W = numpy_kernels["deepwalk"](g.indptr, g.indices, src, u)
    P = edge_probability_matrix(model, assign)
    rs = P.sum(axis=1)
    alpha = 1 / n
    return {
        "deepwalk": (g.indptr, g.indices, src, u),
        "node2vec": (g.indptr, g.indices, src, u, 0.5, 1.0),
        "pair_counts": (W, g.n, 2, 4),
        "n2v_joint": (P, 1 / (rs - 1 + alpha), 1 / rs.sum(), alpha, 3,
                      np.arange(n, dtype=np.int64)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--walks", type=int, default=100_000)
    ap.add_argument("--l", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"numba enabled: {USE_NUMBA}  n={args.n} walks={args.walks} l={args.l}")
    print(f"{'kernel':<12} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  match")
    for name, inputs in cases(args.n, args.walks, args.l).items():
        match = same(numba_kernels[name](*inputs), numpy_kernels[name](*inputs))
        t_jit = best_of(numba_kernels[name], inputs, args.repeat)
        t_np = best_of(numpy_kernels[name], inputs, args.repeat)
        print(f"{name:<12} {t_jit:>10.4f} {t_np:>10.4f} {t_np / t_jit:>8.1f}  {match}")


if __name__ == "__main__":
    main()
