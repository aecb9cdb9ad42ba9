"""Command line entry point: ``sbmwalk run|plot|oracle-check``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiment, paths
from .sbm import block_assignment, build_block_model, edge_probability_matrix


def _cmd_run(args):
    cfg = experiment.load_config(args.config)
    rows = experiment.run_experiment(cfg, threads=args.threads, seed_offset=args.seed_offset)
    out = args.out or cfg.output
    experiment.emit_csv(rows, out)
    for (n, rho, kernel), s in sorted(experiment.summarize(rows).items()):
        print(f"n={n} rho={rho:.6g} {kernel}: median err={s['median_err']:.4f} "
              f"median frob/n={s['median_frob_over_n']:.4f} ({s['seeds']} seeds)")
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _cmd_plot(args):
    rows = experiment.read_csv(args.csv)
    experiment.emit_svg_scatter(rows, args.x, args.y, args.out, logx=args.logx, logy=args.logy)
    print(f"wrote {args.out}")
    return 0


ORACLE_MODELS = [
    (1, [6], [[1.0]], 0.7),
    (2, [4, 4], [[0.9, 0.5], [0.5, 0.9]], 1.0),
    (2, [3, 5], [[0.8, 0.4], [0.4, 0.7]], 0.9),
]


def oracle_check(samples: int = 10_000, seed: int = 0, models=ORACLE_MODELS,
                 ts=(2, 3), log=print) -> dict:
    """Validate path-count expectations on tiny SBMs.

    Checks, per model and path length: the lower and upper k=1 bounds against
    the exact expectation, Monte Carlo means within 4 standard errors, and that
    summing Y_b over compositions reproduces the walk count (A^t)_ij.
    Returns a dict of check name -> list of failure descriptions.
    """
    failures = {"lower": [], "upper": [], "monte_carlo": [], "walk_count": []}
    for mi, (K, sizes, B0, rho) in enumerate(models):
        model = build_block_model(K, sizes, B0, rho)
        assign = block_assignment(model)
        P = edge_probability_matrix(model, assign)
        A_samples = paths.sample_adjacencies(P, samples, seed + mi)
        n = model.n
        for t in ts:
            mc = paths.monte_carlo_y_b(A_samples, assign, t)
            A = A_samples[0]
            At = np.linalg.matrix_power(A, t)
            for i in range(n):
                for j in range(n):
                    walk_total = 0.0
                    for comp in paths.compositions(assign, K, i, j, t):
                        ey = paths.expected_y_b(P, assign, comp)
                        up, lo = paths.u_b_l_b(model, comp)
                        tag = f"model{mi} t={t} i={i} j={j} b={comp.b}"
                        if lo > ey:
                            failures["lower"].append(f"{tag}: L_b={lo:.6g} > E={ey:.6g}")
                        if ey > up:
                            failures["upper"].append(f"{tag}: E={ey:.6g} > U_b={up:.6g}")
                        vals = mc[(i, j, comp.b)]
                        se = vals.std(ddof=1) / np.sqrt(len(vals))
                        if abs(vals.mean() - ey) > 4 * se + 1e-12:
                            failures["monte_carlo"].append(
                                f"{tag}: mean={vals.mean():.6g} E={ey:.6g} se={se:.3g}")
                        walk_total += paths.y_b(A, assign, comp).y_b
                    if walk_total != At[i, j]:
                        failures["walk_count"].append(f"model{mi} t={t} i={i} j={j}")
    for name, bad in failures.items():
        log(f"{'PASS' if not bad else 'FAIL'} {name}: {len(bad)} violations")
        for line in bad[:5]:
            log(f"    {line}")
    return failures


def _cmd_oracle(args):
    failures = oracle_check(samples=args.samples, seed=args.seed)
    return 0 if not any(failures.values()) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="sbmwalk", description=__doc__)
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument("--seed-offset", type=int, default=0, help="added to every configured seed")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config and write CSV")
    run.add_argument("config")
    run.add_argument("--out", help="CSV path (overrides the config's output)")
    run.set_defaults(func=_cmd_run)

    plot = sub.add_parser("plot", help="scatter two CSV columns into an SVG")
    plot.add_argument("csv")
    plot.add_argument("--x", required=True)
    plot.add_argument("--y", required=True)
    plot.add_argument("--out", required=True)
    plot.add_argument("--logx", action="store_true")
    plot.add_argument("--logy", action="store_true")
    plot.set_defaults(func=_cmd_plot)

    oracle = sub.add_parser("oracle-check", help="validate path-count moments by enumeration")
    oracle.add_argument("--samples", type=int, default=10_000)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (experiment.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
