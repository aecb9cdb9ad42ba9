"""Config-driven sweeps over SBM sparsity: build M and M0, cluster, tabulate."""
from __future__ import annotations

import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import cooccurrence, mmatrix, spectral, walks
from .sbm import ModelError, block_assignment, build_block_model, sample_graph

CSV_HEADER = ("n,rho,K,kernel,alpha,t_L,t_U,l,b,mode,seed,regime,frob,"
              "frob_over_n,masked_pairs,err,kmeans_obj,ms")
KERNELS = ("deepwalk", "node2vec")


class ConfigError(ValueError):
    pass


# -- parameter rules ------------------------------------------------------------

_POWER = re.compile(r"^\s*([0-9.eE+-]+)\s*\*\s*n\s*\^\s*([0-9.eE+-]+)\s*$")
_OVER_N = re.compile(r"^\s*([0-9.eE+-]+)\s*/\s*n\s*$")


def parse_rule(text: str):
    """'0.3' (constant), 'c*n^g' (power law) or 'c/n'. Returns f(n) -> float."""
    text = text.strip()
    m = _POWER.match(text)
    if m:
        c, g = float(m.group(1)), float(m.group(2))
        return lambda n: c * n ** g
    m = _OVER_N.match(text)
    if m:
        c = float(m.group(1))
        return lambda n: c / n
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"cannot parse rule {text!r}") from None
    return lambda n: value


def compute_phi(t_lo: int) -> int:
    """Backtracking exponent: 0 for t_L = 2, floor(t_L / 2) beyond."""
    if t_lo < 2:
        raise ValueError("t_L must be at least 2")
    return 0 if t_lo == 2 else t_lo // 2


def polylog_power(kernel: str, t_lo: int, eta: float) -> float:
    """c0 = 4 + (t_L + 1) eta for DeepWalk and 4 + (t_L + 2) eta for node2vec."""
    return 4 + (t_lo + (2 if kernel == "node2vec" else 1)) * eta


def regime(kernel: str, n: int, rho: float, t_lo: int, t_hi: int, threshold: float) -> str:
    """Advisory label: 'recovery', 'failure' or 'intermediate'."""
    if rho <= 0:
        return "failure"
    stat = n ** (t_lo - 1) * rho ** t_lo
    if kernel == "deepwalk":
        stat /= (n * rho) ** compute_phi(t_lo)
    if stat > threshold:
        return "recovery"
    if n ** (t_hi - 1) * rho ** t_hi < 1 and n * rho > 1:
        return "failure"
    return "intermediate"


# -- config ----------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    n: list
    rho: list  # rule strings
    K: int = 2
    B0: list = field(default_factory=lambda: [[0.9, 0.3], [0.3, 0.9]])
    kernels: list = field(default_factory=lambda: ["deepwalk"])
    alpha: list = field(default_factory=lambda: ["1/n"])
    windows: dict = field(default_factory=dict)  # kernel -> (t_L, t_U)
    l: int = 10
    b: float = 1.0
    mode: str = "closed_form"
    r: int = 0
    mc_cap: int = 50_000_000
    seeds: list = field(default_factory=lambda: [0])
    restarts: int = 32
    eta: float = 1.0
    polylog: float | None = None  # overrides c0 when set
    timing: bool = False
    output: str = "results.csv"

    def window(self, kernel):
        return self.windows[kernel]

    def validate(self):
        if not self.n or not self.rho or not self.seeds:
            raise ConfigError("config needs at least one n, rho and seed")
        for k in self.kernels:
            if k not in KERNELS:
                raise ConfigError(f"unknown kernel {k!r}")
            t_lo, t_hi = self.window(k)
            if not 2 <= t_lo <= t_hi < self.l:
                raise ConfigError(f"infeasible window ({t_lo}, {t_hi}) for l={self.l}")
            if k == "node2vec" and t_lo < 3:
                raise ConfigError("node2vec runs need t_L >= 3")
        if self.mode not in ("closed_form", "monte_carlo"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "monte_carlo":
            if self.r < 1:
                raise ConfigError("monte_carlo mode needs r >= 1")
            if self.r * self.l > self.mc_cap:
                raise ConfigError(f"r*l = {self.r * self.l} exceeds mc_cap = {self.mc_cap}")
        B0 = np.asarray(self.B0)
        if B0.shape != (self.K, self.K):
            raise ConfigError(f"B0 must be {self.K}x{self.K}")
        return self


def _ints(values):
    out = []
    for v in values:
        for part in v.split():
            if ".." in part:
                a, c = part.split("..")
                out.extend(range(int(a), int(c) + 1))
            else:
                out.append(int(part))
    return out


def parse_config(text: str) -> ExperimentConfig:
    """Flat ``key = value`` lines; '#' starts a comment; repeated keys make lists.

    Keys: n, rho, K, B0 (rows split by ';'), kernel, alpha, t_L, t_U,
    <kernel>.t_L, <kernel>.t_U, l, b, mode, r, mc_cap, seed, restarts, eta,
    polylog, timing, output.
    """
    raw: dict[str, list[str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        raw.setdefault(key, []).append(value)

    def one(key, default=None, cast=str):
        if key not in raw:
            return default
        if len(raw[key]) > 1:
            raise ConfigError(f"key {key!r} may appear only once")
        return cast(raw[key][0])

    known = {"n", "rho", "K", "B0", "kernel", "alpha", "t_L", "t_U", "l", "b", "mode", "r",
             "mc_cap", "seed", "restarts", "eta", "polylog", "timing", "output"}
    known |= {f"{k}.{t}" for k in KERNELS for t in ("t_L", "t_U")}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")

    kernels = [k for v in raw.get("kernel", ["deepwalk"]) for k in v.split()]
    t_lo = one("t_L", 2, int)
    t_hi = one("t_U", t_lo, int)
    windows = {}
    for k in KERNELS:
        lo = one(f"{k}.t_L", t_lo, int)
        windows[k] = (lo, one(f"{k}.t_U", max(lo, t_hi), int))
    K = one("K", 2, int)
    B0 = one("B0", None)
    B0 = ([[float(x) for x in row.split()] for row in B0.split(";")] if B0
          else [[0.9 if a == c else 0.3 for c in range(K)] for a in range(K)])
    polylog = one("polylog", None, float)
    cfg = ExperimentConfig(
        n=_ints(raw.get("n", [])),
        rho=raw.get("rho", []),
        K=K,
        B0=B0,
        kernels=kernels,
        alpha=raw.get("alpha", ["1/n"]),
        windows=windows,
        l=one("l", 10, int),
        b=one("b", 1.0, float),
        mode=one("mode", "closed_form"),
        r=one("r", 0, int),
        mc_cap=one("mc_cap", 50_000_000, int),
        seeds=_ints(raw.get("seed", ["0"])),
        restarts=one("restarts", 32, int),
        eta=one("eta", 1.0, float),
        polylog=polylog,
        timing=one("timing", "false").lower() in ("1", "true", "yes", "on"),
        output=one("output", "results.csv"),
    )
    for rule in cfg.rho + cfg.alpha:
        parse_rule(rule)
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


# -- running ----------------------------------------------------------------------

@dataclass
class ResultRow:
    n: int
    rho: float
    K: int
    kernel: str
    alpha: float
    t_L: int
    t_U: int
    l: int
    b: float
    mode: str
    seed: int
    regime: str
    frob: float | None = None
    frob_over_n: float | None = None
    masked_pairs: int | None = None
    err: float | None = None
    kmeans_obj: float | None = None
    ms: float = 0.0


FIELDS = tuple(f.name for f in fields(ResultRow))
assert ",".join(FIELDS) == CSV_HEADER


def _graph_seed(seed, n, rho_idx):
    return int(np.random.SeedSequence([seed, n, rho_idx]).generate_state(1, np.uint64)[0])


def balanced_sizes(n: int, K: int) -> list:
    base, extra = divmod(n, K)
    return [base + (1 if r < extra else 0) for r in range(K)]


def _jobs(cfg, seed_offset):
    jobs = []
    for n in cfg.n:
        for ri, rho_rule in enumerate(cfg.rho):
            for kernel in cfg.kernels:
                alphas = cfg.alpha if kernel == "node2vec" else ["1"]
                for alpha_rule in alphas:
                    for seed in cfg.seeds:
                        jobs.append((n, ri, rho_rule, kernel, alpha_rule, seed + seed_offset))
    return jobs


def run_experiment(cfg: ExperimentConfig, threads: int = 1, seed_offset: int = 0) -> list:
    """One row per grid point and seed, in canonical grid order."""
    cfg.validate()
    m0_cache = {}

    def m0_for(model, assign, kernel, alpha, t_lo, t_hi):
        key = (model.n, model.rho, kernel, alpha)
        if key not in m0_cache:
            m0_cache[key] = mmatrix.noiseless_m0(model, assign, kernel, t_lo, t_hi, cfg.l,
                                                 cfg.b, alpha)
        return m0_cache[key]

    def job(spec):
        n, ri, rho_rule, kernel, alpha_rule, seed = spec
        start = time.perf_counter()
        rho = parse_rule(rho_rule)(n)
        alpha = parse_rule(alpha_rule)(n) if kernel == "node2vec" else 1.0
        t_lo, t_hi = cfg.window(kernel)
        power = cfg.polylog if cfg.polylog is not None else polylog_power(kernel, t_lo, cfg.eta)
        label = regime(kernel, n, rho, t_lo, t_hi, math.log(n) ** power)
        row = ResultRow(n, rho, cfg.K, kernel, alpha, t_lo, t_hi, cfg.l, cfg.b, cfg.mode,
                        seed, label)
        try:
            model = build_block_model(cfg.K, balanced_sizes(n, cfg.K), cfg.B0, rho)
            assign = block_assignment(model)
            graph = sample_graph(model, assign, _graph_seed(seed, n, ri))
            if graph.two_m == 0:
                raise ModelError("empty graph")
            M0 = m0_for(model, assign, kernel, alpha, t_lo, t_hi)
            if cfg.mode == "closed_form":
                M = mmatrix.graph_m(graph, kernel, t_lo, t_hi, cfg.l, cfg.b, alpha)
            else:
                if kernel == "deepwalk":
                    corpus = walks.deepwalk_walks(graph, cfg.r, cfg.l, seed)
                else:
                    corpus = walks.node2vec_walks(graph, cfg.r, cfg.l, alpha, 1.0, seed)
                C = cooccurrence.accumulate(corpus, t_lo, t_hi, n=n)
                M = mmatrix.empirical_m(C, cfg.b)
            frob = mmatrix.frobenius_distance(M, M0)
            _, res = spectral.spectral_communities(M, cfg.K, restarts=cfg.restarts, seed=seed,
                                                   truth=assign.labels)
            row.frob, row.frob_over_n = frob, frob / n
            row.masked_pairs = M.masked_pairs
            row.err, row.kmeans_obj = res.error_rate, res.objective
        except (ModelError, ValueError) as exc:
            row.regime = "error:" + re.sub(r"[^a-z0-9]+", "_", str(exc).lower()).strip("_")
        if cfg.timing:
            row.ms = round((time.perf_counter() - start) * 1e3, 3)
        return row

    specs = _jobs(cfg, seed_offset)
    # M0 is shared across seeds: fill the cache serially so workers only read it
    for spec in specs:
        n, ri, rho_rule, kernel, alpha_rule, _ = spec
        rho = parse_rule(rho_rule)(n)
        alpha = parse_rule(alpha_rule)(n) if kernel == "node2vec" else 1.0
        if rho <= 0:
            continue
        try:
            model = build_block_model(cfg.K, balanced_sizes(n, cfg.K), cfg.B0, rho)
            m0_for(model, block_assignment(model), kernel, alpha, *cfg.window(kernel))
        except (ModelError, ValueError):
            pass
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, specs))
    else:
        rows = [job(s) for s in specs]
    return rows


# -- output -----------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(rows, path) -> None:
    lines = [CSV_HEADER] + [",".join(_fmt(getattr(r, f)) for f in FIELDS) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> list:
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:] if line]


def _value(row, name):
    v = row[name] if isinstance(row, dict) else getattr(row, name)
    return None if v in ("", None) else float(v)


def emit_svg_scatter(rows, x_field: str, y_field: str, path, logx=False, logy=False,
                     width=480, height=360) -> None:
    """Deterministic standalone SVG scatter plot of two numeric CSV fields."""
    for name in (x_field, y_field):
        if name not in FIELDS:
            raise ValueError(f"unknown field {name!r}; valid fields: {', '.join(FIELDS)}")
    if not rows:
        raise ValueError("no rows to plot")
    pts = []
    for r in rows:
        x, y = _value(r, x_field), _value(r, y_field)
        if x is None or y is None or (logx and x <= 0) or (logy and y <= 0):
            continue
        pts.append((x, y))
    tx = math.log10 if logx else (lambda v: v)
    ty = math.log10 if logy else (lambda v: v)
    pad = 50
    xs = [tx(x) for x, _ in pts] or [0.0]
    ys = [ty(y) for _, y in pts] or [0.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return pad + (tx(v) - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (ty(v) - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">'
           f'{x_field}{" (log)" if logx else ""}</text>',
           f'<text x="14" y="{height / 2}" text-anchor="middle" font-size="12" '
           f'transform="rotate(-90 14 {height / 2})">{y_field}{" (log)" if logy else ""}</text>']
    for x, y in pts:
        out.append(f'<circle cx="{px(x):.3f}" cy="{py(y):.3f}" r="3" fill="steelblue" '
                   f'data-x="{x!r}" data-y="{y!r}"/>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def summarize(rows) -> dict:
    """Median error and Frobenius ratio per (n, rho, kernel)."""
    groups = {}
    for r in rows:
        if r.err is None:
            continue
        groups.setdefault((r.n, r.rho, r.kernel), []).append(r)
    return {k: dict(median_err=float(np.median([r.err for r in v])),
                    median_frob_over_n=float(np.median([r.frob_over_n for r in v])),
                    seeds=len(v))
            for k, v in groups.items()}


def rows_as_dicts(rows):
    return [asdict(r) for r in rows]
