import math

import pytest
from hypothesis import given, settings, strategies as st

from sbmwalk import experiment
from sbmwalk.experiment import (
    CSV_HEADER, ConfigError, compute_phi, emit_csv, emit_svg_scatter, parse_config,
    parse_rule, polylog_power, read_csv, regime, run_experiment,
)

SMALL = """
n = 24 30 36
rho = 0.5
kernel = deepwalk node2vec
deepwalk.t_L = 2
node2vec.t_L = 3
seed = 0..4
restarts = 4
"""


def test_compute_phi():
    assert compute_phi(2) == 0
    assert compute_phi(3) == 1
    assert compute_phi(6) == 3
    with pytest.raises(ValueError):
        compute_phi(1)


def test_polylog_power():
    assert polylog_power("deepwalk", 2, 1.0) == 7
    assert polylog_power("node2vec", 3, 0.5) == 6.5


@settings(max_examples=100, deadline=None)
@given(n=st.integers(10, 10**5), log_rho=st.floats(-6, 0), t_lo=st.integers(2, 5),
       extra=st.integers(0, 2), thr=st.floats(0.1, 1e4))
def test_regime_arithmetic(n, log_rho, t_lo, extra, thr):
    rho = 10**log_rho
    t_hi = t_lo + extra
    phi = compute_phi(t_lo)
    dw = n ** (t_lo - 1) * rho**t_lo / (n * rho) ** phi
    n2v = n ** (t_lo - 1) * rho**t_lo
    fail = n ** (t_hi - 1) * rho**t_hi < 1 and n * rho > 1
    for kernel, stat in (("deepwalk", dw), ("node2vec", n2v)):
        label = regime(kernel, n, rho, t_lo, t_hi, thr)
        expected = "recovery" if stat > thr else ("failure" if fail else "intermediate")
        assert label == expected


def test_parse_rule():
    assert parse_rule("0.3")(100) == 0.3
    assert parse_rule("2*n^-0.5")(16) == 0.5
    assert parse_rule("1/n")(8) == 0.125
    with pytest.raises(ConfigError):
        parse_rule("n squared")


def test_parse_config_fields():
    cfg = parse_config(SMALL + "B0 = 0.8 0.2; 0.2 0.7\nalpha = 1/n\nalpha = 0.5\n")
    assert cfg.n == [24, 30, 36] and cfg.seeds == [0, 1, 2, 3, 4]
    assert cfg.window("deepwalk") == (2, 2) and cfg.window("node2vec") == (3, 3)
    assert cfg.B0 == [[0.8, 0.2], [0.2, 0.7]]
    assert cfg.alpha == ["1/n", "0.5"]
    assert cfg.mode == "closed_form" and not cfg.timing


@pytest.mark.parametrize("text, match", [
    ("n = 10\nrho = 0.5\ncolour = red\n", "unknown keys"),
    ("n = 10\nrho = 0.5\nt_L = 9\nl = 9\n", "infeasible window"),
    ("n = 10\nrho = 0.5\nt_L = 1\n", "infeasible window"),
    ("n = 10\nrho = 0.5\nkernel = node2vec\nt_L = 2\n", "t_L >= 3"),
    ("n = 10\nrho = 0.5\nmode = monte_carlo\nr = 100000\nmc_cap = 1000\n", "mc_cap"),
    ("n = 10\nrho = 0.5\nmode = monte_carlo\n", "r >= 1"),
    ("n = 10\nrho = 0.5\nkernel = line\n", "unknown kernel"),
    ("n = 10\nrho = 0.5\nK = 3\nB0 = 0.9 0.1; 0.1 0.9\n", "3x3"),
    ("n = 10\nrho = 0.5\nl = 8\nl = 9\n", "only once"),
    ("n = 10\njust words\n", "key = value"),
    ("rho = 0.5\n", "at least one"),
])
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_grid_cardinality_and_order():
    rows = run_experiment(parse_config(SMALL))
    assert len(rows) == 30
    keys = [(r.n, r.kernel, r.seed) for r in rows]
    assert keys == [(n, k, s) for n in (24, 30, 36) for k in ("deepwalk", "node2vec")
                    for s in range(5)]
    for r in rows:
        assert 0.0 <= r.err <= 1.0 and r.frob >= 0.0
        assert r.frob_over_n == pytest.approx(r.frob / r.n)
        assert r.ms == 0.0
        assert type(r.err) is float and type(r.kmeans_obj) is float
    assert rows[0].alpha == 1.0 and rows[-1].alpha == pytest.approx(1 / 36)


def test_rho_zero_gives_error_row():
    rows = run_experiment(parse_config("n = 20\nrho = 0\nrho = 0.5\nseed = 1\nrestarts = 2\n"))
    assert rows[0].regime == "error:empty_graph"
    assert rows[0].err is None and rows[0].frob is None
    assert not rows[1].regime.startswith("error")


def test_monte_carlo_mode_runs():
    cfg = parse_config("n = 24\nrho = 0.6\nmode = monte_carlo\nr = 20000\nseed = 3\n"
                       "restarts = 4\n")
    (row,) = run_experiment(cfg)
    assert row.mode == "monte_carlo" and row.err is not None and row.frob > 0


def test_csv_bytes_are_deterministic(tmp_path):
    cfg = parse_config(SMALL)
    emit_csv(run_experiment(cfg, threads=1), tmp_path / "a.csv")
    emit_csv(run_experiment(cfg, threads=4), tmp_path / "b.csv")
    emit_csv(run_experiment(parse_config(SMALL)), tmp_path / "c.csv")
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes() == (tmp_path / "c.csv").read_bytes()
    assert a.decode().splitlines()[0] == CSV_HEADER
    assert "np.float64" not in a.decode()


def test_seed_offset_shifts_seeds():
    cfg = parse_config("n = 20\nrho = 0.5\nseed = 0 1\nrestarts = 2\n")
    base = run_experiment(cfg)
    shifted = run_experiment(parse_config("n = 20\nrho = 0.5\nseed = 10 11\nrestarts = 2\n"))
    assert [r.seed for r in run_experiment(cfg, seed_offset=10)] == [10, 11]
    assert run_experiment(cfg, seed_offset=10)[0].frob == shifted[0].frob
    assert base[0].frob != shifted[0].frob


def test_timing_is_opt_in():
    (row,) = run_experiment(parse_config("n = 20\nrho = 0.5\nrestarts = 2\ntiming = true\n"))
    assert row.ms > 0


def test_empty_csv_is_header_only(tmp_path):
    emit_csv([], tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == CSV_HEADER + "\n"
    assert read_csv(tmp_path / "e.csv") == []


def test_svg_single_point(tmp_path):
    rows = run_experiment(parse_config("n = 20\nrho = 0.5\nrestarts = 2\n"))
    emit_csv(rows, tmp_path / "r.csv")
    emit_svg_scatter(read_csv(tmp_path / "r.csv"), "rho", "frob_over_n", tmp_path / "p.svg")
    svg = (tmp_path / "p.svg").read_text()
    assert svg.count("<circle") == 1
    assert f'data-x="{rows[0].rho!r}"' in svg and f'data-y="{rows[0].frob_over_n!r}"' in svg


def test_svg_unknown_field_lists_fields(tmp_path):
    with pytest.raises(ValueError, match="valid fields: n, rho, K"):
        emit_svg_scatter([{"n": "1"}], "frobb", "n", tmp_path / "p.svg")
    with pytest.raises(ValueError):
        emit_svg_scatter([], "n", "rho", tmp_path / "p.svg")


def test_summarize_medians():
    rows = run_experiment(parse_config(SMALL))
    s = experiment.summarize(rows)
    assert set(s) == {(n, 0.5, k) for n in (24, 30, 36) for k in ("deepwalk", "node2vec")}
    assert all(v["seeds"] == 5 for v in s.values())
