import subprocess
import sys

from sbmwalk import cli
from sbmwalk.experiment import CSV_HEADER


def _cfg(tmp_path, text):
    p = tmp_path / "exp.cfg"
    p.write_text(text)
    return p


def test_run_and_plot(tmp_path, capsys):
    cfg = _cfg(tmp_path, f"n = 20\nrho = 0.5\nseed = 0 1\nrestarts = 2\n"
                         f"output = {tmp_path / 'default.csv'}\n")
    assert cli.main(["--threads", "2", "run", str(cfg), "--out", str(tmp_path / "r.csv")]) == 0
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == CSV_HEADER
    assert "wrote 2 rows" in capsys.readouterr().out
    assert cli.main(["run", str(cfg)]) == 0
    assert (tmp_path / "default.csv").exists()
    svg = tmp_path / "p.svg"
    assert cli.main(["plot", str(tmp_path / "r.csv"), "--x", "seed", "--y", "frob",
                     "--out", str(svg), "--logy"]) == 0
    assert svg.read_text().count("<circle") == 2


def test_seed_offset_flag(tmp_path):
    cfg = _cfg(tmp_path, "n = 20\nrho = 0.5\nseed = 0\nrestarts = 2\n")
    cli.main(["--seed-offset", "5", "run", str(cfg), "--out", str(tmp_path / "r.csv")])
    assert (tmp_path / "r.csv").read_text().splitlines()[1].split(",")[10] == "5"


def test_errors_exit_nonzero(tmp_path, capsys):
    bad = _cfg(tmp_path, "n = 20\nrho = 0.5\nwidth = 3\n")
    assert cli.main(["run", str(bad)]) == 2
    assert "unknown keys" in capsys.readouterr().err
    assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 2
    (tmp_path / "r.csv").write_text(CSV_HEADER + "\n")
    assert cli.main(["plot", str(tmp_path / "r.csv"), "--x", "nn", "--y", "rho",
                     "--out", str(tmp_path / "p.svg")]) == 2


def test_oracle_check_small():
    lines = []
    failures = cli.oracle_check(samples=2000, models=[(1, [4], [[1.0]], 1.0)], ts=(2,),
                                log=lines.append)
    assert not failures["lower"] and not failures["monte_carlo"] and not failures["walk_count"]
    assert any(line.startswith("PASS walk_count") for line in lines)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "sbmwalk", "--help"], capture_output=True,
                         text=True, check=True)
    assert "oracle-check" in out.stdout
