import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from ncdyn import cli, config
from ncdyn.config import ConfigError

ROOT = Path(__file__).resolve().parents[1]
BUNDLED = sorted((ROOT / "scenarios").glob("*.cfg"))


def write(tmp_path, text, name="s.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


MARKOV = """[scenario]
kind = markovian
seed = 3

[markovian]
n0 = {n0}
n_eq = 0.2
kappa = 0.1
t_final = 5.0
dt = 0.01
"""


@pytest.mark.parametrize("path", BUNDLED, ids=lambda p: p.stem)
def test_bundled_scenarios_exit_zero(path, tmp_path):
    assert cli.main([str(path), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["status"] == "ok" and report["kind"] == path.stem


def test_every_kind_has_a_bundled_scenario():
    assert {p.stem for p in BUNDLED} == set(config.KINDS)


def test_kinetic_headers_and_rate(tmp_path):
    assert cli.main([str(ROOT / "scenarios" / "kinetic.cfg"), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "series.csv").read_text().splitlines()[0] == "t,n,delta_omega"
    res = json.loads((tmp_path / "report.json").read_text())["results"]
    assert res["two_kappa"] == pytest.approx(0.0314159, abs=1e-7)
    assert abs(res["fit"]["rate"] / res["two_kappa"] - 1) < 0.05
    assert res["fit"]["residual"] is not None


def test_classical_header(tmp_path):
    cli.main([str(ROOT / "scenarios" / "classical.cfg"), "--out", str(tmp_path)])
    assert (tmp_path / "series.csv").read_text().splitlines()[0] == "t,q1,p1,q2,p2,deviation"


def test_markovian_fixed_point_flagged(tmp_path):
    p = write(tmp_path, MARKOV.format(n0=0.2))
    out = tmp_path / "out"
    assert cli.main([str(p), "--out", str(out)]) == 0
    rows = (out / "series.csv").read_text().splitlines()[1:]
    assert {r.split(",")[1] for r in rows} == {"0.20000000000000001"}
    fit = json.loads((out / "report.json").read_text())["results"]["fit"]
    assert fit["defined"] is False and fit["rate"] is None and fit["reason"]


def test_unknown_key_exit_two_no_files(tmp_path, capsys):
    p = write(tmp_path, MARKOV.format(n0=1.0) + "kapa = 0.3\n")
    out = tmp_path / "out"
    assert cli.main([str(p), "--out", str(out)]) == 2
    assert not out.exists()
    err = capsys.readouterr().err
    assert "kapa" in err and "line 11" in err


@pytest.mark.parametrize(
    "text,key",
    [
        ("[scenario]\nkind = markovian\n[markovian]\nkappa = -1\n", "kappa"),
        ("[scenario]\nkind = markovian\n[markovian]\ndt = abc\n", "dt"),
        ("[scenario]\nkind = markovian\n[markovian]\nt_final = nan\n", "t_final"),
        ("[scenario]\nkind = warp\n", "kind"),
        ("[scenario]\nkind = markovian\nseed = -1\n", "seed"),
        ("[scenario]\nkind = markovian\nseed = 18446744073709551616\n", "seed"),
        ("[scenario]\nkind = markovian\n[kinetic]\nn0 = 1\n", "kinetic"),
        ("[scenario]\nkind = algebra\n[algebra]\nn_max = 2.5\n", "n_max"),
        ("[scenario]\nkind = classical\n[classical]\ndamping = 3\n", "damping"),
    ],
)
def test_config_errors(text, key):
    with pytest.raises(ConfigError) as err:
        config.parse_text(text)
    assert err.value.key == key


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError):
        config.parse_text("[scenario]\nkind = markovian\n[markovian]\ndt = 0.1\ndt = 0.2\n")


def test_missing_file_exit_two(tmp_path):
    assert cli.main([str(tmp_path / "nope.cfg"), "--out", str(tmp_path / "o")]) == 2


def test_seed_accepts_full_u64():
    cfg = config.parse_text("[scenario]\nkind = markovian\nseed = 18446744073709551615\n")
    assert cfg.seed == 2**64 - 1


def test_deterministic_bytes(tmp_path):
    src = ROOT / "scenarios" / "algebra.cfg"
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main([str(src), "--out", str(a)])
    cli.main([str(src), "--out", str(b)])
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    src = ROOT / "scenarios" / "compare.cfg"
    cli.main([str(src), "--out", str(a)])
    cli.main([str(src), "--out", str(b)])
    for name in ("series.csv", "oracle.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_override_changes_sweep(tmp_path):
    src = str(ROOT / "scenarios" / "algebra.cfg")
    cli.main([src, "--out", str(tmp_path / "a"), "--seed", "1"])
    cli.main([src, "--out", str(tmp_path / "b"), "--seed", "2"])
    ra = json.loads((tmp_path / "a" / "report.json").read_text())
    rb = json.loads((tmp_path / "b" / "report.json").read_text())
    assert ra["parameters"]["seed"] == 1 and rb["parameters"]["seed"] == 2
    assert ra["results"]["sweep_points"] != rb["results"]["sweep_points"]


def test_bad_seed_flag(tmp_path):
    with pytest.raises(SystemExit) as err:
        cli.main([str(ROOT / "scenarios" / "algebra.cfg"), "--seed", "-4"])
    assert err.value.code == 2


@pytest.mark.parametrize("name", ["kinetic", "compare", "algebra", "classical"])
def test_report_replay_round_trip(tmp_path, name):
    first, second = tmp_path / "first", tmp_path / "second"
    assert cli.main([str(ROOT / "scenarios" / f"{name}.cfg"), "--out", str(first), "--seed", "77"]) == 0
    assert cli.main([str(first / "report.json"), "--out", str(second)]) == 0
    for f in first.iterdir():
        assert f.read_bytes() == (second / f.name).read_bytes()


def test_blow_up_exit_three(tmp_path):
    p = write(tmp_path, "[scenario]\nkind = classical\n[classical]\nsystem = harmonic\nq1 = 1\nq2 = 1\nbound = 0.5\n")
    out = tmp_path / "out"
    assert cli.main([str(p), "--out", str(out)]) == 3
    rep = json.loads((out / "report.json").read_text())
    assert rep["status"] == "solver_failure" and rep["t_fail"] is not None
    assert not (out / "series.csv").exists()


def test_negative_occupation_exit_three(tmp_path):
    p = write(
        tmp_path,
        "[scenario]\nkind = kinetic\n[kinetic]\nomega0 = 0\nband_center = 0\nn_modes = 1\n"
        "coupling_sq = 25\noccupation = 0\nt_final = 5\n",
    )
    out = tmp_path / "out"
    assert cli.main([str(p), "--out", str(out)]) == 3
    rep = json.loads((out / "report.json").read_text())
    assert 0 < rep["t_fail"] <= 5


def test_sweep_with_thread_cap(tmp_path, monkeypatch):
    paths = [write(tmp_path, MARKOV.format(n0=v), f"m{i}.cfg") for i, v in enumerate((1.0, 0.5, 0.2))]
    monkeypatch.setenv("NCDYN_THREADS", "2")
    out = tmp_path / "sweep"
    assert cli.main([str(p) for p in paths] + ["--out", str(out)]) == 0
    for i in range(3):
        assert (out / f"m{i}" / "series.csv").exists()


def test_sweep_reports_worst_exit(tmp_path):
    good = write(tmp_path, MARKOV.format(n0=1.0), "good.cfg")
    bad = write(tmp_path, MARKOV.format(n0=1.0) + "bogus = 1\n", "bad.cfg")
    out = tmp_path / "sweep"
    assert cli.main([str(good), str(bad), "--out", str(out)]) == 2
    assert (out / "good" / "report.json").exists() and not (out / "bad").exists()


def test_console_script_entry(tmp_path):
    # runs the module the same way the installed script does
    r = subprocess.run(
        [sys.executable, "-m", "ncdyn.cli", str(ROOT / "scenarios" / "markovian.cfg"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        env={**os.environ},
    )
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "report.json").exists()
