import math
import os
import subprocess
import sys

import numpy as np
import pytest

import latticeamp as la
from latticeamp.cli import main


def run_cli(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run([sys.executable, "-m", "latticeamp.cli", *args],
                          capture_output=True, text=True, env=e)


def data_rows(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_bounds_matches_closed_form(tmp_path):
    r = run_cli("bounds", "--estimator", "sic", "--reduction", "blll",
                "--delta", "0.75", "--n", "8")
    assert r.returncode == 0
    rows = data_rows(r.stdout)
    assert rows[0] == "estimator,reduction,delta,n,eta"
    last = rows[-1].split(",")
    beta = 1.0 / math.sqrt(0.5)
    assert float(last[-1]) == pytest.approx(beta**8 / math.sqrt(beta**2 - 1.0), rel=1e-12)


def test_unknown_flag_exits_1():
    r = run_cli("bounds", "--estimator", "sic", "--n", "4", "--wat", "1")
    assert r.returncode == 1
    assert "usage" in (r.stderr + r.stdout).lower()


def test_unknown_subcommand_exits_1():
    assert run_cli("frobnicate").returncode == 1


def test_numeric_failure_exits_2(tmp_path):
    bad = tmp_path / "bad.txt"
    la.save_matrix(bad, np.array([[1.0, 2.0], [2.0, 4.0]]))
    tgt = tmp_path / "y.txt"
    la.save_matrix(tgt, np.array([[1.0], [0.0]]))
    r = run_cli("solve", "--basis", str(bad), "--target", str(tgt), "--method", "zf")
    assert r.returncode == 2
    assert "RankDeficient" in r.stderr


def test_reduce_and_metrics_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    path = tmp_path / "basis.txt"
    la.save_matrix(path, rng.standard_normal((5, 5)))
    out_basis = tmp_path / "red.txt"
    out_u = tmp_path / "u.txt"
    r = run_cli("reduce", "--basis", str(path), "--method", "blll",
                "--out-basis", str(out_basis), "--out-unimodular", str(out_u))
    assert r.returncode == 0
    row = data_rows(r.stdout)[1].split(",")
    assert row[0] == "blll" and int(row[1]) == 5
    assert float(row[3]) <= float(row[2]) + 1e-9  # od_after <= od_before
    red = la.load_matrix(out_basis)
    u = la.load_matrix(out_u).astype(np.int64)
    orig = la.load_matrix(path)
    assert np.abs(orig @ u - red).max() <= 1e-8 * np.abs(red).max()
    m = run_cli("metrics", "--basis", str(out_basis))
    assert m.returncode == 0
    vals = data_rows(m.stdout)[1].split(",")
    assert float(vals[2]) >= 1.0 - 1e-9


def test_solve_methods_agree_with_library(tmp_path):
    rng = np.random.default_rng(6)
    h = rng.standard_normal((4, 4))
    y = rng.standard_normal(4)
    bpath, ypath = tmp_path / "b.txt", tmp_path / "y.txt"
    la.save_matrix(bpath, h)
    la.save_matrix(ypath, y.reshape(-1, 1))
    inst = la.CvpInstance(basis=la.LatticeBasis(h), target=y)
    expected = {
        "sphere": la.sphere_cvp(inst)[0],
        "zf": la.zf_decode(inst),
        "sic": la.sic_decode(inst),
    }
    for method, want in expected.items():
        r = run_cli("solve", "--basis", str(bpath), "--target", str(ypath),
                    "--method", method)
        assert r.returncode == 0
        row = data_rows(r.stdout)[1].split(",")
        got = np.array([int(v) for v in row[2].split()])
        assert np.array_equal(got, want)
        assert float(row[1]) == pytest.approx(inst.residual(want), rel=1e-12)
    r = run_cli("solve", "--basis", str(bpath), "--target", str(ypath),
                "--method", "amp", "--prior", "ternary")
    assert r.returncode == 0


def test_se_and_fixedpoint(tmp_path):
    r = run_cli("se", "--prior", "gaussian", "--sigma-g-sq", "1.0",
                "--noise-var", "1.0", "--n", "6", "--iterations", "40")
    assert r.returncode == 0
    last = float(data_rows(r.stdout)[-1].split(",")[1])
    assert last == pytest.approx((1.0 + math.sqrt(5.0)) / 2.0, abs=1e-6)
    f = run_cli("fixedpoint", "--prior", "gaussian", "--sigma-g-sq", "1.0",
                "--noise-var", "1.0", "--n", "6", "--grid-points", "9")
    assert f.returncode == 0
    assert "highest_fixed_point" in f.stdout
    assert len(data_rows(f.stdout)) == 10


def test_vp_errors_probabilities(tmp_path):
    r = run_cli("vp-errors", "--m", "6", "--n", "6", "--M", "16",
                "--trials", "60", "--seed", "2")
    assert r.returncode == 0
    rows = [line.split(",") for line in data_rows(r.stdout)[1:]]
    for est in ("zf", "sic"):
        total = sum(float(p) for e, _, p in rows if e == est)
        assert total == pytest.approx(1.0, abs=1e-9)


def test_vp_ser_deterministic_across_threads(tmp_path):
    args = ("vp-ser", "--m", "5", "--n", "5", "--M", "8", "--snr", "38,42",
            "--trials", "40", "--seed", "3", "--algorithms", "zf,sic")
    r1 = run_cli(*args, "--threads", "1")
    r2 = run_cli(*args, "--threads", "2")
    assert r1.returncode == 0 and r2.returncode == 0
    assert r1.stdout == r2.stdout


def test_threads_env_var(tmp_path):
    args = ("vp-ser", "--m", "4", "--n", "4", "--M", "8", "--snr", "40",
            "--trials", "20", "--seed", "3", "--algorithms", "zf")
    r1 = run_cli(*args)
    r2 = run_cli(*args, env={"LATTICEAMP_THREADS": "2"})
    assert r1.returncode == 0 and r2.returncode == 0
    assert r1.stdout == r2.stdout


def test_config_echo_round_trip(tmp_path):
    cfg = tmp_path / "scen.cfg"
    cfg.write_text(
        "[scenario]\n"
        "m = 5\nn = 5\nconstellation = 8\nsnr_db = 38 42\ntrials = 30\nseed = 7\n"
        "[algorithm LR-ZF]\nestimator = zf\nreduction = blll\ndelta = 0.75\n"
        "[algorithm LR-ZF+AMPT]\nestimator = zf\nreduction = blll\nprior = ternary\n"
    )
    r1 = run_cli("vp-ser", "--config", str(cfg))
    assert r1.returncode == 0
    echoed = [line[2:] for line in r1.stdout.splitlines()
              if line.startswith("# ")][1:]  # drop the version line
    cfg2 = tmp_path / "echo.cfg"
    cfg2.write_text("\n".join(echoed) + "\n")
    r2 = run_cli("vp-ser", "--config", str(cfg2))
    assert r2.returncode == 0
    assert r1.stdout == r2.stdout


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[scenario]\nm = 4\nn = 4\nconstellation = 8\ntrials = 5\nbogus = 1\n")
    r = run_cli("vp-ser", "--config", str(cfg))
    assert r.returncode == 1
    assert "bogus" in r.stderr


def test_mimo_subcommands_smoke():
    r = run_cli("mimo-ser", "--m", "16", "--n", "8", "--M", "4", "--snr", "14",
                "--trials", "30", "--seed", "4", "--detectors", "zf,lmmse,lmmse+ampt")
    assert r.returncode == 0
    assert len(data_rows(r.stdout)) == 4
    r2 = run_cli("mimo-errors", "--m", "8", "--n", "4", "--M", "4", "--snr", "10",
                 "--trials", "30", "--seed", "4")
    assert r2.returncode == 0
    r3 = run_cli("mimo-basis-check", "--m", "12", "--n", "3", "--trials", "10", "--seed", "4")
    assert r3.returncode == 0
    header = data_rows(r3.stdout)[0].split(",")
    assert "minima_match_rate" in header


def test_main_callable_in_process(capsys):
    rc = main(["bounds", "--estimator", "zf", "--reduction", "blll", "--n", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert data_rows(out)[-1].split(",")[-1] == "3.0"


def test_out_flag(tmp_path):
    target = tmp_path / "table.csv"
    rc = main(["bounds", "--n", "2", "--out", str(target)])
    assert rc == 0
    assert target.read_text().startswith("# latticeamp")
