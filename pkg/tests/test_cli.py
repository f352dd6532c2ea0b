import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "fractw.cli"]


def run(*args, check=True):
    proc = subprocess.run(CLI + list(args), capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def test_check_reference_states():
    proc = run("check", "--phi-minus", "1", "--phi-plus", "-0.6")
    payload = json.loads(proc.stdout)
    assert payload["all_ok"] is True
    assert all(payload[k] for k in
               ("ordering_ok", "lax_violated", "sum_positive",
                "h_plus_minus_positive"))


def test_roots_json():
    proc = run("roots", "--tau", "1", "--a", "1", "--b", "1", "--alpha", "0.5")
    payload = json.loads(proc.stdout)
    assert payload["lambda"] == pytest.approx(0.5248885986564048, abs=1e-10)
    assert payload["s1_re"] < 0 and payload["s1_im"] > 0
    assert payload["residuals"]["left"] <= 1e-12
    assert payload["residuals"]["right"] <= 1e-10


def test_solve_writes_csv(tmp_path):
    out = os.path.join(tmp_path, "t.csv")
    proc = run("solve", "--alpha", "0.9", "--tau", "0.5", "--dx", "0.05",
               "--length", "60", "--out", out)
    payload = json.loads(proc.stdout)
    assert payload["terminated"] == "reached_xi_max"
    lines = open(out).read().splitlines()
    assert lines[0].startswith("# fractw trajectory")
    assert lines[1] == "xi,phi,psi,dalpha,h,energy_residual"
    assert len(lines) == 2 + 60 * 20 + 1


def test_solve_missing_tau_is_usage_error():
    proc = run("solve", "--alpha", "0.9", check=False)
    assert proc.returncode == 2


def test_shoot_rejects_inadmissible():
    proc = run("shoot", "--phi-minus", "1", "--phi-plus", "-1", check=False)
    assert proc.returncode == 3
    assert "not admissible" in proc.stderr


def test_shoot_coarse_smoke(tmp_path):
    out = os.path.join(tmp_path, "shoot.json")
    proc = run("shoot", "--alpha", "0.9", "--phi-minus", "1",
               "--phi-plus", "-0.6", "--dx", "0.1", "--length", "200",
               "--stop-tol", "1e-2", "--out", out)
    payload = json.loads(proc.stdout)
    assert 2.0 < payload["tau_star"] < 3.5
    assert payload["bracket"][0] <= payload["tau_star"] <= payload["bracket"][1]
    assert json.load(open(out))["tau_star"] == payload["tau_star"]


def test_kernel_table(tmp_path):
    out = os.path.join(tmp_path, "v.csv")
    proc = run("kernel", "--tau", "0.05", "--a", "1", "--alpha", "0.5",
               "--eta-max", "4", "--points", "25", "--out", out)
    payload = json.loads(proc.stdout)
    assert payload["s1_re"] < 0
    lines = open(out).read().splitlines()
    assert lines[1] == "eta,v,v_prime,v_second"
    rows = [l.split(",") for l in lines[2:]]
    assert len(rows) == 25
    assert all(len(r) == 4 for r in rows)
    assert float(rows[0][1]) == 1.0


def test_solve_deterministic(tmp_path):
    paths = [os.path.join(tmp_path, n) for n in ("a.csv", "b.csv")]
    for p in paths:
        run("solve", "--alpha", "0.9", "--tau", "0.5", "--dx", "0.05",
            "--length", "40", "--out", p)
    assert open(paths[0], "rb").read() == open(paths[1], "rb").read()


def test_config_file_defaults(tmp_path):
    cfg = os.path.join(tmp_path, "run.cfg")
    with open(cfg, "w") as fh:
        fh.write("# coarse protocol\ndx=0.05\nlength=40\n")
    out = os.path.join(tmp_path, "c.csv")
    proc = run("solve", "--config", cfg, "--alpha", "0.9", "--tau", "0.5",
               "--out", out)
    payload = json.loads(proc.stdout)
    # length 40 at dx 0.05 -> 801 nodes
    assert len(open(out).read().splitlines()) == 2 + 801
    # flags still override the file
    proc2 = run("solve", "--config", cfg, "--dx", "0.1", "--alpha", "0.9",
                "--tau", "0.5", "--out", out)
    assert len(open(out).read().splitlines()) == 2 + 401


def test_version_flag():
    proc = run("--version")
    assert proc.stdout.startswith("fractw")


def test_shoot_trajectory_dir(tmp_path):
    tdir = os.path.join(tmp_path, "iters")
    proc = run("shoot", "--alpha", "0.9", "--phi-minus", "1",
               "--phi-plus", "-0.6", "--dx", "0.1", "--length", "150",
               "--stop-tol", "0.5", "--trajectory-dir", tdir)
    payload = json.loads(proc.stdout)
    files = sorted(os.listdir(tdir))
    assert len(files) == len(payload["history"])
    first = open(os.path.join(tdir, files[0])).readline()
    assert first.startswith("# fractw trajectory")


def test_solve_warns_on_inadmissible_states(tmp_path):
    out = os.path.join(tmp_path, "w.csv")
    proc = run("solve", "--phi-minus", "1", "--phi-plus", "-1.2",
               "--alpha", "0.9", "--tau", "0.5", "--dx", "0.1",
               "--length", "50", "--out", out)
    assert "not admissible" in proc.stderr     # warning, not a hard error
    assert json.loads(proc.stdout)["terminated"] in (
        "reached_xi_max", "blow_down")
