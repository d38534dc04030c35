import json
import subprocess
import sys

import pytest

from siegel_lab import cli


def run(*args, **kw):
    return subprocess.run([sys.executable, "-m", "siegel_lab", *args], capture_output=True, text=True, **kw)


def test_verify_identities_small(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["verify", "--suite", "identities", "--disc-max", "20", "--out", str(out), "--workers", "1"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "check_id,verdict,lhs,rhs,bound,margin,params"
    assert 100 < len(lines) < 5000
    assert all(",fail," not in line for line in lines)


def test_output_sorted_and_json(tmp_path):
    out = tmp_path / "r.jsonl"
    cli.main(["verify", "--suite", "characters", "--disc-max", "30", "--format", "json", "--out", str(out)])
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    ids = [r["check_id"] for r in recs]
    assert ids == sorted(ids)
    assert {r["verdict"] for r in recs} <= {"pass", "report_only"}


def test_parallel_equals_serial(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["verify", "--suite", "quadforms", "--disc-min", "-60", "--disc-max", "60"]
    assert cli.main(base + ["--workers", "1", "--out", str(a)]) == 0
    assert cli.main(base + ["--workers", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nsuite = characters\ndisc-max = 12\nsign = neg\nformat = json\n")
    out = tmp_path / "r.jsonl"
    assert cli.main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    deltas = {json.loads(l)["params"]["delta"] for l in out.read_text().splitlines()}
    assert deltas == {-3, -4, -7, -8, -11}
    assert cli.main(["verify", "--config", str(cfg), "--sign", "pos", "--out", str(out)]) == 0
    deltas = {json.loads(l)["params"]["delta"] for l in out.read_text().splitlines()}
    assert deltas == {5, 8, 12}


def test_exit_codes(tmp_path):
    assert run("verify", "--suite", "bounds", "--M", "", "--disc-max", "10").returncode == 2
    assert run("verify", "--suite", "identities", "--disc-min", "-2", "--disc-max", "0").returncode == 2
    assert run("verify", "--disc-min", "5", "--disc-max", "1").returncode == 2
    assert run("verify", "--nonsense").returncode == 2
    assert run("verify", "--suite", "kernels", "--out", str(tmp_path / "no" / "x.csv")).returncode == 3
    assert run("verify", "--config", str(tmp_path / "missing.cfg")).returncode == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run("verify", "--config", str(bad)).returncode == 2


def test_failing_suite_exits_one(tmp_path):
    # the printed restricted inversion is false, so the bounds suite reports fails
    proc = run("verify", "--suite", "bounds", "--disc-min", "-4", "--disc-max", "-3", "--out", str(tmp_path / "b.csv"))
    assert proc.returncode == 1
    text = (tmp_path / "b.csv").read_text()
    assert "eq5.2/x<=10000/H=2,fail" in text


def test_sieve_limit_env_is_usage_error():
    import os

    env = dict(os.environ, SIEGEL_LAB_SIEVE_LIMIT="100")
    assert run("scan", "--disc-min", "-2000", "--disc-max", "-1990", env=env).returncode == 2


def test_scan():
    proc = run("scan", "--disc-min", "-30", "--disc-max", "-3", "--sign", "neg")
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert [int(l.split(",")[0]) for l in lines[1:-1]] == [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3]
    assert lines[-1].startswith("# min_normalized delta=-3")
    proc = run("scan", "--disc-min", "-163", "--disc-max", "-163", "--format", "json")
    row = json.loads(proc.stdout.splitlines()[0])
    assert row["h"] == 1 and abs(row["L1"] - 0.246068527553) < 1e-9
    proc = run("scan", "--disc-min", "-2", "--disc-max", "0")
    assert proc.returncode == 0 and proc.stdout.splitlines() == [",".join(cli.SCAN_COLUMNS)]


def test_kernel_table():
    proc = run("kernel", "--kappa", "2", "--N", "2")
    lines = proc.stdout.splitlines()
    assert [int(l.split(",")[1]) for l in lines[1:-1]] == [1, 2, 3, 4, 5, 4, 3, 2, 1]
    assert lines[-1] == "# sum_w=1"
    proc = run("kernel", "--kappa", "8", "--N", "64")
    assert proc.stdout.splitlines()[-1] == "# sum_w=1"
    proc = run("kernel", "--kappa", "1", "--N", "3")
    ws = [l.split(",")[4] for l in proc.stdout.splitlines()[1:-1] if l.split(",")[4]]
    assert ws == ["0", "0", "0", "1"]
    assert run("kernel", "--kappa", "2,3").returncode == 2


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (a, b):
        assert run("verify", "--suite", "kernels", "--out", str(target)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
