import json
import subprocess
import sys

import pytest

from shearframe.cli import main


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_command_and_bad_flag():
    assert main(["bogus"]) == 1
    assert main(["table1", "--no-such-flag"]) == 1
    assert main(["bounds", "--N", "3", "--l", "5"]) == 1


def test_help_exits_zero():
    assert main(["--help"]) == 0


def test_table1(tmp_path):
    assert main(["table1", "--outdir", str(tmp_path), "--out", "t1.csv", "--precise"]) == 0
    lines = (tmp_path / "t1.csv").read_text().splitlines()
    assert lines[0] == "N,l,beta"
    assert len(lines) == 45
    assert "3,1,4.29956" in lines
    man = json.loads((tmp_path / "table1.manifest.json").read_text())
    assert set(man["artifacts"]) == {"t1.csv", "t1.precise.json"}
    assert man["status"] == 0 and man["command"] == "table1"
    assert len(json.loads((tmp_path / "t1.precise.json").read_text())) == 44


def test_mask_check(tmp_path):
    assert main(["mask-check", "--Nmax", "9", "--outdir", str(tmp_path)]) == 0
    rows = (tmp_path / "mask_check.csv").read_text().splitlines()
    assert len(rows) == 1 + 45


def test_bounds_small(tmp_path):
    assert main(["bounds", "--N", "3", "--l", "1", "--grid", "512", "--outdir", str(tmp_path)]) == 0
    summ = json.loads((tmp_path / "bounds.summary.json").read_text())
    assert max(summ["violations"].values()) <= 1e-9
    assert summ["constants"]["beta"] == pytest.approx(4.29956, abs=1e-5)


def test_decay_check_exit_codes(tmp_path):
    assert main(["decay-check", "--example", "2", "--samples", "500", "--outdir", str(tmp_path)]) == 0
    assert main(["decay-check", "--example", "1", "--samples", "500", "--outdir", str(tmp_path)]) == 2


def test_cartoon_gen(tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"rho0": 0.3, "harmonics": [[2, 0.9]]}))
    assert main(["cartoon-gen", "--spec", str(spec), "--outdir", str(tmp_path)]) == 2
    assert main(["cartoon-gen", "--M", "64", "--outdir", str(tmp_path)]) == 0
    assert (tmp_path / "cartoon.pgm").read_bytes().startswith(b"P5")
    assert main(["cartoon-gen", "--M", "60", "--outdir", str(tmp_path)]) == 1


def test_small_runs_are_byte_identical(tmp_path):
    cmds = [
        ["table1"],
        ["transform-roundtrip", "--M", "64", "--count", "3"],
        ["sparse-approx", "--M", "64", "--Ns", "16,64,256"],
        ["frame-scan", "--example", "1", "--jmax", "4", "--grid", "64"],
    ]
    for cmd in cmds:
        outs = []
        for rep in ("a", "b"):
            d = tmp_path / rep / cmd[0]
            assert main(cmd + ["--outdir", str(d)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert outs[0] == outs[1], cmd[0]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "shearframe"], capture_output=True, text=True)
    assert r.returncode == 1
