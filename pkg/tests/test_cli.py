import json
import math
import os

import numpy as np
import pytest

from contact3.cli import ATLAS_HEADER, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify_auto_three_records(capsys):
    code, out, _ = run_cli(
        capsys, "classify", "--alpha", "3", "--beta", "0", "--gamma", "0", "--delta", "-1", "--xi", "auto"
    )
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert [r["family"] for r in records] == ["A", "B", "B"]
    bs = sorted(r["params"]["B"] for r in records[1:])
    assert bs == pytest.approx([-math.sqrt(3.0), math.sqrt(3.0)])
    assert all(r["contact_form"] for r in records[1:])
    assert not records[0]["contact_form"]


def test_classify_explicit_xi(capsys):
    code, out, _ = run_cli(
        capsys, "classify", "--p", "2", "--q", "0", "--r", "1", "--xi", "1,0,0"
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["family"] == "A"
    assert rec["D"] == pytest.approx(-3.0)


def test_classify_constraint_violation_exits_2(capsys):
    code, _, err = run_cli(
        capsys, "classify", "--alpha", "1", "--beta", "1", "--gamma", "1", "--delta", "1", "--xi", "1,0,0"
    )
    assert code == 2
    assert "orthogonality" in err


def test_classify_non_geodesic_exits_3(capsys):
    code, _, err = run_cli(capsys, "classify", "--p", "0", "--q", "0", "--r", "1", "--xi", "0,1,0")
    assert code == 3
    assert "geodesic" in err and "ker" in err


def test_classify_functional_input(capsys):
    code, out, _ = run_cli(capsys, "classify", "--l", "1,0,0", "--xi", "auto")
    assert code == 0
    rec = json.loads(out)
    assert rec["family"] == "A" and rec["geodesic_case"] == "E"


def test_classify_flag_groups_are_exclusive(capsys):
    code, _, err = run_cli(
        capsys, "classify", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "1",
        "--p", "0", "--q", "0", "--r", "1", "--xi", "1,0,0"
    )
    assert code == 2
    assert "exactly one" in err


def test_classify_output_is_deterministic(capsys):
    args = ("classify", "--alpha", "3", "--beta", "3", "--gamma", "1", "--delta", "-1", "--xi", "auto")
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_geodesics_json(capsys):
    code, out, _ = run_cli(capsys, "geodesics", "--p", "1", "--q", "1", "--r", "1")
    assert code == 0
    rec = json.loads(out)
    assert rec["case_tag"] == "B1"
    assert len(rec["discrete"]) == 2
    assert rec["families"][0]["angles"] == "full"
    assert rec["oracle_agreement"] is None


def test_geodesics_with_oracle(capsys):
    code, out, _ = run_cli(capsys, "geodesics", "--p", "2", "--q", "0", "--r", "1", "--oracle", "200")
    assert code == 0
    rec = json.loads(out)
    assert rec["case_tag"] == "A2"
    assert rec["oracle_agreement"] <= 1e-5
    angles = rec["families"][0]["angles"]
    assert sorted(angles) == pytest.approx([math.pi / 3, 2 * math.pi / 3], abs=1e-12)


def test_geodesics_case_d(capsys):
    code, out, _ = run_cli(capsys, "geodesics", "--p", "0", "--q", "0", "--r", "1")
    rec = json.loads(out)
    assert rec["case_tag"] == "D"
    assert len(rec["discrete"]) == 2 and rec["families"] == []


def test_atlas_csv(tmp_path, capsys):
    out_file = tmp_path / "atlas.csv"
    code, _, _ = run_cli(
        capsys, "atlas", "--p-range", "-1:1:3", "--q-range", "0:2:3", "--r", "1", "--out", str(out_file)
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == ATLAS_HEADER
    assert len(lines) == 10
    rows = [dict(zip(lines[0].split(","), ln.split(","))) for ln in lines[1:]]
    grid = {(float(r["p"]), float(r["q"])): r for r in rows}
    assert grid[(0.0, 0.0)]["geodesic_case"] == "D"
    assert grid[(1.0, 1.0)]["geodesic_case"] == "B1"
    assert grid[(-1.0, 1.0)]["geodesic_case"] == "C1"
    assert grid[(1.0, 0.0)]["geodesic_case"] == "B2"
    # row-major order: p varies slowest
    ps = [float(r["p"]) for r in rows]
    assert ps == sorted(ps)


def test_atlas_bad_output_path_exits_4(capsys):
    code, _, err = run_cli(
        capsys, "atlas", "--p-range", "0:1:2", "--q-range", "0:1:2", "--r", "1",
        "--out", "/nonexistent-dir/atlas.csv"
    )
    assert code == 4
    assert "cannot write" in err


def test_verify_list_and_single_group(capsys):
    code, out, _ = run_cli(capsys, "verify", "--list")
    assert code == 0
    names = out.strip().splitlines()
    assert "axioms" in names and "geodesic-oracle" in names

    code, out, _ = run_cli(capsys, "verify", "--seed", "42", "--group", "angle-roots", "--quick")
    assert code == 0
    assert out.startswith("[PASS] angle-roots")


def test_verify_unknown_group(capsys):
    code, _, err = run_cli(capsys, "verify", "--group", "nope")
    assert code == 2
    assert "unknown group" in err


def test_tolerance_env_override(capsys, monkeypatch):
    # a loose CONTACT3_TOL lets a slightly non-geodesic xi through
    monkeypatch.setenv("CONTACT3_TOL", "1e-1")
    xi = f"{math.cos(0.01)},{math.sin(0.01)},0"
    code, out, _ = run_cli(capsys, "classify", "--alpha", "3", "--beta", "0", "--gamma", "0", "--delta", "-1", "--xi", xi)
    assert code == 0
    monkeypatch.setenv("CONTACT3_TOL", "1e-12")
    code, _, _ = run_cli(capsys, "classify", "--alpha", "3", "--beta", "0", "--gamma", "0", "--delta", "-1", "--xi", xi)
    assert code == 3
