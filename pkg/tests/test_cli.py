"""End-to-end CLI runs: artifacts, exit codes, determinism."""

import json
import subprocess
import sys

import pytest


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "branchpoints", *args],
                          capture_output=True, text=True, cwd=cwd)


def test_analyze_quartic_report(tmp_path):
    r = run_cli(["analyze", "--a", "1,0", "--b", "1,0", "--out", "o"], tmp_path)
    assert r.returncode == 0
    report = json.loads((tmp_path / "o" / "analyze_report.json").read_text())
    bp = report["branch_points"][0]
    assert bp["m"] == 4 and bp["classification"] == "true-branch"
    fam1 = next(f for f in bp["families"] if f["k"] == 1)
    assert fam1["N"] == 6
    assert abs(fam1["A"][0] - 8 / 3) < 1e-9 and abs(fam1["A"][1]) < 1e-9
    assert fam1["matches_reference"]
    fam2 = next(f for f in bp["families"] if f["k"] == 2)
    assert fam2["N"] == 7
    assert abs(fam2["A"][0] - 16 / 7) < 1e-9
    assert not fam2["matches_reference"]
    assert "reference_flag" in fam2
    assert not bp["combined"]["equal_angles"]
    assert "N = 6" in r.stdout


def test_analyze_plane_no_branch_points(tmp_path):
    surf = tmp_path / "plane.json"
    surf.write_text('{"h": [[2, 0]], "g": [[0, 0]]}')
    r = run_cli(["analyze", "--surface", str(surf), "--out", "o"], tmp_path)
    assert r.returncode == 0
    assert "no branch points" in r.stdout
    assert "no branch points" in (tmp_path / "o" / "analyze_report.txt").read_text()


def test_topology_certificate(tmp_path):
    r = run_cli(["topology", "--sigma", "rp2", "--ramified", "--out", "o"], tmp_path)
    assert r.returncode == 0
    assert "area reduction factor: 2" in r.stdout
    payload = json.loads((tmp_path / "o" / "topology_report.json").read_text())
    assert payload["certificate"]["area_factor"] == 2
    r = run_cli(["topology", "--cover", "or:2", "--quotient", "torus",
                 "--degree", "2", "--out", "o2"], tmp_path)
    assert r.returncode == 0 and "branching order 2" in r.stdout


def test_unknown_command_exit_1(tmp_path):
    r = run_cli(["frobnicate"], tmp_path)
    assert r.returncode == 1
    assert "usage" in r.stderr.lower() or "usage" in r.stdout.lower()


def test_validation_error_exit_2(tmp_path):
    r = run_cli(["analyze", "--surface", "missing.json", "--out", "o"], tmp_path)
    assert r.returncode == 2
    r = run_cli(["topology", "--out", "o"], tmp_path)
    assert r.returncode == 2


def test_energy_table(tmp_path):
    surf = tmp_path / "plane.json"
    surf.write_text('{"h": [[1, 0]], "g": [[0, 0]]}')
    r = run_cli(["energy", "--surface", str(surf), "--mesh", "disk",
                 "--triangles", "2000", "--out", "o"], tmp_path)
    assert r.returncode == 0
    rows = (tmp_path / "o" / "energy.csv").read_text().splitlines()
    assert rows[0] == "mesh,triangles,energy,area,gap,rel_gap"
    cells = rows[1].split(",")
    assert abs(float(cells[2]) - 3.14159) < 0.1
    assert float(cells[4]) >= -1e-12


def test_trace_artifacts_and_determinism(tmp_path):
    args = ["trace", "--a", "1,0", "--b", "1,0", "--rmax", "0.12",
            "--step", "0.004", "--families", "1"]
    r1 = run_cli([*args, "--out", "o1"], tmp_path)
    assert r1.returncode == 0
    r2 = run_cli([*args, "--out", "o2"], tmp_path)
    assert r2.returncode == 0
    for name in ("curves.csv", "directions.csv"):
        b1 = (tmp_path / "o1" / name).read_bytes()
        b2 = (tmp_path / "o2" / name).read_bytes()
        assert b1 == b2, name
    # every SVG has a CSV twin
    assert (tmp_path / "o1" / "curves.svg").exists()
    assert (tmp_path / "o1" / "directions.svg").exists()
    header = (tmp_path / "o1" / "curves.csv").read_text().splitlines()[0]
    assert header.startswith("k,theta_start,w_re,w_im")


def test_courant_artifacts(tmp_path):
    r = run_cli(["courant", "--a", "1,0", "--b", "0.80902,0.58779", "--out", "o"],
                tmp_path)
    assert r.returncode == 0
    report = json.loads((tmp_path / "o" / "courant_report.json").read_text())
    combined = report["branch_points"][0]["combined"]
    assert combined["gap_ratio"] > 1.05
    assert (tmp_path / "o" / "rays.svg").exists()
    assert (tmp_path / "o" / "rays.csv").exists()


def test_cutpaste_cli_smoke(tmp_path):
    r = run_cli(["cutpaste", "--a", "1,0", "--b", "1,0", "--resolution", "32",
                 "--rmax", "0.3", "--d-radius", "0.25", "--out", "o"], tmp_path)
    assert r.returncode == 0, r.stderr
    rep = json.loads((tmp_path / "o" / "seam_report.json").read_text())
    assert rep["max_continuity_jump"] < 1e-8 * rep["scale"]
    assert (tmp_path / "o" / "qmesh.csv").exists()
    assert "tangent-plane angle" in r.stdout
