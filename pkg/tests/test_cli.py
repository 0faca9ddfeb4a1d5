import json
import pathlib
import subprocess
import sys

import pytest

from prismatica.cli import main

CONFIGS = pathlib.Path(__file__).resolve().parents[1] / "configs"


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_homology_of_the_circle_prism(capsys):
    code, rep, _ = _run(capsys, "homology", "--fixture", "circle", "--construction", "P")
    assert code == 0 and rep["ok"] and rep["betti"] == [1, 1]


def test_homology_with_torsion(capsys):
    code, rep, _ = _run(capsys, "homology", "--fixture", "rp2_6")
    assert code == 0
    assert [r["group"] for r in rep["homology"][:2]] == ["Z", "Z/2"]


def test_validate(capsys):
    code, rep, _ = _run(capsys, "validate", "--fixture", "torus7")
    assert code == 0 and rep["ok"] and rep["D"] == 6
    assert rep["generators"][:3] == [7, 21, 14]


def test_validate_complex_file(capsys, tmp_path):
    path = tmp_path / "edge.json"
    path.write_text(json.dumps({"vertices": ["x", "y"], "simplices": [[0, 1]]}))
    code, rep, _ = _run(capsys, "validate", "--input", str(path), "--D", "3")
    assert code == 0 and rep["generators"][:2] == [2, 1]


def test_gauge_check_with_config_file(capsys):
    code, rep, _ = _run(capsys, "gauge", "check", "--fixture", "triangle",
                        "--gauge", str(CONFIGS / "z5.json"))
    assert code == 0 and rep["compatibility"]["ok"] and rep["cocycle"]["ok"]


def test_gauge_transport_with_shipped_name(capsys):
    code, rep, _ = _run(capsys, "gauge", "transport", "--gauge", "s3_tetra", "--samples", "3")
    assert code == 0 and rep["ok"]


def test_broken_gauge_exits_one(capsys, tmp_path):
    doc = json.loads((CONFIGS / "z5.json").read_text())
    doc["values"]["a0,a1,a2"] = {"const": 4}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, rep, _ = _run(capsys, "gauge", "check", "--gauge", str(path))
    assert code == 1 and not rep["ok"]


def test_malformed_json_reports_position(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"group":\n')
    code, rep, err = _run(capsys, "gauge", "check", "--gauge", str(path))
    assert code == 2 and rep is None
    assert f"{path}:2:1" in err


def test_unknown_fixture_exits_two(capsys):
    code, _, err = _run(capsys, "validate", "--fixture", "klein")
    assert code == 2 and "klein" in err


def test_prism_enumerate(capsys):
    code, rep, _ = _run(capsys, "prism", "enumerate", "--fixture", "circle",
                        "--construction", "P", "--deg", "1,0,0")
    assert code == 0 and rep["count"] == 6


def test_classify(capsys):
    code, rep, _ = _run(capsys, "classify", "--gauge", "z5_tetra", "--deg", "1,0,0",
                        "--samples", "2")
    assert code == 0 and rep["ok"]


def test_star_reports_surjectivity_failures(capsys):
    code, rep, _ = _run(capsys, "star", "--fixture", "point")
    assert code == 0 and rep["ok"]
    code, rep, _ = _run(capsys, "star", "--fixture", "interval")
    assert code == 1 and not rep["ok"]


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, rep, _ = _run(capsys, "--output", str(path), "validate", "--fixture", "point")
    assert code == 0 and rep is None
    assert json.loads(path.read_text())["schema"] == 1


def test_bad_thread_count(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("PRISMATICA_THREADS", "0")
    code, _, err = _run(capsys, "suite", "--out", str(tmp_path))
    assert code == 2 and "PRISMATICA_THREADS" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "prismatica", "homology", "--fixture", "point"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["betti"] == [1]


@pytest.mark.parametrize("threads", ["1", "2"])
def test_suite_is_deterministic(monkeypatch, tmp_path, threads):
    monkeypatch.setenv("PRISMATICA_THREADS", threads)
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        main(["suite", "--out", str(out)])
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert runs[0] == runs[1] and len(runs[0]) >= 30
