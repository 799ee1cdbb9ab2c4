import json

import pytest

from d8tetra.cli import load_config, main
from d8tetra.spectral import SPHERE_Z_LEDGER
from d8tetra.verify import emit_tables, fiber_summary, verify_all


def test_verify_all_passes_every_step():
    report = verify_all(8)
    assert report.ok, report.lines()
    assert report.verdicts == {"sphere-Z": "NoEquivariantMap", "sphere-F2": "Inconclusive",
                               "circle-Z": "Inconclusive"}
    assert [s.name for s in report.steps][:2] == ["cohomology", "pair-homology-sphere"]


def test_verify_all_stops_at_a_bad_ledger():
    from d8tetra.spectral import parse_ledger
    report = verify_all(8, parse_ledger(SPHERE_Z_LEDGER.splitlines()[0]))
    assert not report.ok and report.aborted_at == "ledger"


def test_emit_tables_formats():
    csv_text = emit_tables("sphere-z", "csv", 6)
    assert csv_text.splitlines()[0] == "page,p,q,group,generators"
    assert json.loads(emit_tables("sphere-z", "json", 6))["case"] == "sphere-z"
    assert "E_2" in emit_tables("sphere-z", "ascii", 6)
    with pytest.raises(ValueError):
        emit_tables("sphere-z", "xml")


def test_fiber_summary():
    assert fiber_summary("circle-z")[2] == ["Lambda", "Theta"]


def test_cli_verify_all_json(capsys):
    assert main(["verify-all", "--max-degree", "6", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_cli_cohomology_csv(capsys):
    assert main(["cohomology", "--module", "M", "--max-degree", "3", "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "degree,group" and out[2] == "1,Z/4"


def test_cli_pair_homology(capsys):
    assert main(["pair-homology", "--factor", "sphere"]) == 0
    out = capsys.readouterr().out
    assert "H_2(X,Y): rank 2 ~ N" in out and "euler characteristic: 12" in out


def test_cli_spectral_index(capsys):
    assert main(["spectral", "--case", "sphere-z", "--index"]) == 0
    assert "index: <U^3>" in capsys.readouterr().out


def test_cli_malformed_ledger_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.ledger"
    bad.write_text("page=5 from=(1,4) gen=Lambda to=(5,0) image=U^3 range=i>=0\n")
    assert main(["spectral", "--index", "--ledger", str(bad)]) == 2
    assert "MalformedRule" in capsys.readouterr().err


def test_cli_chern(capsys):
    assert main(["chern", "--rep", "u4xu2"]) == 0
    out = capsys.readouterr().out
    assert "V^1 + V^2" in out and "<2U^2>" in out and "NoEquivariantMap" in out
    assert main(["chern", "--rep", "u4xu2", "--coeff", "f2"]) == 0
    assert "<0>" in capsys.readouterr().out


def test_cli_solve_square_writes_json(tmp_path):
    out = tmp_path / "square.json"
    assert main(["solve-square", "--curve", "ellipse:1,0.6", "--starts", "4", "--format", "json",
                 "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["certified"] and data["seed"] == 42


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 7\n[solve-square]\nstarts = 3\ncurve = circle:2\n")
    assert load_config(str(cfg))["solve-square"]["starts"] == "3"
    assert main(["solve-square", "--config", str(cfg), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["seed"] == 7 and data["starts"] == 3
    assert main(["solve-square", "--config", str(cfg), "--seed", "5", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 5
