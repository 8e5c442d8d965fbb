import json

import numpy as np
import pytest

from relaxdiff.cli import main
from relaxdiff.tableaux import ssp_tableau, tableau_to_dict


def run(args):
    return main(args)


def test_stability_single_scheme(tmp_path, capsys):
    out = tmp_path / "stab"
    code = run(["stability", "--scheme", "ssp(1,1)", "--locus-samples", "64",
                "--out", str(out), "--no-meta"])
    assert code == 0
    report = json.loads((out / "stability_report.json").read_text())
    entry = report["schemes"][0]
    assert entry["lambda_opt"] == pytest.approx(1.0, abs=1e-6)
    assert entry["eta"] == pytest.approx(2.0, abs=1e-6)
    locus = (out / "locus_ssp_1_1.csv").read_text().splitlines()
    assert locus[0] == "theta,re,im"
    assert len(locus) == 65


def test_stability_multiple_schemes_and_svg(tmp_path):
    out = tmp_path / "stab"
    code = run(["stability", "--scheme", "ssp(3,2),ssp(4,2)", "--locus-samples", "64",
                "--svg", "--out", str(out), "--no-meta"])
    assert code == 0
    report = json.loads((out / "stability_report.json").read_text())
    lam = {e["scheme"]: e["lambda_opt"] for e in report["schemes"]}
    assert lam["ssp(3,2)"] == pytest.approx(2.259921, abs=1e-3)
    assert lam["ssp(4,2)"] == pytest.approx(3.0, abs=1e-6)
    svg = (out / "regions.svg").read_text()
    assert svg.startswith("<svg") and "stroke-dasharray" in svg


def test_stability_ssp53(tmp_path):
    out = tmp_path / "s53"
    assert run(["stability", "--scheme", "ssp(5,3)", "--locus-samples", "32",
                "--out", str(out), "--no-meta"]) == 0
    report = json.loads((out / "stability_report.json").read_text())
    assert report["schemes"][0]["lambda_opt"] == pytest.approx(3.106, abs=2e-3)


def test_unknown_scheme_lists_catalog(tmp_path, capsys):
    code = run(["stability", "--scheme", "ssp(9,9)", "--out", str(tmp_path / "x")])
    assert code == 2
    err = capsys.readouterr().err
    assert "error:" in err and "(5,3)" in err


def test_user_tableau_json(tmp_path):
    tab, _ = ssp_tableau(2, 2)
    path = tmp_path / "heun.json"
    path.write_text(json.dumps(tableau_to_dict(tab)))
    out = tmp_path / "out"
    assert run(["stability", "--scheme", str(path), "--locus-samples", "32",
                "--out", str(out), "--no-meta"]) == 0
    report = json.loads((out / "stability_report.json").read_text())
    assert report["schemes"][0]["scheme"] == "heun"
    assert report["schemes"][0]["lambda_ssp"] is None
    assert report["schemes"][0]["lambda_opt"] == pytest.approx(1.0, abs=1e-6)


def test_cfl_table_values(tmp_path):
    out = tmp_path / "cfl"
    assert run(["cfl-table", "--out", str(out), "--no-meta"]) == 0
    data = json.loads((out / "cfl_table.json").read_text())["c1"]
    assert data["pwc"]["ssp(1,1)"] == pytest.approx(2.0, abs=1e-6)
    assert data["pwl"]["ssp(1,1)"] == pytest.approx(0.94, abs=0.02)
    assert data["weno5"]["ssp(3,3)"] == pytest.approx(1.0, abs=0.02)
    text = (out / "cfl_table.txt").read_text()
    assert "pwc" in text and "weno5" in text


def test_run_command(tmp_path):
    out = tmp_path / "run"
    code = run(["run", "--problem", "heat", "--recon", "weno5", "--scheme", "ssp(2,2)",
                "--lambda", "ssp", "--n", "40", "--t-end", "0.01",
                "--out", str(out), "--no-meta"])
    assert code == 0
    data = json.loads((out / "run.json").read_text())
    assert data["stats"]["n_f"] == data["stats"]["steps"] * 2
    assert data["errors"]["l1"] > 0.0
    field = (out / "field.csv").read_text().splitlines()
    assert field[0] == "x,u"
    assert len(field) == 41


def test_run_rejects_unknown_problem(tmp_path, capsys):
    assert run(["run", "--problem", "ice", "--scheme", "ssp(2,2)",
                "--out", str(tmp_path / "x")]) == 2
    assert "barenblatt" in capsys.readouterr().err


def test_convergence_command(tmp_path):
    out = tmp_path / "conv"
    code = run(["convergence", "--schemes", "ssp(2,2)", "--recon", "weno5",
                "--lambda", "opt", "--grids", "20,40,80", "--t-end", "0.02",
                "--out", str(out), "--no-meta"])
    assert code == 0
    data = json.loads((out / "convergence.json").read_text())["results"][0]
    assert data["stages"] == 2
    assert len(data["orders"]) == 2
    assert data["mean_order"] == pytest.approx(4.0, abs=0.5)
    text = (out / "convergence.txt").read_text()
    assert "ssp(2,2)" in text


def test_convergence_rejects_single_grid(tmp_path, capsys):
    code = run(["convergence", "--schemes", "ssp(2,2)", "--grids", "80",
                "--out", str(tmp_path / "x"), "--no-meta"])
    assert code == 2
    assert "3 grids" in capsys.readouterr().err


def test_barenblatt_command(tmp_path):
    out = tmp_path / "bb"
    code = run(["barenblatt", "--m", "2", "--t0", "1", "--recon", "pwc",
                "--scheme", "ssp(1,1)", "--grids", "40,80,160", "--t-end", "0.5",
                "--out", str(out), "--no-meta"])
    assert code == 0
    data = json.loads((out / "barenblatt.json").read_text())
    l1 = [row["l1"] for row in data["grids"]]
    assert l1[0] > l1[1] > l1[2]
    assert all(abs(row["mass_drift"]) < 1e-10 for row in data["grids"])
    assert (out / "barenblatt_field.csv").exists()


def test_outputs_reproducible_with_no_meta(tmp_path):
    """Identical config -> bitwise-identical files when the timestamp is off."""
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert run(["stability", "--scheme", "ssp(3,3)", "--locus-samples", "48",
                    "--out", str(out), "--no-meta"]) == 0
        outs.append((out / "stability_report.json").read_bytes()
                    + (out / "locus_ssp_3_3.csv").read_bytes())
    assert outs[0] == outs[1]


def test_format_filter_restricts_outputs(tmp_path):
    out = tmp_path / "only_json"
    assert run(["cfl-table", "--out", str(out), "--format", "json", "--no-meta"]) == 0
    assert (out / "cfl_table.json").exists()
    assert not (out / "cfl_table.txt").exists()


def test_unknown_format_errors(tmp_path, capsys):
    assert run(["cfl-table", "--out", str(tmp_path / "x"), "--format", "pdf"]) == 2
    assert "unknown format" in capsys.readouterr().err
