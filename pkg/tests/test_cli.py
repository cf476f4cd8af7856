import json

import numpy as np
import pytest

from rchm.cli import main
from rchm.model import ModelParams

PARAMS = ModelParams(0.7, 0.2, 3e-4, 800.0, 800.0, 1.0)


@pytest.fixture
def params_file(tmp_path):
    p = tmp_path / "params.json"
    p.write_text(PARAMS.to_json())
    return p


def header(path):
    return path.read_text().splitlines()[0]


def test_generate_outputs_and_determinism(tmp_path, params_file):
    for name in ("a", "b"):
        assert main(["generate", "--params", str(params_file), "--seed", "5",
                     "--out", str(tmp_path / name)]) == 0
    a, b = tmp_path / "a", tmp_path / "b"
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    assert header(a / "instance.csv") == "side,position,mark"
    assert header(a / "edges.csv") == "p_index,p_prime_index"
    assert header(a / "complex.csv") == "dim,v0,...,vm,witness_count"
    assert header(a / "degree_Delta0_value_counts.csv") == "value,count"
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["format_version"] == 1
    assert "edges.csv" in manifest["outputs"]


def test_generate_without_p_prime(tmp_path):
    p = tmp_path / "params.json"
    p.write_text(ModelParams(0.7, 0.2, 3e-4, 100.0, 0.0, 1.0).to_json())
    assert main(["generate", "--params", str(p), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "complex.csv").read_text() == "dim,v0,...,vm,witness_count\n"
    assert (tmp_path / "o" / "edges.csv").read_text() == "p_index,p_prime_index\n"


def test_ensemble_files(tmp_path, params_file):
    out = tmp_path / "ens"
    assert main(["ensemble", "--params", str(params_file), "--reps", "4", "--out", str(out),
                 "--x-min", "5", "10"]) == 0
    rows = np.genfromtxt(out / "replications.csv", delimiter=",", names=True)
    assert len(rows) == 4 and "betti1" in rows.dtype.names
    assert header(out / "edges_qq.csv") == "theoretical,empirical"
    assert header(out / "degree_exponents_boxplot.csv") == "kind,x_min,min,q1,median,q3,max,n,theory"
    box = (out / "degree_exponents_boxplot.csv").read_text().splitlines()
    assert len(box) == 1 + 3 * 2


def test_ensemble_single_replication_is_degenerate(tmp_path, params_file):
    out = tmp_path / "one"
    assert main(["ensemble", "--params", str(params_file), "--reps", "1", "--statistic", "edges",
                 "--out", str(out)]) == 0
    assert json.loads((out / "edges_summary.json").read_text())["degenerate"] is True


def test_ensemble_independent_of_workers(tmp_path, params_file):
    for w in ("1", "2"):
        main(["ensemble", "--params", str(params_file), "--reps", "3", "--statistic", "edges",
              "triangles", "--workers", w, "--out", str(tmp_path / w)])
    for f in ("replications.csv", "manifest.json", "edges_qq.csv"):
        assert (tmp_path / "1" / f).read_bytes() == (tmp_path / "2" / f).read_bytes()


def test_palm_command(tmp_path, params_file):
    out = tmp_path / "palm"
    assert main(["palm", "--params", str(params_file), "--samples", "5000", "--out", str(out)]) == 0
    fit = json.loads((out / "fit.json").read_text())
    assert fit["theoretical_pdf_exponent"] == pytest.approx(2.4286, abs=1e-4)
    assert len((out / "degrees.txt").read_text().split()) == 5000


def test_palm_too_few_samples_exits_numeric(tmp_path, params_file, capsys):
    code = main(["palm", "--params", str(params_file), "--samples", "10", "--out", str(tmp_path)])
    assert code == 3
    assert "x_min" in capsys.readouterr().err


def test_missing_params_exits_input(tmp_path):
    assert main(["generate", "--params", str(tmp_path / "no.json"), "--out", str(tmp_path)]) == 2


def test_ingest_command(tmp_path):
    data = tmp_path / "inc.csv"
    data.write_text("author_id,document_id\n" + "".join(
        f"{a},{d}\n" for a, d in [("a", 1), ("b", 1), ("c", 1), ("c", 2), ("d", 2), ("a", 3), ("d", 3)]
    ))
    out = tmp_path / "ing"
    assert main(["ingest", "--data", str(data), "--out", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())
    assert (s["n_authors"], s["n_documents"], s["components"]) == (4, 3, 1)
    assert header(out / "diagram.csv") == "birth,death,dimension"
    assert (out / "authors.txt").read_text() == "a\nb\nc\nd\n"


def test_ingest_bad_file_exits_input(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("who,what\n")
    assert main(["ingest", "--data", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_calibrate_command(tmp_path):
    from rchm.calibrate import forward_summary

    s = forward_summary(ModelParams(0.73, 0.22, 1e-6, 2e5, 2e5))
    path = tmp_path / "summary.json"
    path.write_text(s.to_json())
    assert main(["calibrate", "--summary", str(path), "--out", str(tmp_path / "c")]) == 0
    got = ModelParams.from_json((tmp_path / "c" / "params.json").read_text())
    assert got.beta == pytest.approx(1e-6, rel=1e-6)


def test_calibrate_infeasible_exits_input(tmp_path):
    path = tmp_path / "summary.json"
    path.write_text(json.dumps({"n_authors": 10, "n_documents": 20, "n_incidences": 15,
                                "gamma": 0.5, "gamma_prime": 0.2}))
    assert main(["calibrate", "--summary", str(path), "--out", str(tmp_path / "c")]) == 2


def test_fit_test_with_summary(tmp_path):
    from rchm.calibrate import forward_summary

    d = json.loads(forward_summary(ModelParams(0.7, 0.2, 2e-4, 600.0, 600.0)).to_json())
    d["observed"] = {"edges": 400, "triangles": 300}
    path = tmp_path / "summary.json"
    path.write_text(json.dumps(d))
    out = tmp_path / "ft"
    assert main(["fit-test", "--summary", str(path), "--reps", "40", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert set(report["tests"]) == {"edges", "triangles"}
    t = report["tests"]["edges"]
    assert set(t) >= {"dataset_value", "alpha", "skew", "location", "scale", "p_value", "n_reps"}
    assert t["alpha"] == pytest.approx(1 / 0.7) and t["skew"] == 1.0
    assert 0.0 <= t["p_value"] <= 1.0


def test_fit_test_needs_gammas(tmp_path):
    path = tmp_path / "summary.json"
    path.write_text(json.dumps({"n_authors": 10, "n_documents": 20, "n_incidences": 50,
                                "observed": {"edges": 3}}))
    assert main(["fit-test", "--summary", str(path), "--out", str(tmp_path / "o")]) == 2
