import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from imbpegasos import KernelSpec, train_kernel
from imbpegasos.cli import load_model, main, parse_grid

from conftest import ECOLI_CSV

DATA = ["--data", str(ECOLI_CSV), "--target-col", "Class", "--positive-label", "positive"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _strip_timestamp(path):
    doc = json.loads(open(path).read())
    doc["provenance"].pop("timestamp")
    return doc


def test_parse_grid():
    g = parse_grid("linspace:-2:2:10")
    assert len(g) == 10 and g[0] == -2.0 and g[-1] == 2.0
    assert "1.1111" in {f"{v:.4f}" for v in g} and "-0.2222" in {f"{v:.4f}" for v in g}
    assert parse_grid("0.1, 1,10") == [0.1, 1.0, 10.0]


def test_train_and_evaluate_roundtrip(tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["train", *DATA, "--lambda", "0.0001", "--bias", "1.1111", "--check-every", "5",
                 "--output", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("training_auc=") and "iterations_run=" in line
    train_auc = line.split()[0].split("=")[1]
    doc = json.loads(out.read_text())
    assert set(doc) == {"format_version", "model_type", "hyperparameters", "linear", "kernel", "provenance"}
    assert doc["model_type"] == "linear" and doc["kernel"] is None
    assert main(["evaluate", "--model", str(out), *DATA]) == 0
    assert capsys.readouterr().out.strip() == f"test_auc={train_auc}"


def test_saved_model_scores_bit_for_bit(tmp_path, ecoli):
    out = tmp_path / "k.json"
    assert main(["train", *DATA, "--lambda", "0.01", "--kernel", "rbf", "--gamma", "0.5", "--iterations", "300",
                 "--seed", "3", "--output", str(out)]) == 0
    model, doc = load_model(out)
    ref, _ = train_kernel(ecoli, 0.01, KernelSpec("rbf", gamma=0.5), T=300, seed=3)
    assert model.decision_scores(ecoli.X).tobytes() == ref.decision_scores(ecoli.X).tobytes()
    assert doc["model_type"] == "kernel" and doc["linear"] is None


def test_train_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["train", *DATA, "--lambda", "0.01", "--seed", "7", "--output", str(p)]) == 0
    assert _strip_timestamp(a) == _strip_timestamp(b)


def test_seed_from_environment(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("PEGASOS_SEED", "11")
    assert main(["train", *DATA, "--lambda", "0.01", "--output", str(a)]) == 0
    monkeypatch.delenv("PEGASOS_SEED")
    assert main(["train", *DATA, "--lambda", "0.01", "--seed", "11", "--output", str(b)]) == 0
    assert _strip_timestamp(a) == _strip_timestamp(b)
    assert _strip_timestamp(a)["hyperparameters"]["seed"] == 11


@pytest.mark.parametrize(
    "argv",
    [
        ["train", *DATA, "--lambda", "1", "--iterations", "0", "--output", "x.json"],
        ["train", *DATA, "--lambda", "-1", "--output", "x.json"],
        ["train", *DATA, "--output", "x.json"],
        ["train", "--data", "missing.csv", "--target-col", "Class", "--positive-label", "positive",
         "--lambda", "1", "--output", "x.json"],
        ["train", "--data", str(ECOLI_CSV), "--target-col", "nope", "--positive-label", "positive",
         "--lambda", "1", "--output", "x.json"],
        ["cv", *DATA, "--folds", "1", "--output", "cv.csv"],
        ["curves", *DATA, "--type", "validation", "--lambda", "1", "--output", "c.csv"],
        ["evaluate", *DATA],
        ["bogus"],
    ],
)
def test_exit_code_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_single_class_exit_3(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("a,c\n1,neg\n2,neg\n3,neg\n")
    assert main(["train", "--data", str(p), "--target-col", "c", "--positive-label", "pos",
                 "--lambda", "1", "--output", str(tmp_path / "m.json")]) == 3


def test_wrong_dimension_model_exit_2(tmp_path):
    out = tmp_path / "m.json"
    assert main(["train", *DATA, "--lambda", "1", "--iterations", "20", "--output", str(out)]) == 0
    other = tmp_path / "two.csv"
    other.write_text("a,b,c\n1,2,p\n3,4,n\n")
    assert main(["evaluate", "--model", str(out), "--data", str(other), "--target-col", "c",
                 "--positive-label", "p"]) == 2


def test_cv_outputs(tmp_path, capsys):
    out = tmp_path / "cv.csv"
    assert main(["cv", *DATA, "--lambda-grid", "0.0001,0.01", "--bias-grid", "linspace:-2:2:10", "--iterations",
                 "200", "--jobs", "2", "--output", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["lambda", "bias", "stop_x", "fold", "auc"]
    assert len(rows) - 1 == 2 * 10 * 5
    summary = _rows(tmp_path / "cv_summary.csv")
    assert summary[0] == ["lambda", "bias", "stop_x", "mean_auc"] and len(summary) == 21
    assert capsys.readouterr().out.startswith("best lambda=")


def test_curves_learning_and_validation(tmp_path):
    lc = tmp_path / "lc.csv"
    assert main(["curves", *DATA, "--type", "learning", "--lambda", "0.0001", "--bias", "1.1111",
                 "--check-every", "5", "--iterations", "200", "--output", str(lc)]) == 0
    rows = _rows(lc)
    assert rows[0] == ["proportion_or_value", "fold", "train_auc", "cv_auc"] and len(rows) == 26
    vc = tmp_path / "vc.csv"
    assert main(["curves", *DATA, "--type", "validation", "--vary", "bias", "--values", "linspace:-2:2:10",
                 "--lambda", "0.0001", "--iterations", "100", "--output", str(vc)]) == 0
    assert len(_rows(vc)) == 51


def test_curves_too_few_positives_exit_3(tmp_path, capsys):
    assert main(["curves", *DATA, "--type", "learning", "--proportions", "0.05", "--lambda", "0.01",
                 "--output", str(tmp_path / "c.csv")]) == 3
    assert "fewer than 5 folds" in capsys.readouterr().err


def test_evaluate_holdout_with_roc(tmp_path, capsys):
    roc = tmp_path / "roc.csv"
    assert main(["evaluate", *DATA, "--holdout", "0.2", "--lambda", "0.01", "--iterations", "500",
                 "--roc-out", str(roc)]) == 0
    assert capsys.readouterr().out.startswith("test_auc=")
    rows = _rows(roc)
    assert rows[0] == ["fpr", "tpr"]
    pts = np.array(rows[1:], dtype=float)
    assert tuple(pts[0]) == (0.0, 0.0) and tuple(pts[-1]) == (1.0, 1.0)


def test_estimate_stop_modes(tmp_path, capsys):
    outs = {}
    for mode in ("verbatim", "standard"):
        path = tmp_path / f"{mode}.json"
        assert main(["estimate-stop", *DATA, "--lambda", "0.0001", "--bias", "1.1111", "--mode", mode,
                     "--output", str(path)]) == 0
        text = capsys.readouterr().out
        assert "X_selected=" in text and "p_hat=" in text
        outs[mode] = json.loads(path.read_text())
    assert outs["verbatim"]["p_hat"] == outs["standard"]["p_hat"]
    c_v = (outs["verbatim"]["ci_low"] + outs["verbatim"]["ci_high"]) / 2
    c_s = (outs["standard"]["ci_low"] + outs["standard"]["ci_high"]) / 2
    assert c_v != pytest.approx(c_s)


def test_estimate_stop_no_improvement_exit_3(tmp_path):
    p = tmp_path / "flat.csv"
    # identical feature rows: every score ties, the AUC never leaves 0.5
    p.write_text("a,c\n" + "1,p\n" * 5 + "1,n\n" * 20)
    assert main(["estimate-stop", "--data", str(p), "--target-col", "c", "--positive-label", "p",
                 "--lambda", "1", "--iterations", "50"]) == 3


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run(
        [sys.executable, "-m", "imbpegasos", "train", *DATA, "--lambda", "1", "--iterations", "10",
         "--output", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
