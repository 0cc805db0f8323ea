import json
import subprocess
import sys

import numpy as np
import pytest

from uwbnlos import io as uio
from uwbnlos.cli import main


@pytest.fixture
def data(tmp_path):
    path = tmp_path / "data.csv"
    assert main(["simulate", "--n-los", "300", "--n-nlos", "40", "--seed", "5", "-o", str(path)]) == 0
    return path


@pytest.fixture
def feats(tmp_path, data):
    path = tmp_path / "feat.csv"
    assert main(["features", str(data), "-o", str(path)]) == 0
    return path


def test_simulate(data):
    ds = uio.load_dataset(data)
    assert len(ds) == 340 and int((ds.labels() == 1).sum()) == 40


def test_simulate_deterministic(tmp_path, data):
    again = tmp_path / "again.csv"
    main(["simulate", "--n-los", "300", "--n-nlos", "40", "--seed", "5", "-o", str(again)])
    assert again.read_bytes() == data.read_bytes()


def test_simulate_from_config(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[scenario]\nn_los = 30\nn_nlos = 5\nseed = 2\n")
    out = tmp_path / "d.csv"
    assert main(["simulate", "-c", str(cfg), "-o", str(out)]) == 0
    assert len(uio.load_dataset(out)) == 35


def test_features(feats):
    t = uio.load_features(feats)
    assert t.names == ("first_path_power", "power_difference", "range_variance")
    assert t.X.shape == (340, 3) and t.window == 20


def test_features_selection(tmp_path, data):
    out = tmp_path / "f.csv"
    assert main(["features", str(data), "-o", str(out), "--select", "distance_error", "--window", "5"]) == 0
    t = uio.load_features(out)
    assert t.names == ("distance_error",) and t.window == 5


def test_features_unknown_name(tmp_path, data):
    assert main(["features", str(data), "-o", str(tmp_path / "f.csv"), "--select", "nope"]) == 1


def test_fit_and_classify(tmp_path, data, feats, capsys):
    model = tmp_path / "m.txt"
    assert main(["fit", str(feats), "-o", str(model), "--family", "ggd", "--validation", str(feats)]) == 0
    assert "selected epsilon" in capsys.readouterr().out
    m = uio.load_model(model)
    assert m.family == "ggd" and m.epsilon is not None
    out, scores = tmp_path / "pred.csv", tmp_path / "scores.csv"
    assert main(["classify", str(model), str(data), "-o", str(out), "--scores", str(scores)]) == 0
    pred = uio.load_dataset(out).labels()
    truth = uio.load_dataset(data).labels()
    assert np.mean(pred == truth) > 0.9
    lines = scores.read_text().splitlines()
    assert lines[0] == "index,score,predicted_label" and len(lines) == 341


def test_fit_explicit_epsilon(tmp_path, feats):
    model = tmp_path / "m.txt"
    assert main(["fit", str(feats), "-o", str(model), "--family", "gd", "--epsilon", "-12.5"]) == 0
    assert uio.load_model(model).epsilon == -12.5


def test_classify_without_epsilon(tmp_path, data, feats):
    model = tmp_path / "m.txt"
    main(["fit", str(feats), "-o", str(model)])
    out = tmp_path / "p.csv"
    assert main(["classify", str(model), str(data), "-o", str(out)]) == 1
    assert main(["classify", str(model), str(data), "-o", str(out), "--epsilon", "-10"]) == 0


def test_train_nb_and_classify(tmp_path, data, feats):
    model = tmp_path / "nb.txt"
    assert main(["train-nb", str(feats), "-o", str(model)]) == 0
    out = tmp_path / "p.csv"
    assert main(["classify", str(model), str(data), "-o", str(out)]) == 0
    assert np.mean(uio.load_dataset(out).labels() == uio.load_dataset(data).labels()) > 0.9


def test_evaluate(tmp_path, capsys):
    cfg = tmp_path / "e.ini"
    cfg.write_text("[scenario]\nseed = 1\n[experiment]\nsplit_seed = 2\n")
    rep = tmp_path / "r.json"
    assert main(["evaluate", "-c", str(cfg), "-o", str(rep)]) == 0
    out = capsys.readouterr().out
    for name in ("naive_bayes", "gd_anomaly", "ggd_anomaly"):
        assert name in out
    report = uio.load_report(rep)
    assert report["scenario"]["seed"] == 1


def test_evaluate_dataset(tmp_path, data):
    rep = tmp_path / "r.json"
    assert main(["evaluate", "--dataset", str(data), "-o", str(rep)]) == 0
    assert json.loads(rep.read_text())["dataset"]["rows"] == 340


def test_plotdata(tmp_path, data):
    out = tmp_path / "plot.txt"
    assert main(["plotdata", str(data), "-o", str(out), "--class", "los", "--bins", "25"]) == 0
    parsed = uio.parse_plot_data(out.read_text())
    assert parsed["histogram"].shape == (25, 2) and parsed["curves"].shape == (512, 3)


def test_help(capsys):
    assert main(["help"]) == 0
    assert "simulate" in capsys.readouterr().out
    assert main(["help", "fit"]) == 0
    assert "--family" in capsys.readouterr().out
    assert main(["help", "nosuch"]) == 1


def test_usage_errors():
    assert main([]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["fit", "x.csv", "-o", "m", "--family", "t"])
    assert exc.value.code == 1


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n")
    assert main(["features", str(bad), "-o", str(tmp_path / "f.csv")]) == 2
    assert main(["features", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "f.csv")]) == 2
    model = tmp_path / "m.txt"
    model.write_text("uwbnlos-model\nversion 1\n")
    assert main(["classify", str(model), str(bad), "-o", str(tmp_path / "o.csv")]) == 2


def test_degenerate_fit_exit_code(tmp_path):
    feats = tmp_path / "flat.csv"
    rows = "\n".join(f"{i},1.0,0" for i in range(10))
    feats.write_text("# uwbnlos-features version=1 window=20\nindex,first_path_power,label\n" + rows + "\n")
    assert main(["fit", str(feats), "-o", str(tmp_path / "m.txt")]) == 3


def test_prf_needs_offset(tmp_path, data):
    out = tmp_path / "f.csv"
    assert main(["features", str(data), "-o", str(out), "--prf", "64"]) == 1
    assert main(["features", str(data), "-o", str(out), "--prf", "64", "--power-offset", "121.74"]) == 0


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "uwbnlos", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "uwbnlos 0.1.0" in res.stdout
