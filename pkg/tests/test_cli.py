import csv
import json

import numpy as np
import pytest

from gsign.cli import build_parser, bundled_configs, load_config, main

SMALL_SCENARIO = ["--design", "one-sample", "--distribution", "mvg", "--covariance", "AR", "--mean", "dense",
                  "--p", "6", "--n", "10", "--deltas", "0,0.5", "--replications", "8", "--B", "40",
                  "--scaling", "l1", "--seed", "5", "--threads", "1"]


def save(path, X, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        w.writerows(X)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_test_one_json(tmp_path, capsys):
    X = np.random.default_rng(0).normal(size=(15, 4))
    data = save(tmp_path / "x.csv", X)
    code, out, _ = run(["test-one", "--data", data, "--scaling", "l2", "--kernel", "linear",
                        "--B", "1000", "--alpha", "0.05", "--seed", "7"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["B"] == 1000 and d["seed"] == 7 and d["method"] == "rademacher_flip"
    assert 0 < d["p_value"] <= 1


def test_test_one_mu0(tmp_path, capsys):
    X = np.random.default_rng(1).normal(size=(20, 3)) + 100.0
    data = save(tmp_path / "x.csv", X)
    mu0 = save(tmp_path / "mu0.csv", [[100.0, 100.0, 100.0]])
    code, out, _ = run(["test-one", "--data", data, "--B", "200"], capsys)
    assert json.loads(out)["reject"] is True
    code, out, _ = run(["test-one", "--data", data, "--mu0", mu0, "--B", "200"], capsys)
    assert code == 0 and json.loads(out)["p_value"] > 0.01


def test_missing_file(tmp_path, capsys):
    missing = str(tmp_path / "absent.csv")
    code, _, err = run(["test-one", "--data", missing], capsys)
    assert code == 1
    assert "absent.csv" in err


def test_degree_p_preset(tmp_path, capsys):
    X = np.random.default_rng(2).normal(size=(12, 300))
    data = save(tmp_path / "x.csv", X)
    code, out, err = run(["test-one", "--data", data, "--scaling", "l1", "--kernel", "poly", "--a", "4",
                          "--b", "p", "--B", "50"], capsys)
    assert code == 0, err
    code2, out2, _ = run(["test-one", "--data", data, "--scaling", "l1", "--kernel", "poly", "--a", "4",
                          "--b", "300", "--B", "50"], capsys)
    assert out == out2


def test_test_two_files(tmp_path, capsys):
    rng = np.random.default_rng(3)
    a = save(tmp_path / "a.csv", rng.normal(size=(60, 5)))
    b = save(tmp_path / "b.csv", rng.normal(size=(40, 5)))
    code, out, _ = run(["test-two", "--data", a, "--data2", b, "--B", "100"], capsys)
    assert code == 0
    assert json.loads(out)["method"] == "label_permutation"


def test_test_two_quantile(tmp_path, capsys):
    rng = np.random.default_rng(4)
    X = rng.normal(size=(100, 4))
    score = X[:, 0] + 0.1 * rng.normal(size=100)
    data = save(tmp_path / "s.csv", np.column_stack([score, X]), header=["score", "g1", "g2", "g3", "g4"])
    code, out, err = run(["test-two", "--data", data, "--header", "--score-column", "score",
                          "--quantile", "5", "--B", "100"], capsys)
    assert code == 0, err
    assert json.loads(out)["reject"] is True


def test_test_two_label_column(tmp_path, capsys):
    rng = np.random.default_rng(5)
    rows = [[lab, *rng.normal(size=3)] for lab in ["u"] * 8 + ["v"] * 8]
    data = save(tmp_path / "l.csv", rows, header=["cls", "x", "y", "z"])
    code, _, err = run(["test-two", "--data", data, "--header", "--label-column", "cls", "--B", "50"], capsys)
    assert code == 0, err
    one = save(tmp_path / "one.csv", [["u", *rng.normal(size=3)] for _ in range(8)], header=["cls", "x", "y", "z"])
    code, _, err = run(["test-two", "--data", one, "--header", "--label-column", "cls"], capsys)
    assert code == 1 and "2 classes" in err


def test_pairwise_cli(tmp_path, capsys):
    rng = np.random.default_rng(6)
    rows = []
    for k, lab in enumerate("abc"):
        for _ in range(15):
            x = rng.normal(size=5)
            x[k] += 8.0  # each class is shifted along its own axis
            rows.append([lab, *x])
    data = save(tmp_path / "p.csv", rows)
    out_path = tmp_path / "pm.csv"
    code, _, err = run(["pairwise", "--data", data, "--label-column", "0", "--B", "99", "--out", str(out_path)],
                       capsys)
    assert code == 0, err
    body = list(csv.reader(out_path.read_text().splitlines()))
    assert body[0] == ["class", "a", "b", "c"]
    P = np.array([r[1:] for r in body[1:]], dtype=float)
    assert np.all(P[~np.eye(3, dtype=bool)] == 0.01)
    single = save(tmp_path / "single.csv", [["a", 1.0, 2.0], ["a", 3.0, 4.0], ["a", 5.0, 7.0]])
    code, _, _ = run(["pairwise", "--data", single, "--label-column", "0"], capsys)
    assert code == 1


def test_simulate_and_oracle(tmp_path, capsys):
    code, out, err = run(["simulate", *SMALL_SCENARIO, "--oracle", "30"], capsys)
    assert code == 0, err
    rows = list(csv.DictReader(out.splitlines()))
    assert len(rows) == 2
    assert {"delta", "rejections", "replications", "power", "se", "on_power"} <= set(rows[0])
    assert "replicates" in err
    code, out, _ = run(["oracle", *SMALL_SCENARIO, "--S", "12"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "l1/linear" and len(lines) == 13


def test_flag_config_equivalence(tmp_path, capsys):
    cfg = {"design": "one-sample", "distribution": "mvg", "covariance": "AR", "mean": "dense", "p": 6, "n": 10,
           "deltas": [0, 0.5], "replications": 8, "B": 40, "scaling": "l1", "seed": 5, "threads": 1}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    _, by_flags, _ = run(["simulate", *SMALL_SCENARIO], capsys)
    _, by_config, _ = run(["simulate", "--config", str(path)], capsys)
    assert by_flags == by_config
    # flags override file values
    _, overridden, _ = run(["simulate", "--config", str(path), "--scaling", "linf"], capsys)
    assert "linf/linear" in overridden


def test_seed_determinism(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"o{k}.csv"
        assert main(["simulate", *SMALL_SCENARIO, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"replicatoins": 5}))
    code, _, err = run(["simulate", "--config", str(path)], capsys)
    assert code == 1 and "replicatoins" in err


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["test-one", "--B", "many"])
    assert exc.value.code == 1


@pytest.mark.parametrize("command", ["test-one", "test-two", "simulate", "pairwise", "oracle"])
def test_help_lists_defaults(command):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[command]
    text = " ".join(sub.format_help().split())
    assert "--B B" in text and "(default: 1000)" in text
    assert "(default: 0.05)" in text
    assert "auto, n^(-8/p)" in text
    for action in sub._actions:
        if action.option_strings and action.dest not in ("help", "config"):
            assert "default:" in (action.help or ""), action.dest


def test_bundled_configs():
    names = bundled_configs()
    for k in range(1, 5):
        for design in ("onesample", "twosample"):
            assert f"setting{k}_{design}.json" in names
            assert f"setting{k}_{design}_desk.json" in names
    for col in ("table1_dense_sar", "table1_sparse_ar"):
        assert f"{col}.json" in names and f"{col}_desk.json" in names
    full = load_config("setting1_onesample")
    assert full["B"] == 1000 and full["replications"] == 1000
    assert full["deltas"] == [0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12]
    assert load_config("table1_sparse_ar")["oracle"] == 5000


def test_bundled_config_desk_override(capsys):
    # desk-scale override of a bundled config keeps the schema
    code, out, err = run(["simulate", "--config", "setting1_onesample_desk", "--p", "9", "--n", "8",
                          "--replications", "3", "--B", "20", "--deltas", "0.1", "--threads", "1"], capsys)
    assert code == 0, err
    rows = list(csv.DictReader(out.splitlines()))
    assert all(r["replications"] == "3" for r in rows)
    assert len(rows) == len(load_config("setting1_onesample_desk")["tests"])
