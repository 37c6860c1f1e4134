import csv
import io
import re

import pytest

from lccde_toolkit.cli import build_configs, main
from lccde_toolkit.core import Dataset
from lccde_toolkit.ensemble import ArbitrationBranch
from lccde_toolkit.io.file import to_numeric_csv
from lccde_toolkit.io.model_file import load_model
from lccde_toolkit.logger import pkg_root

from .conftest import make_blobs

FAST = [
    "--folds",
    "3",
    "--param",
    "all.rounds=5",
    "--param",
    "all.max_depth=3",
    "--param",
    "all.max_leaves=8",
]


@pytest.fixture(autouse=True)
def restore_log_level():
    level = pkg_root.level
    yield
    pkg_root.setLevel(level)


@pytest.fixture
def blob_csv(tmp_path):
    path = tmp_path / "blobs.csv"
    to_numeric_csv(make_blobs(150, n_classes=3, spread=0.5, seed=0), path)
    return path


@pytest.fixture
def model_path(tmp_path, blob_csv, capsys):
    path = tmp_path / "model.json"
    assert main(["train", "--data", str(blob_csv), "--out", str(path), *FAST]) == 0
    capsys.readouterr()
    return path


def _rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def test_train_prints_leader_table(tmp_path, blob_csv, capsys):
    out = tmp_path / "model.json"
    code = main(["train", "--data", str(blob_csv), "--out", str(out), *FAST])
    captured = capsys.readouterr()
    assert code == 0
    assert out.exists()
    lines = captured.out.splitlines()
    assert lines[0].split() == [
        "class",
        "leader",
        "f1",
        "goss_leafwise",
        "f1",
        "depthwise",
        "f1",
        "oblivious",
    ]
    # rows follow the model's class order, which is first appearance in the file
    class_names = load_model(out).class_names
    assert sorted(class_names) == ["class0", "class1", "class2"]
    assert [line.split()[0] for line in lines[2:5]] == list(class_names)
    assert "cross-validation training time:" in captured.out


def test_evaluate_on_training_data(model_path, blob_csv, capsys):
    code = main(["evaluate", "--model", str(model_path), "--data", str(blob_csv)])
    out = capsys.readouterr().out
    assert code == 0
    accuracy = float(re.search(r"^accuracy: (\S+)$", out, re.MULTILINE).group(1))
    assert accuracy >= 0.99
    assert "true \\ predicted" in out
    assert "prediction time:" in out
    assert "all_different_confidence" in out


def test_predict_unlabeled(model_path, tmp_path, capsys):
    data = tmp_path / "unlabeled.csv"
    to_numeric_csv(
        Dataset(make_blobs(5, seed=9).features, None, ["x0", "x1"], []), data
    )
    code = main(["predict", "--model", str(model_path), "--data", str(data)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[0] == "row,class,confidence"
    rows = _rows(out)
    assert [row["row"] for row in rows] == ["0", "1", "2", "3", "4"]
    assert all(row["class"] in {"class0", "class1", "class2"} for row in rows)
    assert all(0 < float(row["confidence"]) <= 1 for row in rows)


def test_predict_ignores_labels(model_path, blob_csv, capsys):
    code = main(["predict", "--model", str(model_path), "--data", str(blob_csv), "--trace"])
    out = capsys.readouterr().out
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 150
    assert list(rows[0]) == [
        "row",
        "class",
        "confidence",
        "branch",
        "goss_leafwise",
        "depthwise",
        "oblivious",
    ]
    branches = {branch.value for branch in ArbitrationBranch}
    assert all(row["branch"] in branches for row in rows)


def test_predict_empty_input(model_path, write_text, capsys):
    data = write_text("empty.csv", "x0,x1\n")
    code = main(["predict", "--model", str(model_path), "--data", str(data)])
    assert code == 0
    assert capsys.readouterr().out == "row,class,confidence\n"


def test_predict_zero_byte_input(model_path, write_text, capsys):
    data = write_text("zero.csv", "")
    code = main(["predict", "--model", str(model_path), "--data", str(data)])
    assert code == 0
    assert capsys.readouterr().out == "row,class,confidence\n"


@pytest.mark.parametrize(
    "extra",
    [
        ["--folds", "1"],
        ["--param", "all.rounds=abc"],
        ["--param", "bogus.rounds=3"],
        ["--param", "all.nope=1"],
        ["--param", "rounds=3"],
        ["--param", "all.rounds=0"],
    ],
)
def test_train_bad_flags(tmp_path, blob_csv, extra, capsys):
    out = tmp_path / "model.json"
    assert main(["train", "--data", str(blob_csv), "--out", str(out), *extra]) == 2
    assert "usage:" in capsys.readouterr().err
    assert not out.exists()


def test_train_requires_out(blob_csv, capsys):
    assert main(["train", "--data", str(blob_csv)]) == 2
    assert "--out" in capsys.readouterr().err


def test_no_command(capsys):
    assert main([]) == 2


def test_train_single_class_is_a_training_error(tmp_path, write_text, capsys):
    data = write_text("one.csv", "x,label\n" + "".join(f"{i},a\n" for i in range(10)))
    code = main(["train", "--data", str(data), "--out", str(tmp_path / "m.json"), *FAST])
    assert code == 4
    assert "degenerate labels" in capsys.readouterr().err


def test_evaluate_unknown_class(model_path, write_text, capsys):
    data = write_text("other.csv", "x0,x1,label\n0,0,class0\n1,1,martian\n")
    assert main(["evaluate", "--model", str(model_path), "--data", str(data)]) == 3
    assert "'martian'" in capsys.readouterr().err


def test_evaluate_feature_mismatch(model_path, write_text, capsys):
    data = write_text("wide.csv", "x0,x1,x2,label\n0,0,0,class0\n1,1,1,class1\n")
    assert main(["evaluate", "--model", str(model_path), "--data", str(data)]) == 3
    assert "expected 2 features, got 3" in capsys.readouterr().err


def test_missing_data_file(model_path, tmp_path, capsys):
    missing = tmp_path / "missing.csv"
    assert main(["evaluate", "--model", str(model_path), "--data", str(missing)]) == 3
    assert capsys.readouterr().err.startswith("error:")


def test_corrupt_model_file(model_path, blob_csv, capsys):
    model_path.write_text(model_path.read_text()[:100])
    assert main(["evaluate", "--model", str(model_path), "--data", str(blob_csv)]) == 3
    assert "Could not parse model file" in capsys.readouterr().err


def test_split(tmp_path, blob_csv, capsys):
    train, test = tmp_path / "train.csv", tmp_path / "test.csv"
    code = main(
        [
            "split",
            "--data",
            str(blob_csv),
            "--test-fraction",
            "0.2",
            "--train-out",
            str(train),
            "--test-out",
            str(test),
        ]
    )
    assert code == 0
    assert capsys.readouterr().out == (
        f"train: 120 rows -> {train}\ntest: 30 rows -> {test}\n"
    )
    assert len(_rows(train.read_text())) == 120
    assert len(_rows(test.read_text())) == 30


@pytest.mark.parametrize("fraction", ["0", "1", "x"])
def test_split_bad_fraction(tmp_path, blob_csv, fraction):
    args = ["split", "--data", str(blob_csv), "--test-fraction", fraction]
    args += ["--train-out", str(tmp_path / "a"), "--test-out", str(tmp_path / "b")]
    assert main(args) == 2


def test_can_hex_training(tmp_path, write_text, capsys):
    lines = []
    for index in range(30):
        lines.append(f"{index}.0,0316,8,05,21,68,09,21,21,00,{index % 4:02x},R")
        lines.append(f"{index}.5,0000,8,00,00,00,00,00,00,00,{index % 4:02x},T")
    data = write_text("can.csv", "\n".join(lines) + "\n")
    out = tmp_path / "model.json"
    args = ["train", "--data", str(data), "--format", "can-hex", "--out", str(out)]
    assert main([*args, *FAST]) == 0
    table = capsys.readouterr().out
    assert [line.split()[0] for line in table.splitlines()[2:4]] == ["R", "T"]


def test_build_configs():
    configs = build_configs(
        [("all", "rounds", 7), ("depthwise", "max_depth", 2)], seed=3
    )
    assert [config.rounds for config in configs] == [7, 7, 7]
    assert [config.max_depth for config in configs] == [6, 2, 6]
    assert all(config.seed == 3 for config in configs)
