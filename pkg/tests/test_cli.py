import csv
import json
from pathlib import Path

import numpy as np
import pytest

from grayscale.cli import main
from grayscale.inventory import load_inventory
from grayscale.labels import build_label, is_simplex
from grayscale.resources import bundled_path

ROOT = Path(__file__).resolve().parents[1]
CONFIG = str(ROOT / "configs" / "toy.cfg")


def run(*args):
    return main(list(args))


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


def read_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines()]


def test_build_labels_category_matches_hand_table(out, capsys):
    assert run("build-labels", "--config", CONFIG, "--method", "category", "-o", str(out)) == 0
    hand = {
        "joy": [2 / 3, 1 / 3, 0, 0],
        "excited": [1 / 3, 2 / 3, 0, 0],
        "sad": [0, 0, 2 / 3, 1 / 3],
        "angry": [0, 0, 1 / 3, 2 / 3],
    }
    gold = {}
    for line in bundled_path("toy_train.jsonl").read_text().splitlines():
        rec = json.loads(line)
        gold.setdefault(rec["dialogue_id"], []).append(rec["emotion"])
    rows = read_jsonl(out / "labels.jsonl")
    assert len(rows) == 40
    for row in rows:
        did, turn = row["sample_id"].split(":")
        assert row["method"] == "category"
        np.testing.assert_allclose(row["probs"], hand[gold[did][int(turn)]], atol=1e-9)
    assert "mean_entropy" in capsys.readouterr().out


def test_build_labels_one_hot(out):
    assert run("build-labels", "--config", CONFIG, "--method", "one-hot", "-o", str(out)) == 0
    for row in read_jsonl(out / "labels.jsonl"):
        assert sorted(row["probs"]) == [0, 0, 0, 1]


def test_build_labels_word_embedding_simplex(out):
    assert run("build-labels", "--config", CONFIG, "--method", "word-embedding", "-o", str(out)) == 0
    for row in read_jsonl(out / "labels.jsonl"):
        assert is_simplex(row["probs"])


@pytest.mark.parametrize("method", ["self", "self-adjust", "future-self-adjust"])
def test_self_methods_need_teacher(out, capsys, method):
    assert run("build-labels", "--config", CONFIG, "--method", method, "-o", str(out)) == 2
    assert "teacher" in capsys.readouterr().err


def test_teacher_params_route_equals_logits_route(out):
    assert run("train-teacher", "--config", CONFIG, "-o", str(out / "t")) == 0
    assert run("build-labels", "--config", CONFIG, "-o", str(out / "a"), "--teacher-logits", str(out / "t" / "teacher_logits.jsonl")) == 0
    assert run("build-labels", "--config", CONFIG, "-o", str(out / "b"), "--teacher", str(out / "t" / "teacher_params.json")) == 0
    a, b = read_jsonl(out / "a" / "labels.jsonl"), read_jsonl(out / "b" / "labels.jsonl")
    for ra, rb in zip(a, b):
        assert ra["sample_id"] == rb["sample_id"]
        np.testing.assert_allclose(ra["probs"], rb["probs"], atol=1e-7)


def test_future_teacher_on_single_turn_dialogues(tmp_path):
    corpus = tmp_path / "single.jsonl"
    lines = [
        {"dialogue_id": f"d{i}", "speaker": "A", "text": text, "emotion": emo}
        for i, (text, emo) in enumerate([("so glad", "joy"), ("wow amazing", "excited"), ("i miss you", "sad"), ("i hate it", "angry")])
    ]
    corpus.write_text("".join(json.dumps(r) + "\n" for r in lines))
    for ft in ("0", "2"):
        assert run("train-teacher", "--config", CONFIG, "--train", str(corpus), "--future-turns", ft, "-o", str(tmp_path / ft)) == 0
    assert (tmp_path / "0" / "teacher_logits.jsonl").read_bytes() == (tmp_path / "2" / "teacher_logits.jsonl").read_bytes()


def test_missing_corpus_is_config_error(tmp_path):
    assert run("train-teacher", "--config", CONFIG, "--train", str(tmp_path / "nope.jsonl"), "-o", str(tmp_path)) == 2


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"dialogue_id": "d", "speaker": "A", "text": "hi", "emotion": "bliss"}) + "\n")
    assert run("train-teacher", "--config", CONFIG, "--train", str(bad), "-o", str(tmp_path)) == 3
    assert "bliss" in capsys.readouterr().err


def test_train_student_outputs_and_eval(out):
    assert run("train-student", "--config", CONFIG, "--method", "category", "-o", str(out)) == 0
    for name in ("student_params.json", "eval_dev.json", "eval_test.json", "predictions_test.jsonl", "confusion_test.png", "train_log.csv"):
        assert (out / name).exists(), name
    report = json.loads((out / "eval_test.json").read_text())
    assert set(report) == {"weighted_f1", "macro_f1", "micro_f1", "excluded", "per_class", "confusion"}
    assert run("eval", "--config", CONFIG, "-o", str(out)) == 0
    again = json.loads((out / "eval_report.json").read_text())
    assert again["confusion"] == report["confusion"]
    assert (out / "confusion.png").read_bytes()[:4] == b"\x89PNG"


def test_train_student_with_custom_inventory(tmp_path):
    inv = load_inventory(bundled_path("toy_inventory.json")).to_dict()
    inv_path = tmp_path / "inv.json"
    inv_path.write_text(json.dumps(inv))
    assert run("train-student", "--config", CONFIG, "--inventory", str(inv_path), "--method", "category", "--epochs", "5", "-o", str(tmp_path / "o")) == 0


def test_train_student_with_labels_file(out):
    assert run("build-labels", "--config", CONFIG, "--method", "category", "-o", str(out)) == 0
    assert run("train-student", "--config", CONFIG, "--labels", str(out / "labels.jsonl"), "--epochs", "10", "-o", str(out / "a")) == 0
    assert run("train-student", "--config", CONFIG, "--method", "category", "--epochs", "10", "-o", str(out / "b")) == 0
    assert (out / "a" / "predictions_test.jsonl").read_text() == (out / "b" / "predictions_test.jsonl").read_text()


def test_exclude_class_flag(out):
    assert run("train-student", "--config", CONFIG, "--method", "category", "--epochs", "5", "--exclude-class", "joy", "-o", str(out)) == 0
    assert json.loads((out / "eval_test.json").read_text())["excluded"] == ["joy"]


def test_alpha_sweep(out, capsys):
    assert run("alpha-sweep", "--config", CONFIG, "--method", "category", "--alphas", "1", "0", "--epochs", "20", "-o", str(out)) == 0
    rows = list(csv.DictReader((out / "alpha_sweep.csv").open()))
    assert [r["alpha"] for r in rows] == ["1", "0"]
    assert (out / "alpha_sweep.png").exists()
    # the alpha = 0 row is the plain baseline
    assert run("train-student", "--config", CONFIG, "--alpha", "0", "--epochs", "20", "-o", str(out / "base")) == 0
    base = json.loads((out / "base" / "eval_test.json").read_text())["weighted_f1"]
    assert float(rows[1]["test_weighted_f1"]) == pytest.approx(base, abs=1e-8)


def test_alpha_sweep_needs_two_values(out):
    assert run("alpha-sweep", "--config", CONFIG, "--method", "category", "--alphas", "1", "-o", str(out)) == 2
