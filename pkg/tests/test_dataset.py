"""Instance and prediction file IO."""

import json

import pytest

from ludilite import (
    DatasetError,
    Instance,
    Prediction,
    filter_by_length,
    load_instances,
    load_predictions,
    save_instances,
    save_predictions,
)
from ludilite.dataset import description_token_count


def write_lines(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


def test_load_instances_preserves_order(tmp_path):
    path = tmp_path / "inst.jsonl"
    write_lines(
        path,
        [
            {"id": "g1", "query": "q1", "description": "(game)"},
            {"id": "g2", "query": "q2", "description": "(game)", "category": "puzzle"},
        ],
    )
    instances = load_instances(path)
    assert [i.id for i in instances] == ["g1", "g2"]
    assert instances[1].category == "puzzle"


def test_duplicate_id_rejected(tmp_path):
    path = tmp_path / "inst.jsonl"
    write_lines(
        path,
        [
            {"id": "g1", "query": "", "description": "x"},
            {"id": "g1", "query": "", "description": "y"},
        ],
    )
    with pytest.raises(DatasetError, match="duplicate id 'g1'"):
        load_instances(path)


def test_missing_description_reports_line(tmp_path):
    path = tmp_path / "inst.jsonl"
    write_lines(path, [{"id": "g1", "query": "", "description": "x"}, {"id": "g2"}])
    with pytest.raises(DatasetError, match="description.*:2"):
        load_instances(path)


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "inst.jsonl"
    path.write_text('{"id": "g1", "description": "x"}\nnot json\n', encoding="utf-8")
    with pytest.raises(DatasetError, match="malformed record"):
        load_instances(path)


def test_instances_roundtrip(tmp_path, corpus):
    path = tmp_path / "out.jsonl"
    save_instances(corpus, path)
    assert load_instances(path) == corpus


def test_predictions_roundtrip(tmp_path):
    path = tmp_path / "pred.jsonl"
    predictions = [Prediction("g1", "0", "(game)"), Prediction("g1", "1", "(game")]
    save_predictions(predictions, path)
    assert load_predictions(path) == predictions


def test_duplicate_prediction_key_rejected(tmp_path):
    path = tmp_path / "pred.jsonl"
    write_lines(
        path,
        [
            {"id": "g1", "seed": "0", "candidate": "a"},
            {"id": "g1", "seed": "0", "candidate": "b"},
        ],
    )
    with pytest.raises(DatasetError, match="duplicate"):
        load_predictions(path)


def test_numeric_seed_label_normalized(tmp_path):
    path = tmp_path / "pred.jsonl"
    write_lines(path, [{"id": "g1", "seed": 3, "candidate": "a"}])
    assert load_predictions(path)[0].seed == "3"


def test_filter_by_length():
    short = Instance("s", "", "(a b)")
    long = Instance(
        "l", "", "(" + " x" * 501 + ")"
    )
    kept = filter_by_length([short, long], max_units=500)
    assert kept == [short]
    assert filter_by_length([short, long], max_units=0) == []


def test_filter_idempotent(corpus):
    once = filter_by_length(corpus, 500)
    assert filter_by_length(once, 500) == once
    assert once == corpus  # the shipped corpus is under the limit


def test_token_count_tolerates_garbage():
    assert description_token_count('(a "unterminated') == 2
