import json

import numpy as np
import pytest

from epiuq import DataFormatError, __version__
from epiuq.dataio import (
    MANIFEST_SCHEMA,
    PredictionRecord,
    RunManifest,
    file_sha256,
    format_score,
    load_manifest,
    load_predictions,
    manifest_path,
    read_result,
    read_scores_csv,
    try_load_manifest,
    write_predictions,
    write_result,
    write_scores_csv,
)


def sample_records():
    return [
        PredictionRecord("a", 0, np.array([[0.2, 0.8], [0.5, 0.5]])),
        PredictionRecord("b", 1, np.array([[0.9, 0.1], [0.7, 0.3]])),
    ]


def test_prediction_roundtrip_preserves_values(tmp_path):
    path = tmp_path / "preds.jsonl"
    write_predictions(path, sample_records())
    back = load_predictions(path)
    assert [r.sample_id for r in back] == ["a", "b"]
    assert [r.label for r in back] == [0, 1]
    assert np.array_equal(back[0].probs, [[0.2, 0.8], [0.5, 0.5]])
    assert np.array_equal(back[1].probs, [[0.9, 0.1], [0.7, 0.3]])


def test_load_predictions_renormalizes_small_drift(tmp_path):
    path = tmp_path / "preds.jsonl"
    row = [0.2 * 1.00005, 0.8 * 1.00005]
    path.write_text(
        json.dumps({"id": "a", "label": 0, "probs": [row, [0.5, 0.5]]}) + "\n"
    )
    rec = load_predictions(path)[0]
    assert abs(rec.probs[0].sum() - 1.0) <= 1e-6


def test_load_predictions_rejects_large_drift_with_line(tmp_path):
    path = tmp_path / "preds.jsonl"
    good = json.dumps({"id": "a", "label": 0, "probs": [[0.5, 0.5]]})
    bad = json.dumps({"id": "c", "label": 0, "probs": [[0.8, 0.4]]})
    path.write_text(good + "\n" + good + "\n" + bad + "\n")
    with pytest.raises(DataFormatError) as err:
        load_predictions(path)
    assert err.value.line == 3


def test_load_predictions_rejects_bad_json_with_line(tmp_path):
    path = tmp_path / "preds.jsonl"
    good = json.dumps({"id": "a", "label": 0, "probs": [[0.5, 0.5]]})
    path.write_text(good + "\n{not json\n")
    with pytest.raises(DataFormatError) as err:
        load_predictions(path)
    assert err.value.line == 2


def test_load_predictions_rejects_missing_fields(tmp_path):
    path = tmp_path / "preds.jsonl"
    path.write_text(json.dumps({"id": "a", "probs": [[0.5, 0.5]]}) + "\n")
    with pytest.raises(DataFormatError) as err:
        load_predictions(path)
    assert "label" in str(err.value)


def test_load_predictions_rejects_label_out_of_range(tmp_path):
    path = tmp_path / "preds.jsonl"
    path.write_text(json.dumps({"id": "a", "label": 2, "probs": [[0.5, 0.5]]}) + "\n")
    with pytest.raises(DataFormatError):
        load_predictions(path)


def test_load_predictions_rejects_class_count_drift(tmp_path):
    path = tmp_path / "preds.jsonl"
    lines = [
        json.dumps({"id": "a", "label": 0, "probs": [[0.5, 0.5]]}),
        json.dumps({"id": "b", "label": 0, "probs": [[0.2, 0.3, 0.5]]}),
    ]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(DataFormatError) as err:
        load_predictions(path)
    assert err.value.line == 2


def test_load_predictions_warns_on_varying_member_count(tmp_path):
    path = tmp_path / "preds.jsonl"
    lines = [
        json.dumps({"id": "a", "label": 0, "probs": [[0.5, 0.5]]}),
        json.dumps({"id": "b", "label": 0, "probs": [[0.5, 0.5], [0.4, 0.6]]}),
    ]
    path.write_text("\n".join(lines) + "\n")
    with pytest.warns(UserWarning):
        recs = load_predictions(path)
    assert len(recs) == 2


def test_load_predictions_rejects_empty_file(tmp_path):
    path = tmp_path / "preds.jsonl"
    path.write_text("")
    with pytest.raises(DataFormatError):
        load_predictions(path)


def test_load_predictions_rejects_ragged_probs(tmp_path):
    path = tmp_path / "preds.jsonl"
    path.write_text(
        json.dumps({"id": "a", "label": 0, "probs": [[0.5, 0.5], [1.0]]}) + "\n"
    )
    with pytest.raises(DataFormatError):
        load_predictions(path)


def test_format_score_round_trips_exactly():
    assert format_score(0.1) == "%.17g" % 0.1
    for value in (0.1, 1.0 / 3.0, 0.7071067811865476, 0.0, 1e-300):
        assert float(format_score(value)) == value


def test_scores_csv_roundtrip_exact(tmp_path):
    path = tmp_path / "scores.csv"
    rows = [
        ("a", "mi", 1.0 / 3.0),
        ("a", "wd", 0.7071067811865476),
        ("b", "mi", 0.0),
    ]
    write_scores_csv(path, rows)
    text = path.read_text()
    assert text.splitlines()[0] == "sample_id,measure,score"
    back = read_scores_csv(path)
    assert back == rows


def test_read_scores_csv_validation(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text("wrong,header,here\n")
    with pytest.raises(DataFormatError):
        read_scores_csv(path)
    path.write_text("sample_id,measure,score\na,mi,notanumber\n")
    with pytest.raises(DataFormatError) as err:
        read_scores_csv(path)
    assert err.value.line == 2


def test_write_result_is_canonical(tmp_path):
    p1 = tmp_path / "r1.json"
    p2 = tmp_path / "r2.json"
    write_result(p1, {"b": 1, "a": [1, 2], "c": {"y": 0, "x": 1}})
    write_result(p2, {"c": {"x": 1, "y": 0}, "a": [1, 2], "b": 1})
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().endswith("\n")
    assert read_result(p1) == {"a": [1, 2], "b": 1, "c": {"x": 1, "y": 0}}


def test_read_result_rejects_non_object(tmp_path):
    path = tmp_path / "r.json"
    path.write_text("[1, 2]\n")
    with pytest.raises(DataFormatError):
        read_result(path)


def test_file_sha256_matches_reference(tmp_path):
    path = tmp_path / "x.bin"
    path.write_bytes(b"abc")
    # sha256("abc"), a published constant
    assert (
        file_sha256(path)
        == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    )


def test_manifest_roundtrip(tmp_path):
    result = tmp_path / "out.csv"
    result.write_text("sample_id,measure,score\n")
    manifest = RunManifest(
        command="quantify",
        dataset="d",
        model="m",
        task="selective",
        run=3,
        measures=("mi", "wd"),
        betas=(0.0, 0.1),
        alpha=0.05,
        seed=9,
        inputs={"preds.jsonl": "00" * 32},
    )
    written = manifest.write(result)
    assert written == manifest_path(result)
    assert written.name == "out.csv.manifest.json"
    back = load_manifest(result)
    assert back == manifest
    assert back.schema == MANIFEST_SCHEMA
    assert back.tool_version == __version__


def test_manifest_payload_has_no_timestamps(tmp_path):
    result = tmp_path / "out.json"
    result.write_text("{}\n")
    RunManifest(command="rank").write(result)
    payload = json.loads(manifest_path(result).read_text())
    assert not any("time" in key or "date" in key for key in payload)


def test_missing_manifest_is_an_error(tmp_path):
    result = tmp_path / "orphan.csv"
    result.write_text("sample_id,measure,score\n")
    with pytest.raises(DataFormatError) as err:
        load_manifest(result)
    assert "manifest" in str(err.value)
    assert try_load_manifest(result) is None


def test_manifest_rejects_unknown_schema(tmp_path):
    result = tmp_path / "out.csv"
    result.write_text("x\n")
    mpath = manifest_path(result)
    mpath.write_text(json.dumps({"schema": "epiuq/manifest/99"}) + "\n")
    with pytest.raises(DataFormatError):
        load_manifest(result)


def test_manifest_writes_are_deterministic(tmp_path):
    r1 = tmp_path / "a.csv"
    r2 = tmp_path / "b.csv"
    r1.write_text("x\n")
    r2.write_text("x\n")
    m = RunManifest(command="quantify", inputs={"f": "aa" * 32})
    m.write(r1)
    m.write(r2)
    assert manifest_path(r1).read_bytes() == manifest_path(r2).read_bytes()
