"""File formats: prediction files, score tables, result files, manifests.

Prediction files are JSON Lines, one record per line with fields
``id`` (string), ``label`` (int), ``probs`` (M rows of K probabilities).
Every emitted result gets a sibling ``<name>.manifest.json`` naming its
inputs by content hash; outputs are byte-deterministic for fixed inputs.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .exceptions import DataFormatError
from .simplex import check_prediction_set

MANIFEST_SCHEMA = "epiuq/manifest/1"
MANIFEST_SUFFIX = ".manifest.json"


@dataclass
class PredictionRecord:
    """One sample: identifier, true label, and its M x K prediction set."""

    sample_id: str
    label: int
    probs: np.ndarray


def _canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(result_path) -> Path:
    return Path(str(result_path) + MANIFEST_SUFFIX)


@dataclass
class RunManifest:
    """Provenance sidecar for a result file.

    No timestamps: identity is the tool version, the command, the labels,
    and the content hashes of the inputs, so reruns are byte-identical.
    """

    command: str = ""
    dataset: str = ""
    model: str = ""
    task: str = ""
    run: int = 0
    measures: tuple[str, ...] = ()
    betas: tuple[float, ...] | None = None
    alpha: float | None = None
    seed: int | None = None
    inputs: Mapping[str, str] = field(default_factory=dict)
    tool_version: str = __version__
    schema: str = MANIFEST_SCHEMA

    def to_payload(self) -> dict:
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "command": self.command,
            "dataset": self.dataset,
            "model": self.model,
            "task": self.task,
            "run": self.run,
            "measures": list(self.measures),
            "betas": None if self.betas is None else list(self.betas),
            "alpha": self.alpha,
            "seed": self.seed,
            "inputs": dict(sorted(self.inputs.items())),
        }

    @classmethod
    def from_payload(cls, payload: Mapping) -> "RunManifest":
        if payload.get("schema") != MANIFEST_SCHEMA:
            raise DataFormatError(f"unknown manifest schema {payload.get('schema')!r}")
        return cls(
            command=payload.get("command", ""),
            dataset=payload.get("dataset", ""),
            model=payload.get("model", ""),
            task=payload.get("task", ""),
            run=int(payload.get("run", 0)),
            measures=tuple(payload.get("measures") or ()),
            betas=None if payload.get("betas") is None else tuple(payload["betas"]),
            alpha=payload.get("alpha"),
            seed=payload.get("seed"),
            inputs=dict(payload.get("inputs") or {}),
            tool_version=payload.get("tool_version", ""),
        )

    def write(self, result_path) -> Path:
        path = manifest_path(result_path)
        path.write_text(_canonical_json(self.to_payload()) + "\n")
        return path


def load_manifest(result_path) -> RunManifest:
    path = manifest_path(result_path)
    if not path.exists():
        raise DataFormatError(
            f"result {result_path} has no sibling manifest; results without manifests are invalid"
        )
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"malformed manifest: {exc}", path=str(path)) from None
    return RunManifest.from_payload(payload)


def try_load_manifest(result_path) -> RunManifest | None:
    try:
        return load_manifest(result_path)
    except DataFormatError:
        return None


def write_predictions(path, records: Sequence[PredictionRecord]) -> None:
    lines = []
    for rec in records:
        probs = np.asarray(rec.probs, dtype=float)
        lines.append(
            _canonical_json(
                {
                    "id": str(rec.sample_id),
                    "label": int(rec.label),
                    "probs": [[float(v) for v in row] for row in probs],
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_predictions(path) -> list[PredictionRecord]:
    """Parse and validate a prediction file.

    Rows renormalize when their sum is within 1e-4 of 1 and fail loudly
    otherwise; errors carry the 1-based line number. K must be constant
    across the file; a varying member count M only warns.
    """
    path = Path(path)
    records: list[PredictionRecord] = []
    k_seen: int | None = None
    m_seen: set[int] = set()
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno) from None
            if not isinstance(obj, dict):
                raise DataFormatError("record must be a JSON object", path=str(path), line=lineno)
            missing = {"id", "label", "probs"} - obj.keys()
            if missing:
                raise DataFormatError(f"missing fields {sorted(missing)}", path=str(path), line=lineno)
            try:
                probs = np.asarray(obj["probs"], dtype=float)
            except (TypeError, ValueError):
                raise DataFormatError("probs must be a rectangular numeric array", path=str(path), line=lineno) from None
            if probs.ndim != 2:
                raise DataFormatError(
                    f"probs must be M x K, got shape {probs.shape}", path=str(path), line=lineno
                )
            try:
                probs = check_prediction_set(probs, name="probs")
            except ValueError as exc:
                raise DataFormatError(str(exc), path=str(path), line=lineno) from None
            label = obj["label"]
            if not isinstance(label, int) or isinstance(label, bool):
                raise DataFormatError(f"label must be an integer, got {label!r}", path=str(path), line=lineno)
            if not 0 <= label < probs.shape[1]:
                raise DataFormatError(
                    f"label {label} outside 0..{probs.shape[1] - 1}", path=str(path), line=lineno
                )
            if k_seen is None:
                k_seen = probs.shape[1]
            elif probs.shape[1] != k_seen:
                raise DataFormatError(
                    f"class count changed from {k_seen} to {probs.shape[1]}",
                    path=str(path),
                    line=lineno,
                )
            m_seen.add(probs.shape[0])
            records.append(PredictionRecord(str(obj["id"]), int(label), probs))
    if not records:
        raise DataFormatError("prediction file holds no records", path=str(path))
    if len(m_seen) > 1:
        warnings.warn(
            f"{path}: member count varies across rows ({sorted(m_seen)})",
            stacklevel=2,
        )
    return records


def format_score(value: float) -> str:
    """17 significant digits: lossless float round-trip."""
    return f"{float(value):.17g}"


def write_scores_csv(path, rows: Iterable[tuple[str, str, float]]) -> None:
    """Long-format score table: sample_id,measure,score."""
    lines = ["sample_id,measure,score"]
    for sample_id, measure, value in rows:
        lines.append(f"{sample_id},{measure},{format_score(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_scores_csv(path) -> list[tuple[str, str, float]]:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != "sample_id,measure,score":
        raise DataFormatError("missing sample_id,measure,score header", path=str(path), line=1)
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DataFormatError(f"expected 3 fields, got {len(parts)}", path=str(path), line=lineno)
        try:
            out.append((parts[0], parts[1], float(parts[2])))
        except ValueError:
            raise DataFormatError(f"bad score {parts[2]!r}", path=str(path), line=lineno) from None
    return out


def write_result(path, payload: Mapping) -> None:
    """Canonical JSON result file (sorted keys, no whitespace)."""
    Path(path).write_text(_canonical_json(payload) + "\n")


def read_result(path) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"malformed JSON: {exc}", path=str(path)) from None
    if not isinstance(payload, dict):
        raise DataFormatError("result must be a JSON object", path=str(path))
    return payload
