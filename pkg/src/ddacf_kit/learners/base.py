"""Shared classifier contract: predict, score, save and load.

Every trained model carries a feature-schema fingerprint and a score
threshold.  ``score_rows`` maps combined design rows (term block then dense
block) to monotone confidence scores where larger means more likely
depressed; a row is labeled depressed exactly when its score exceeds the
model's threshold, so ties resolve to the control class.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..corpus import Label
from ..errors import SchemaMismatch
from ..features import FeatureSet, FeatureVector, _vector_row

FORMAT_VERSION = 1

_REGISTRY: dict[str, type] = {}


def register_model(kind: str):
    def wrap(cls):
        _REGISTRY[kind] = cls
        cls.kind = kind
        return cls
    return wrap


def check_schema(model, schema: str):
    if schema != model.schema:
        raise SchemaMismatch(
            f"model was trained on schema {model.schema}, got {schema}"
        )


def predict(model, fv: FeatureVector) -> tuple[Label, float]:
    """Label and confidence score for a single feature vector."""
    check_schema(model, fv.schema)
    row = _vector_row(fv, model.n_terms)
    score = float(model.score_rows(row.reshape(1, -1))[0])
    label = Label.DEPRESSED if score > model.threshold else Label.CONTROL
    return label, score


def predict_set(model, fs: FeatureSet) -> tuple[list[Label], np.ndarray]:
    """Vectorized labels and scores for a whole feature set."""
    check_schema(model, fs.schema)
    scores = model.score_rows(fs.combined)
    labels = [
        Label.DEPRESSED if s > model.threshold else Label.CONTROL for s in scores
    ]
    return labels, scores


def save_model(model, path) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "schema": model.schema,
        "n_terms": model.n_terms,
        "params": model.to_dict(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_model(path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format {payload.get('format_version')!r}")
    kind = payload["kind"]
    if kind not in _REGISTRY:
        raise ValueError(f"unknown model kind {kind!r}")
    return _REGISTRY[kind].from_dict(
        payload["params"], schema=payload["schema"], n_terms=payload["n_terms"]
    )
