"""Evaluation: confusion matrices, metrics, ROC/AUC, stratified k-fold CV.

The depressed class is positive throughout.  Cross-validation pools the
per-fold confusion matrices and scores for the headline metrics and ROC
curve, and keeps a per-fold breakdown.  Undefined precision or recall
(zero denominator) is reported as 0 together with an explicit flag.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, Label
from .errors import LengthMismatch, OneClassOnly, TooFewExamples
from .features import FeatureConfig
from .learners import predict_set, train_dt, train_nb, train_svm
from .pipeline import DEFAULT_SPARSE_THRESHOLD, FeaturePipeline, PreparedCorpus
from .resources import Resources, default_resources

__all__ = [
    "ConfusionMatrix",
    "MetricValues",
    "FoldReport",
    "MetricsReport",
    "ModelSpec",
    "model_spec",
    "MODEL_KINDS",
    "confusion",
    "metrics",
    "roc_auc",
    "stratified_folds",
    "cross_validate",
    "run_cv",
    "run_holdout",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_table(self) -> list[list[int]]:
        return [[self.tn, self.fp], [self.fn, self.tp]]

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


def confusion(preds, labels, positive=Label.DEPRESSED) -> ConfusionMatrix:
    preds = list(preds)
    labels = list(labels)
    if len(preds) != len(labels) or not labels:
        raise LengthMismatch(f"{len(preds)} predictions vs {len(labels)} labels")
    tp = fp = fn = tn = 0
    for p, l in zip(preds, labels):
        if l == positive:
            if p == positive:
                tp += 1
            else:
                fn += 1
        else:
            if p == positive:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


@dataclass(frozen=True)
class MetricValues:
    accuracy: float
    precision: float
    recall: float
    f1: float
    undefined: frozenset[str] = frozenset()


def metrics(cm: ConfusionMatrix) -> MetricValues:
    """Accuracy, precision, recall and F1 from a confusion matrix.

    A zero denominator yields value 0 and the metric's name in the
    ``undefined`` set, so report rows stay total.
    """
    if cm.total < 1:
        raise ValueError("empty confusion matrix")
    undefined = set()
    accuracy = (cm.tp + cm.tn) / cm.total
    if cm.tp + cm.fp:
        precision = cm.tp / (cm.tp + cm.fp)
    else:
        precision = 0.0
        undefined.add("precision")
    if cm.tp + cm.fn:
        recall = cm.tp / (cm.tp + cm.fn)
    else:
        recall = 0.0
        undefined.add("recall")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        undefined.add("f1")
    return MetricValues(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        undefined=frozenset(undefined),
    )


def roc_auc(scores, labels, positive=Label.DEPRESSED):
    """ROC points and trapezoidal AUC from scores (higher = more positive).

    Thresholds sweep the distinct scores in descending order with tied
    scores grouped into a single step, which makes the trapezoidal area
    equal the tie-corrected pairwise ranking statistic.
    """
    scores = np.asarray(list(scores), dtype=float)
    labels = list(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    is_pos = np.array([l == positive for l in labels])
    n_pos = int(is_pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("need at least one positive and one negative")
    order = np.argsort(-scores, kind="stable")
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and scores[order[j]] == scores[order[i]]:
            if is_pos[order[j]]:
                tp += 1
            else:
                fp += 1
            j += 1
        points.append((fp / n_neg, tp / n_pos))
        i = j
    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return points, auc


def stratified_folds(labels, k: int = 10, seed: int = 0) -> list[list[int]]:
    """Disjoint index folds preserving class proportions within one member.

    Each class is shuffled by a seeded generator and dealt round-robin.
    When the minority class has fewer than k members, k is lowered to that
    count with a warning.
    """
    labels = list(labels)
    by_class: dict = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)
    min_count = min(len(v) for v in by_class.values())
    if min_count < 2:
        raise TooFewExamples("every class needs at least 2 members")
    if min_count < k:
        warnings.warn(
            f"lowering folds from {k} to minority class size {min_count}",
            stacklevel=2,
        )
        k = min_count
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_class, key=str):
        idx = by_class[label]
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            folds[pos % k].append(i)
    return [sorted(f) for f in folds]


@dataclass(frozen=True)
class FoldReport:
    fold: int
    cm: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float | None


@dataclass(frozen=True)
class MetricsReport:
    cm: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    roc_points: tuple[tuple[float, float], ...]
    per_fold: tuple[FoldReport, ...]
    undefined: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "cm": {"tp": self.cm.tp, "fp": self.cm.fp, "fn": self.cm.fn, "tn": self.cm.tn},
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "roc_points": [list(p) for p in self.roc_points],
            "undefined": sorted(self.undefined),
            "per_fold": [
                {
                    "fold": f.fold,
                    "tp": f.cm.tp,
                    "fp": f.cm.fp,
                    "fn": f.cm.fn,
                    "tn": f.cm.tn,
                    "accuracy": f.accuracy,
                    "precision": f.precision,
                    "recall": f.recall,
                    "f1": f.f1,
                    "auc": f.auc,
                }
                for f in self.per_fold
            ],
        }


@dataclass(frozen=True)
class ModelSpec:
    """A named trainer: FeatureSet -> fitted model."""

    name: str
    train: callable = field(compare=False)


MODEL_KINDS = ("nb", "dt", "svml", "svmr")


def model_spec(
    name: str,
    svm_c: float = 1.0,
    svm_sigma: float | None = None,
    dt_max_depth: int | None = None,
    dt_ccp_alpha: float = 0.0,
    nb_alpha: float = 1.0,
) -> ModelSpec:
    """Build the trainer spec for one of the four model kinds."""
    if name == "nb":
        return ModelSpec(name, lambda fs: train_nb(fs, alpha=nb_alpha))
    if name == "dt":
        return ModelSpec(
            name, lambda fs: train_dt(fs, max_depth=dt_max_depth, ccp_alpha=dt_ccp_alpha)
        )
    if name == "svml":
        return ModelSpec(name, lambda fs: train_svm(fs, kernel="linear", C=svm_c))
    if name == "svmr":
        return ModelSpec(
            name, lambda fs: train_svm(fs, kernel="rbf", C=svm_c, sigma=svm_sigma)
        )
    raise ValueError(f"unknown model kind {name!r}; expected one of {MODEL_KINDS}")


def _report(all_preds, all_labels, all_scores, per_fold) -> MetricsReport:
    cm = confusion(all_preds, all_labels)
    vals = metrics(cm)
    roc_points, auc = roc_auc(all_scores, all_labels)
    return MetricsReport(
        cm=cm,
        accuracy=vals.accuracy,
        precision=vals.precision,
        recall=vals.recall,
        f1=vals.f1,
        auc=auc,
        roc_points=tuple(roc_points),
        per_fold=tuple(per_fold),
        undefined=vals.undefined,
    )


def cross_validate(
    corpus: Corpus,
    cfg: FeatureConfig,
    specs,
    k: int = 10,
    seed: int = 0,
    resources: Resources | None = None,
    prepared: PreparedCorpus | None = None,
    sparse_threshold: float = DEFAULT_SPARSE_THRESHOLD,
) -> dict[str, MetricsReport]:
    """Stratified k-fold CV of several models over one feature pipeline.

    All fold statistics are fit on each fold's training rows only; the
    fitted pipeline and feature sets are shared across the given models.
    """
    resources = resources or default_resources()
    if prepared is None:
        prepared = PreparedCorpus.prepare(corpus, cfg.self_center, resources)
    folds = stratified_folds(prepared.labels, k=k, seed=seed)
    all_idx = set(range(len(prepared)))

    pooled = {s.name: {"preds": [], "labels": [], "scores": [], "folds": []} for s in specs}
    for fold_no, test_idx in enumerate(folds):
        train_idx = sorted(all_idx - set(test_idx))
        pipe = FeaturePipeline(cfg, resources, sparse_threshold).fit(prepared, train_idx)
        fs_train = pipe.transform(prepared, train_idx)
        fs_test = pipe.transform(prepared, test_idx)
        test_labels = [prepared.labels[i] for i in test_idx]
        for spec in specs:
            model = spec.train(fs_train)
            preds, scores = predict_set(model, fs_test)
            bucket = pooled[spec.name]
            bucket["preds"].extend(preds)
            bucket["labels"].extend(test_labels)
            bucket["scores"].extend(scores.tolist())
            fold_cm = confusion(preds, test_labels)
            fold_vals = metrics(fold_cm)
            try:
                _, fold_auc = roc_auc(scores, test_labels)
            except OneClassOnly:
                fold_auc = None
            bucket["folds"].append(
                FoldReport(
                    fold=fold_no,
                    cm=fold_cm,
                    accuracy=fold_vals.accuracy,
                    precision=fold_vals.precision,
                    recall=fold_vals.recall,
                    f1=fold_vals.f1,
                    auc=fold_auc,
                )
            )

    return {
        name: _report(b["preds"], b["labels"], b["scores"], b["folds"])
        for name, b in pooled.items()
    }


def run_cv(
    corpus: Corpus,
    cfg: FeatureConfig,
    spec: ModelSpec,
    k: int = 10,
    seed: int = 0,
    **kwargs,
) -> MetricsReport:
    """Cross-validate a single model spec; see cross_validate."""
    return cross_validate(corpus, cfg, [spec], k=k, seed=seed, **kwargs)[spec.name]


def run_holdout(
    corpus: Corpus,
    cfg: FeatureConfig,
    spec: ModelSpec,
    fraction: float,
    seed: int = 0,
    resources: Resources | None = None,
    prepared: PreparedCorpus | None = None,
    sparse_threshold: float = DEFAULT_SPARSE_THRESHOLD,
) -> MetricsReport:
    """Train on a stratified (1 - fraction) split, evaluate on the rest."""
    if not 0 < fraction < 1:
        raise ValueError("holdout fraction must lie in (0, 1)")
    resources = resources or default_resources()
    if prepared is None:
        prepared = PreparedCorpus.prepare(corpus, cfg.self_center, resources)
    rng = random.Random(seed)
    by_class: dict = {}
    for i, label in enumerate(prepared.labels):
        by_class.setdefault(label, []).append(i)
    test_idx: list[int] = []
    for label in sorted(by_class, key=str):
        idx = by_class[label]
        rng.shuffle(idx)
        n_test = max(1, round(fraction * len(idx)))
        if n_test >= len(idx):
            raise TooFewExamples(f"holdout fraction {fraction} empties class {label}")
        test_idx.extend(idx[:n_test])
    test_idx = sorted(test_idx)
    train_idx = sorted(set(range(len(prepared))) - set(test_idx))

    pipe = FeaturePipeline(cfg, resources, sparse_threshold).fit(prepared, train_idx)
    model = spec.train(pipe.transform(prepared, train_idx))
    fs_test = pipe.transform(prepared, test_idx)
    test_labels = [prepared.labels[i] for i in test_idx]
    preds, scores = predict_set(model, fs_test)
    fold_cm = confusion(preds, test_labels)
    fold_vals = metrics(fold_cm)
    try:
        _, fold_auc = roc_auc(scores, test_labels)
    except OneClassOnly:
        fold_auc = None
    fold = FoldReport(
        fold=0,
        cm=fold_cm,
        accuracy=fold_vals.accuracy,
        precision=fold_vals.precision,
        recall=fold_vals.recall,
        f1=fold_vals.f1,
        auc=fold_auc,
    )
    return _report(preds, test_labels, scores.tolist(), [fold])
