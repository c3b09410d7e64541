"""Hybrid naive Bayes: multinomial over terms, Gaussian over dense features.

The class-conditional term model smooths the per-document mean count vector
with Laplace alpha, so parameters depend only on per-class averages and are
invariant under duplicating the training set.  Dense features get per-class
Gaussians with a floored variance.  Scoring is done in log space; the score
is the log-posterior difference (depressed minus control), with ties going
to the control class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..corpus import Label
from ..errors import SingleClass
from ..features import FeatureSet
from .base import register_model

VARIANCE_FLOOR = 1e-9


@register_model("nb")
@dataclass
class NaiveBayesModel:
    schema: str
    n_terms: int
    log_prior: np.ndarray       # [control, depressed]
    term_log_prob: np.ndarray   # 2 x t, rows [control, depressed]
    gauss_mean: np.ndarray      # 2 x a
    gauss_var: np.ndarray       # 2 x a
    threshold: float = 0.0

    def score_rows(self, X: np.ndarray) -> np.ndarray:
        terms = X[:, : self.n_terms]
        dense = X[:, self.n_terms:]
        joint = np.tile(self.log_prior, (X.shape[0], 1)).astype(float)
        if self.n_terms:
            joint += terms @ self.term_log_prob.T
        if dense.shape[1]:
            for c in range(2):
                var = self.gauss_var[c]
                log_pdf = -0.5 * (
                    np.log(2 * math.pi * var) + (dense - self.gauss_mean[c]) ** 2 / var
                )
                joint[:, c] += log_pdf.sum(axis=1)
        return joint[:, 1] - joint[:, 0]

    def to_dict(self) -> dict:
        return {
            "log_prior": self.log_prior.tolist(),
            "term_log_prob": self.term_log_prob.tolist(),
            "gauss_mean": self.gauss_mean.tolist(),
            "gauss_var": self.gauss_var.tolist(),
        }

    @classmethod
    def from_dict(cls, params: dict, schema: str, n_terms: int) -> "NaiveBayesModel":
        return cls(
            schema=schema,
            n_terms=n_terms,
            log_prior=np.array(params["log_prior"]),
            term_log_prob=np.array(params["term_log_prob"]),
            gauss_mean=np.array(params["gauss_mean"]),
            gauss_var=np.array(params["gauss_var"]),
        )


def train_nb(fs: FeatureSet, alpha: float = 1.0) -> NaiveBayesModel:
    """Fit the hybrid naive Bayes model on a training feature set."""
    masks = [
        np.array([l is Label.CONTROL for l in fs.labels]),
        np.array([l is Label.DEPRESSED for l in fs.labels]),
    ]
    counts = np.array([m.sum() for m in masks], dtype=float)
    if (counts == 0).any():
        raise SingleClass("training data must contain both classes")
    log_prior = np.log(counts / counts.sum())

    n_terms = fs.terms.shape[1]
    term_log_prob = np.zeros((2, n_terms))
    if n_terms:
        for c, mask in enumerate(masks):
            mean_counts = fs.terms[mask].mean(axis=0)
            smoothed = mean_counts + alpha
            term_log_prob[c] = np.log(smoothed / smoothed.sum())

    dense = fs.dense
    gauss_mean = np.zeros((2, dense.shape[1]))
    gauss_var = np.ones((2, dense.shape[1]))
    if dense.shape[1]:
        for c, mask in enumerate(masks):
            gauss_mean[c] = dense[mask].mean(axis=0)
            gauss_var[c] = np.maximum(dense[mask].var(axis=0), VARIANCE_FLOOR)

    return NaiveBayesModel(
        schema=fs.schema,
        n_terms=n_terms,
        log_prior=log_prior,
        term_log_prob=term_log_prob,
        gauss_mean=gauss_mean,
        gauss_var=gauss_var,
    )
