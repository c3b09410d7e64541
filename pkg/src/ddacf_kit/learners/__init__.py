"""Four from-scratch classifiers behind a uniform train/predict contract."""

from .base import load_model, predict, predict_set, save_model
from .nb import NaiveBayesModel, train_nb
from .svm import SvmModel, train_svm
from .tree import DecisionTreeModel, best_split, train_dt

__all__ = [
    "train_nb",
    "train_dt",
    "train_svm",
    "NaiveBayesModel",
    "DecisionTreeModel",
    "SvmModel",
    "best_split",
    "predict",
    "predict_set",
    "save_model",
    "load_model",
]
