"""Classifiers, metrics and the train/test protocol.

All learners take 0/1 labels and expose ``predict_proba`` (positive-class
score) and ``predict`` (score above 0.5).
"""

from __future__ import annotations

import pickle
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boosting import AdaBoostSAMME
from .evaluation import (Confusion, Metrics, ModelReport, confusion, evaluate, stratified_folds,
                         stratified_split)
from .forest import RandomForest
from .logistic import LogisticRegression, loss_and_grad
from .naive_bayes import GaussianNB
from .tree import DecisionTree

KINDS = ("decision_tree", "random_forest", "adaboost_samme", "logistic_regression", "gaussian_nb")
SHORT_NAMES = {"decision_tree": "DT", "random_forest": "RF", "adaboost_samme": "AB",
               "logistic_regression": "LR", "gaussian_nb": "NB"}

DEFAULTS = {
    "decision_tree": {"max_depth": 12, "min_leaf": 5},
    "random_forest": {"n_trees": 100, "max_features": "sqrt", "bootstrap": True,
                      "max_depth": 12, "min_leaf": 5},
    "adaboost_samme": {"n_stages": 50, "base_depth": 3, "min_leaf": 1},
    "logistic_regression": {"lam": 1e-4, "max_iter": 500, "tol": 1e-6},
    "gaussian_nb": {"var_smoothing": 1e-9},
}

MODEL_FORMAT = "retweet_influence.model"
MODEL_VERSION = 1


class SingleClassError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown learner {self.kind!r}; choose from {KINDS}")
        unknown = set(self.params) - set(DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"{self.kind} does not accept {sorted(unknown)}")

    @property
    def name(self) -> str:
        return SHORT_NAMES[self.kind]

    def resolved(self) -> dict:
        return {**DEFAULTS[self.kind], **self.params}

    def with_seed(self, seed: int) -> "LearnerSpec":
        return LearnerSpec(self.kind, dict(self.params), seed)


def _build(spec: LearnerSpec, workers: int = 1):
    p = spec.resolved()
    if spec.kind == "decision_tree":
        return DecisionTree(p["max_depth"], p["min_leaf"], rng=np.random.default_rng(spec.seed))
    if spec.kind == "random_forest":
        return RandomForest(seed=spec.seed, workers=workers, **p)
    if spec.kind == "adaboost_samme":
        return AdaBoostSAMME(seed=spec.seed, **p)
    if spec.kind == "logistic_regression":
        return LogisticRegression(**p)
    return GaussianNB(**p)


def fit(spec: LearnerSpec, X, y, workers: int = 1):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if len(y) == 0:
        raise ValueError("empty training set")
    if not np.isfinite(X).all():
        raise ValueError("training matrix contains non-finite values")
    if set(np.unique(y)) != {0, 1}:
        raise SingleClassError(f"training labels must contain both classes, got {np.unique(y)}")
    model = _build(spec, workers).fit(X, y)
    model.n_features_in_ = X.shape[1]
    return model


def predict(model, rows) -> tuple[np.ndarray, np.ndarray]:
    """Labels and positive-class scores for ``rows``."""
    rows = np.asarray(rows, dtype=float)
    if len(rows) == 0:
        return np.empty(0, dtype=int), np.empty(0)
    if rows.ndim != 2 or rows.shape[1] != model.n_features_in_:
        raise ValueError(f"expected {model.n_features_in_} columns, got shape {rows.shape}")
    scores = model.predict_proba(rows)
    return (scores > 0.5).astype(int), scores


def _fold_job(args):
    spec, X, y, fold, k = args
    tr, te = fold != k, fold == k
    model = fit(spec, X[tr], y[tr])
    return confusion(predict(model, X[te])[0], y[te])


def split_and_cv(X, y, spec: LearnerSpec, train_frac: float = 0.7, folds: int = 10,
                 seed: int = 0, workers: int = 1, cv: bool = True) -> ModelReport:
    """Stratified train/test split, k-fold CV on the training part, held-out test of the final model."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    train, test = stratified_split(y, train_frac, seed)
    Xtr, ytr = X[train], y[train]
    if cv and min(int(ytr.sum()), int((1 - ytr).sum())) < folds:
        raise ValueError(f"fewer than {folds} training rows in a class; cannot run {folds}-fold CV")
    fold_conf: list[Confusion] = []
    if cv:
        fold = stratified_folds(ytr, folds, seed)
        jobs = [(spec, Xtr, ytr, fold, k) for k in range(folds)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                fold_conf = list(pool.map(_fold_job, jobs))
        else:
            fold_conf = [_fold_job(j) for j in jobs]
    model = fit(spec, Xtr, ytr, workers=workers)
    conf = confusion(predict(model, X[test])[0], y[test])
    m = conf.metrics()
    fold_metrics = [c.metrics() for c in fold_conf]
    report = ModelReport(model, m.precision, m.recall, m.f1, conf, fold_metrics,
                         n_train=len(train), n_test=len(test))
    if fold_conf:
        report.cv_mean = Metrics(*np.mean(np.array(fold_metrics), axis=0).tolist())
        pooled = fold_conf[0]
        for c in fold_conf[1:]:
            pooled = pooled + c
        report.cv_pooled = pooled.metrics()
    return report


def save_model(path, model, spec: LearnerSpec | None = None) -> None:
    with open(path, "wb") as fh:
        pickle.dump({"format": MODEL_FORMAT, "version": MODEL_VERSION, "spec": spec, "model": model},
                    fh, protocol=4)


def load_model(path):
    with open(path, "rb") as fh:
        blob = pickle.load(fh)
    if not isinstance(blob, dict) or blob.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path} is not a saved model")
    if blob["version"] != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {blob['version']}")
    return blob["model"]


__all__ = [
    "AdaBoostSAMME", "Confusion", "DecisionTree", "GaussianNB", "KINDS", "LearnerSpec",
    "LogisticRegression", "Metrics", "ModelReport", "RandomForest", "SingleClassError",
    "confusion", "evaluate", "fit", "load_model", "loss_and_grad", "predict", "save_model",
    "split_and_cv", "stratified_folds", "stratified_split",
]
