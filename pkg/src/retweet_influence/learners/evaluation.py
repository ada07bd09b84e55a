"""Positive-class metrics, stratified splitting and cross-validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class Metrics(NamedTuple):
    precision: float
    recall: float
    f1: float


class Confusion(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int

    def metrics(self) -> Metrics:
        p = self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0
        r = self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return Metrics(p, r, f)

    def __add__(self, other):
        return Confusion(*(a + b for a, b in zip(self, other)))


def confusion(predicted, actual) -> Confusion:
    predicted = np.asarray(predicted).astype(int)
    actual = np.asarray(actual).astype(int)
    if predicted.shape != actual.shape:
        raise ValueError(f"length mismatch: {predicted.shape} vs {actual.shape}")
    return Confusion(
        int(np.sum((predicted == 1) & (actual == 1))),
        int(np.sum((predicted == 1) & (actual == 0))),
        int(np.sum((predicted == 0) & (actual == 1))),
        int(np.sum((predicted == 0) & (actual == 0))),
    )


def evaluate(predicted, actual) -> Metrics:
    """Precision, recall and F1 of the positive class (0 where undefined)."""
    return confusion(predicted, actual).metrics()


def _class_permutations(y: np.ndarray, seed: int) -> dict[int, np.ndarray]:
    # one independent stream per class keeps each class's shuffle unaffected by the other's size
    return {c: np.flatnonzero(y == c)[np.random.default_rng([seed, c]).permutation(int(np.sum(y == c)))]
            for c in (1, 0)}


def stratified_split(y, train_frac: float = 0.7, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Per class, a seeded shuffle whose first ``round(train_frac * n_c)`` rows train."""
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must lie in (0, 1)")
    y = np.asarray(y, dtype=int)
    train, test = [], []
    for c, perm in _class_permutations(y, seed).items():
        k = math.floor(train_frac * len(perm) + 0.5)
        train.append(perm[:k])
        test.append(perm[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_folds(y, folds: int = 10, seed: int = 0) -> np.ndarray:
    """Fold id per row; each class is dealt round-robin after a seeded shuffle."""
    y = np.asarray(y, dtype=int)
    fold = np.empty(len(y), dtype=np.int64)
    for c, perm in _class_permutations(y, seed).items():
        fold[perm] = np.arange(len(perm)) % folds
    return fold


@dataclass
class ModelReport:
    """Held-out metrics of the model fitted on the training portion, plus CV detail.

    ``cv_mean`` averages per-fold metrics; ``cv_pooled`` computes them from the
    summed fold confusions.
    """

    model: object
    precision: float
    recall: float
    f1: float
    confusion: Confusion
    folds: list[Metrics] = field(default_factory=list)
    cv_mean: Metrics | None = None
    cv_pooled: Metrics | None = None
    n_train: int = 0
    n_test: int = 0

    @property
    def metrics(self) -> Metrics:
        return Metrics(self.precision, self.recall, self.f1)
