"""AdaBoost-SAMME over shallow decision trees."""

from __future__ import annotations

import math

import numpy as np

from .tree import DecisionTree

N_CLASSES = 2
_ERR_FLOOR = 1e-10


class AdaBoostSAMME:
    """Discrete multi-class AdaBoost (SAMME) specialised to two classes.

    Stage weight is ``ln((1 - err) / err) + ln(K - 1)``. Boosting stops early
    once a stage is no better than chance (``err >= (K - 1) / K``), keeping the
    stages fitted so far, or after a perfect stage.
    """

    def __init__(self, n_stages: int = 50, base_depth: int = 3, min_leaf: int = 1, seed: int = 0):
        if n_stages < 1:
            raise ValueError("n_stages must be >= 1")
        self.n_stages = n_stages
        self.base_depth = base_depth
        self.min_leaf = min_leaf
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n = len(y)
        w = np.full(n, 1.0 / n)
        self.stages_: list[DecisionTree] = []
        self.alphas_: list[float] = []
        self.errors_: list[float] = []
        self.prior_ = float(y.mean())
        rng = np.random.default_rng(self.seed)
        chance = (N_CLASSES - 1) / N_CLASSES
        for _ in range(self.n_stages):
            tree = DecisionTree(max_depth=self.base_depth, min_leaf=self.min_leaf, rng=rng)
            tree.fit(X, y, sample_weight=w)
            miss = tree.predict(X) != y
            err = float(w[miss].sum() / w.sum())
            if err >= chance:
                break
            perfect = err <= _ERR_FLOOR
            err = max(err, _ERR_FLOOR)
            alpha = math.log((1 - err) / err) + math.log(N_CLASSES - 1)
            self.stages_.append(tree)
            self.alphas_.append(alpha)
            self.errors_.append(err)
            if perfect:
                break
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        return self

    def staged_predict(self, X):
        X = np.asarray(X, dtype=float)
        votes = np.zeros(len(X))
        total = 0.0
        for tree, a in zip(self.stages_, self.alphas_):
            votes += a * tree.predict(X)
            total += a
            yield (votes / total > 0.5).astype(int)

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if not self.stages_:
            return np.full(len(X), self.prior_)
        votes = np.zeros(len(X))
        for tree, a in zip(self.stages_, self.alphas_):
            votes += a * tree.predict(X)
        return votes / sum(self.alphas_)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)
