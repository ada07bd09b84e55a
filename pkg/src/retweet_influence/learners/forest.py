"""Bagged random forest of :class:`DecisionTree`."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .tree import DecisionTree


def _grow(args):
    X, y, seq, bootstrap, max_features, max_depth, min_leaf = args
    rng = np.random.default_rng(seq)
    n = len(X)
    rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
    tree = DecisionTree(max_depth=max_depth, min_leaf=min_leaf, max_features=max_features, rng=rng)
    return tree.fit(X[rows], y[rows])


class RandomForest:
    """Majority vote over trees grown on bootstrap resamples.

    ``max_features="sqrt"`` draws ``ceil(sqrt(p))`` features per split. Each
    tree gets its own child seed, so results do not depend on ``workers``.
    """

    def __init__(self, n_trees: int = 100, max_features="sqrt", bootstrap: bool = True,
                 max_depth: int = 12, min_leaf: int = 5, seed: int = 0, workers: int = 1):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.seed = seed
        self.workers = workers

    def _features_per_split(self, p: int) -> int | None:
        if self.max_features is None:
            return None
        if self.max_features == "sqrt":
            return math.ceil(math.sqrt(p))
        return int(self.max_features)

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        mf = self._features_per_split(X.shape[1])
        seqs = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        jobs = [(X, y, s, self.bootstrap, mf, self.max_depth, self.min_leaf) for s in seqs]
        if self.workers > 1 and self.n_trees > 1:
            with ProcessPoolExecutor(self.workers) as pool:
                self.trees_ = list(pool.map(_grow, jobs))
        else:
            self.trees_ = [_grow(j) for j in jobs]
        return self

    def predict_proba(self, X) -> np.ndarray:
        votes = np.zeros(len(X))
        for t in self.trees_:
            votes += t.predict(X)
        return votes / len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)
