"""Binary CART classifier with weighted Gini impurity."""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


class DecisionTree:
    """Axis-aligned binary tree for 0/1 labels.

    Parameters
    ----------
    max_depth : int
        Depth limit; the root is depth 0.
    min_leaf : int
        Minimum number of rows on each side of a split.
    max_features : int or None
        Features drawn (without replacement) at every node. ``None`` uses all
        features and never touches ``rng``.
    rng : numpy.random.Generator, optional
        Source of the per-node feature draws.

    Ties between equally good splits go to the lowest feature index, then to
    the lowest threshold.
    """

    def __init__(self, max_depth: int = 12, min_leaf: int = 5, max_features: int | None = None,
                 rng: np.random.Generator | None = None):
        if max_depth < 0 or min_leaf < 1:
            raise ValueError("max_depth must be >= 0 and min_leaf >= 1")
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def fit(self, X, y, sample_weight=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n, self.n_features_ = X.shape
        w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node():
            for arr, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1), (value, 0.0)):
                arr.append(v)
            return len(feature) - 1

        root = new_node()
        stack = [(root, np.arange(n), 0)]
        while stack:
            node, idx, depth = stack.pop()
            wn = w[idx]
            W = wn.sum()
            pos = float(wn @ y[idx])
            value[node] = pos / W if W > 0 else 0.0
            if depth >= self.max_depth or len(idx) < 2 * self.min_leaf or pos <= _EPS * W \
                    or pos >= W * (1 - _EPS):
                continue
            split = self._best_split(X, y, w, idx)
            if split is None:
                continue
            f, thr = split
            go_left = X[idx, f] <= thr
            feature[node], threshold[node] = f, thr
            left[node], right[node] = new_node(), new_node()
            stack.append((right[node], idx[~go_left], depth + 1))
            stack.append((left[node], idx[go_left], depth + 1))
        self.feature_ = np.array(feature, dtype=np.int64)
        self.threshold_ = np.array(threshold)
        self.left_ = np.array(left, dtype=np.int64)
        self.right_ = np.array(right, dtype=np.int64)
        self.value_ = np.array(value)
        return self

    def _candidate_features(self) -> np.ndarray:
        p = self.n_features_
        if self.max_features is None or self.max_features >= p:
            return np.arange(p)
        return np.sort(self.rng.choice(p, size=self.max_features, replace=False))

    def _best_split(self, X, y, w, idx):
        n = len(idx)
        k = self.min_leaf
        best_score, best = np.inf, None
        wn, yn = w[idx], y[idx]
        W_total = wn.sum()
        for f in self._candidate_features():
            xs = X[idx, f]
            order = np.argsort(xs, kind="stable")
            xs = xs[order]
            cw = np.cumsum(wn[order])
            cp = np.cumsum(wn[order] * yn[order])
            wl, pl = cw[:-1], cp[:-1]
            wr, pr = cw[-1] - wl, cp[-1] - pl
            valid = xs[:-1] < xs[1:]
            valid[: k - 1] = False
            valid[n - k:] = False
            if not valid.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                # weighted child gini (times 1/2): pl*(wl-pl)/wl + pr*(wr-pr)/wr
                score = np.where(wl > 0, pl * (wl - pl) / wl, 0.0) + \
                    np.where(wr > 0, pr * (wr - pr) / wr, 0.0)
            score[~valid] = np.inf
            i = int(np.argmin(score))
            if score[i] < best_score - _EPS * W_total:
                best_score = score[i]
                thr = (xs[i] + xs[i + 1]) / 2
                best = (int(f), float(xs[i] if thr >= xs[i + 1] else thr))
        return best

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature_[node]
            inner = f >= 0
            if not inner.any():
                return node
            go_left = X[rows[inner], f[inner]] <= self.threshold_[node[inner]]
            node[inner] = np.where(go_left, self.left_[node[inner]], self.right_[node[inner]])

    def predict_proba(self, X) -> np.ndarray:
        return self.value_[self.apply(X)]

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.feature_), dtype=int)
        for i in range(len(self.feature_)):
            if self.feature_[i] >= 0:
                depth[self.left_[i]] = depth[self.right_[i]] = depth[i] + 1
        return int(depth.max())
