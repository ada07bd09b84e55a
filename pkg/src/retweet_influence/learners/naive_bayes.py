"""Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp


class GaussianNB:
    def __init__(self, var_smoothing: float = 1e-9):
        self.var_smoothing = var_smoothing

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.classes_ = np.array([0, 1])
        spread = X.var(axis=0).max() if X.size else 0.0
        # constant data would otherwise leave a zero variance
        self.epsilon_ = self.var_smoothing * (spread if spread > 0 else 1.0)
        self.theta_ = np.zeros((2, X.shape[1]))
        self.var_ = np.ones((2, X.shape[1]))
        self.log_prior_ = np.full(2, -np.inf)
        for c in self.classes_:
            Xc = X[y == c]
            if len(Xc):
                self.theta_[c] = Xc.mean(axis=0)
                self.var_[c] = Xc.var(axis=0) + self.epsilon_
                self.log_prior_[c] = np.log(len(Xc) / len(X))
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty((len(X), 2))
        for c in self.classes_:
            ll = -0.5 * np.sum(np.log(2 * np.pi * self.var_[c]))
            ll = ll - 0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            out[:, c] = self.log_prior_[c] + ll
        return out

    def predict_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return np.exp(jll[:, 1] - logsumexp(jll, axis=1))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)
