"""L2-regularized binomial logistic regression fitted by damped Newton steps."""

from __future__ import annotations

import numpy as np
from scipy.special import expit


def loss_and_grad(beta: np.ndarray, Z: np.ndarray, y: np.ndarray, lam: float):
    """Mean log-loss plus ``lam/2 * |beta[1:]|^2`` and its gradient.

    ``Z`` carries a leading column of ones; the intercept is not penalized.
    """
    z = Z @ beta
    # log(1 + exp(z)) - y z, stable for large |z|
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * lam * float(beta[1:] @ beta[1:])
    grad = Z.T @ (expit(z) - y) / len(y)
    grad[1:] += lam * beta[1:]
    return loss, grad


class LogisticRegression:
    """Standardizes features with training mean/std, then minimizes the penalized log-loss
    until the gradient norm drops to ``tol`` or ``max_iter`` Newton steps have run."""

    def __init__(self, lam: float = 1e-4, max_iter: int = 500, tol: float = 1e-6):
        self.lam = lam
        self.max_iter = max_iter
        self.tol = tol

    def _design(self, X) -> np.ndarray:
        Xs = (np.asarray(X, dtype=float) - self.mean_) / self.scale_
        return np.hstack([np.ones((len(Xs), 1)), Xs])

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        Z = self._design(X)
        p = Z.shape[1]
        beta = np.zeros(p)
        ridge = np.full(p, self.lam)
        ridge[0] = 1e-12
        loss, grad = loss_and_grad(beta, Z, y, self.lam)
        self.n_iter_ = 0
        for it in range(self.max_iter):
            if np.linalg.norm(grad) <= self.tol:
                break
            s = expit(Z @ beta)
            H = (Z * (s * (1 - s))[:, None]).T @ Z / len(y) + np.diag(ridge)
            try:
                step = np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(H, grad, rcond=None)[0]
            t = 1.0
            while True:
                cand = beta - t * step
                new_loss, new_grad = loss_and_grad(cand, Z, y, self.lam)
                if new_loss <= loss - 1e-4 * t * float(grad @ step) or t < 1e-10:
                    break
                t /= 2
            beta, loss, grad = cand, new_loss, new_grad
            self.n_iter_ = it + 1
        self.coef_ = beta
        self.grad_norm_ = float(np.linalg.norm(grad))
        return self

    def decision_function(self, X) -> np.ndarray:
        return self._design(X) @ self.coef_

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(int)
