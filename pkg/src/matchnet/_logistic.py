"""Penalised logistic regression by damped Newton iterations."""

from __future__ import annotations

import numpy as np
from scipy.special import expit, log_expit

GRAD_TOL = 1e-6
MAX_ITER = 500


def objective(beta, X, y, penalty):
    """Negative Bernoulli log-likelihood plus ``0.5 * sum(penalty * beta**2)``."""
    z = X @ beta
    return float(np.sum(-y * log_expit(z) - (1.0 - y) * log_expit(-z)) + 0.5 * np.sum(penalty * beta**2))


def gradient(beta, X, y, penalty):
    return X.T @ (expit(X @ beta) - y) + penalty * beta


def fit_newton(X, y, penalty, tol=GRAD_TOL, max_iter=MAX_ITER):
    """Minimise :func:`objective`; returns ``(beta, converged)``.

    Steps use the minimum-norm solution of the Newton system, so directions
    with no curvature (all-zero features, zero penalty) stay at zero.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    penalty = np.broadcast_to(np.asarray(penalty, dtype=np.float64), (X.shape[1],))
    beta = np.zeros(X.shape[1])
    f = objective(beta, X, y, penalty)
    for _ in range(max_iter):
        g = gradient(beta, X, y, penalty)
        if np.max(np.abs(g), initial=0.0) <= tol:
            return beta, True
        s = expit(X @ beta)
        H = (X.T * (s * (1.0 - s))) @ X + np.diag(penalty)
        step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        while True:
            cand = beta - t * step
            f_new = objective(cand, X, y, penalty)
            if f_new <= f - 1e-4 * t * (g @ step) or t < 1e-12:
                break
            t *= 0.5
        if t < 1e-12:
            # Newton direction stalled; fall back to a gradient step
            t = 1.0
            while t > 1e-16:
                cand = beta - t * g
                f_new = objective(cand, X, y, penalty)
                if f_new < f:
                    break
                t *= 0.5
            else:
                return beta, False
        beta, f = cand, f_new
    g = gradient(beta, X, y, penalty)
    return beta, bool(np.max(np.abs(g), initial=0.0) <= tol)


def complementary_expit(z):
    """Logistic function with ``f(-z) == 1 - f(z)`` holding bit for bit.

    The value on the >= 0.5 side is computed first; its complement is exact
    in floating point, so swapping the sign of ``z`` swaps the two values.
    Tiny probabilities are accurate in absolute (not relative) terms.
    """
    z = np.asarray(z, dtype=np.float64)
    upper = 1.0 - expit(-np.abs(z))
    return np.where(z >= 0, upper, 1.0 - upper)[()]
