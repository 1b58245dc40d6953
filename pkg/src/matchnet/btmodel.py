"""Bradley-Terry model on embedding differences and imputation of unseen lineups.

The probability that lineup ``i`` outperforms lineup ``j`` is
``logistic(beta . (x_i - x_j))``. There is no intercept, so swapping the two
lineups always gives the complementary probability.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _logistic
from .datamodel import Lineup, player_overlap

DEFAULT_L2 = 1.0
_FALLBACK_L2 = 1e-6


@dataclass(frozen=True, eq=False)
class BTModel:
    coefficients: np.ndarray
    l2_penalty: float = DEFAULT_L2

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=np.float64)
        if coef.ndim != 1 or not np.all(np.isfinite(coef)):
            raise ValueError("coefficients must be a finite 1-d vector")
        object.__setattr__(self, "coefficients", coef)

    @property
    def d(self) -> int:
        return len(self.coefficients)


def _check_dim(m: BTModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != m.d:
        raise ValueError(f"feature dimension {x.shape[-1]} does not match model dimension {m.d}")
    return x


def predict(m: BTModel, xi, xj):
    """Probability that the lineup with features ``xi`` outperforms the one with ``xj``.

    Accepts single vectors or stacked ``(n, d)`` arrays.
    """
    diff = _check_dim(m, xi) - _check_dim(m, xj)
    return _logistic.complementary_expit(diff @ m.coefficients)


def fit(train: Iterable[tuple], l2: float = DEFAULT_L2) -> BTModel:
    """Penalised maximum likelihood over ``(xi, xj, label)`` triples.

    ``label`` is 1 when the ``xi`` lineup outperformed. The objective is the
    summed log-likelihood minus ``l2 / 2 * |beta|^2``.
    """
    train = list(train)
    if not train:
        raise ValueError("need at least one training pair")
    if l2 < 0:
        raise ValueError("l2 must be non-negative")
    X = np.array([np.asarray(xi, dtype=np.float64) - np.asarray(xj, dtype=np.float64)
                  for xi, xj, _ in train])
    y = np.array([float(lbl) for _, _, lbl in train])
    return fit_arrays(X, y, l2)


def fit_arrays(X, y, l2: float = DEFAULT_L2) -> BTModel:
    """:func:`fit` on a precomputed difference matrix ``X`` and 0/1 labels ``y``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    penalty = l2
    if np.all(y == y[0]):
        warnings.warn("all training labels identical; coefficients are set by the penalty alone",
                      stacklevel=2)
        if l2 == 0 and np.any(X != 0):
            penalty = _FALLBACK_L2
    beta, converged = _logistic.fit_newton(X, y, penalty)
    if not converged:
        warnings.warn("Bradley-Terry fit did not reach the gradient tolerance "
                      "(data may be separable)", stacklevel=2)
    return BTModel(beta, float(penalty))


def penalized_loglik(m_or_beta, X, y, l2: float) -> float:
    beta = m_or_beta.coefficients if isinstance(m_or_beta, BTModel) else np.asarray(m_or_beta)
    return -_logistic.objective(beta, np.asarray(X, float), np.asarray(y, float), l2)


def penalized_loglik_grad(beta, X, y, l2: float) -> np.ndarray:
    """Gradient of :func:`penalized_loglik` with respect to the coefficients."""
    return -_logistic.gradient(np.asarray(beta, float), np.asarray(X, float), np.asarray(y, float), l2)


def impute_unseen(emb, team_lineups: Sequence[Lineup], fresh: Lineup) -> np.ndarray:
    """Overlap-weighted average of the team's embedded lineup vectors.

    Weights are raw common-player counts. With no overlap at all the plain
    team mean is used; with no embedded team lineups the zero vector.
    """
    cands = [lu for lu in team_lineups if lu.id in emb and lu.id != fresh.id]
    if not cands:
        warnings.warn(f"no embedded team lineups to impute lineup {fresh.id}; using zero vector",
                      stacklevel=2)
        return np.zeros(emb.d)
    vecs = np.stack([emb[lu.id] for lu in cands])
    sigma = np.array([player_overlap(fresh, lu) for lu in cands], dtype=np.float64)
    if sigma.sum() == 0:
        return vecs.mean(axis=0)
    return sigma @ vecs / sigma.sum()


def dump_model(m: BTModel, stream) -> None:
    stream.write(f"{m.d} {m.l2_penalty!r}\n")
    for c in m.coefficients:
        stream.write(f"{float(c)!r}\n")


def load_model(stream) -> BTModel:
    header = stream.readline().split()
    if len(header) != 2:
        raise ValueError("model header must be 'd l2'")
    d, l2 = int(header[0]), float(header[1])
    coef = [float(line) for line in stream if line.strip()]
    if len(coef) != d:
        raise ValueError(f"expected {d} coefficients, found {len(coef)}")
    return BTModel(np.array(coef), l2)
