"""PageRank and adjusted plus/minus baselines, each with a one-feature logistic model."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve
from scipy.special import expit

from . import _logistic
from .datamodel import Lineup, SeasonDataset
from .netbuild import MatchupNetwork

DEFAULT_ALPHA = 0.85
DEFAULT_RIDGE = 100.0
PER_GAME_MINUTES = 48.0
DIRECT_SOLVE_MAX_NODES = 2000
_SCALAR_FALLBACK_L2 = 1e-6


@dataclass(frozen=True, eq=False)
class PageRankScores:
    nodes: tuple[int, ...]
    values: np.ndarray
    alpha: float

    @property
    def scores(self) -> dict[int, float]:
        return dict(zip(self.nodes, map(float, self.values)))

    def get(self, lineup_id: int, default: float = 1.0) -> float:
        """Score of ``lineup_id``; lineups outside the network get ``default``.

        The default of 1 is the score of a lineup that beat nobody.
        """
        k = self._index.get(lineup_id)
        return default if k is None else float(self.values[k])

    @cached_property
    def _index(self) -> dict[int, int]:
        return {lid: k for k, lid in enumerate(self.nodes)}


def _rank_parts(net: MatchupNetwork, weighted: bool):
    src = np.repeat(np.arange(net.n_nodes), np.diff(net.indptr))
    dst = np.asarray(net.indices)
    w = np.asarray(net.weights) if weighted else np.ones(net.n_edges)
    out_w = np.bincount(src, weights=w, minlength=net.n_nodes)
    return src, dst, w, np.maximum(1.0, out_w)


def pagerank(net: MatchupNetwork, alpha: float = DEFAULT_ALPHA, weighted: bool = True,
             method: str = "auto", tol: float = 1e-10, max_iter: int = 100_000) -> PageRankScores:
    """Scores ``r = D (D - alpha A)^-1 1`` over the matchup network.

    ``A[i, j]`` is the weight of the edge ``j -> i`` (``i`` outperformed
    ``j``) and ``D`` holds ``max(1, weighted out-degree)``. Equivalently ``r``
    solves ``r = 1 + alpha A D^-1 r``: every lineup passes its score on to
    the lineups that beat it. ``method`` is ``"direct"``, ``"iterative"`` or
    ``"auto"`` (direct up to 2000 nodes).
    """
    if net.n_nodes == 0:
        raise ValueError("empty network")
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if method == "auto":
        method = "direct" if net.n_nodes <= DIRECT_SOLVE_MAX_NODES else "iterative"
    src, dst, w, deg = _rank_parts(net, weighted)
    n = net.n_nodes
    if method == "direct":
        M = sp.identity(n, format="csc") - alpha * sp.csc_matrix((w / deg[src], (dst, src)), shape=(n, n))
        r = np.atleast_1d(spsolve(M, np.ones(n)))
    elif method == "iterative":
        r = np.ones(n)
        share = w / deg[src]
        for _ in range(max_iter):
            r_new = 1.0 + alpha * np.bincount(dst, weights=share * r[src], minlength=n)
            if np.max(np.abs(r_new - r)) <= tol:
                r = r_new
                break
            r = r_new
        else:
            raise RuntimeError("PageRank iteration did not converge")
    else:
        raise ValueError(f"unknown method {method!r}")
    assert np.all(np.isfinite(r)), "singular PageRank system"
    return PageRankScores(net.nodes, r, alpha)


def pagerank_residual(net: MatchupNetwork, scores: PageRankScores, weighted: bool = True) -> float:
    """Max-norm of ``(D - alpha A) D^-1 r - 1``."""
    src, dst, w, deg = _rank_parts(net, weighted)
    r = scores.values
    lhs = r - scores.alpha * np.bincount(dst, weights=w * r[src] / deg[src], minlength=net.n_nodes)
    return float(np.max(np.abs(lhs - 1.0)))


@dataclass(frozen=True)
class APMRatings:
    player_apm: dict[str, float]
    ridge: float


def compute_apm(ds: SeasonDataset, ridge: float = DEFAULT_RIDGE) -> APMRatings:
    """Minute-weighted ridge regression of per-48 margin on +1/-1 player indicators.

    The lower-id lineup of each record is treated as home (+1). Every player
    in the lineup table is rated; ``ridge=0`` gives the minimum-norm solution.
    """
    if not ds.matchups:
        raise ValueError("APM needs at least one matchup")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    players = sorted({p for lu in ds.lineups.values() for p in lu.players})
    col = {p: k for k, p in enumerate(players)}
    X = np.zeros((len(ds.matchups), len(players)))
    y = np.empty(len(ds.matchups))
    wt = np.empty(len(ds.matchups))
    for r, rec in enumerate(ds.matchups):
        for p in ds.lineups[rec.lineup_a].players:
            X[r, col[p]] = 1.0
        for p in ds.lineups[rec.lineup_b].players:
            X[r, col[p]] = -1.0
        y[r] = rec.point_diff / rec.minutes * PER_GAME_MINUTES
        wt[r] = rec.minutes
    if ridge > 0:
        a = np.linalg.solve((X.T * wt) @ X + ridge * np.eye(len(players)), X.T @ (wt * y))
    else:
        sw = np.sqrt(wt)
        a = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)[0]
    return APMRatings(dict(zip(players, map(float, a))), float(ridge))


def lineup_apm(r: APMRatings, lineup: Lineup) -> float:
    """Average APM of the lineup's five players."""
    total = 0.0
    for p in sorted(lineup.players):
        if p not in r.player_apm:
            raise KeyError(f"no APM rating for player {p!r} (lineup {lineup.id})")
        total += r.player_apm[p]
    return total / len(lineup.players)


@dataclass(frozen=True)
class ScalarModel:
    slope: float
    intercept: float


def predict_scalar(m: ScalarModel, delta):
    return expit(m.slope * np.asarray(delta, dtype=np.float64) + m.intercept)


def _separable(x, y) -> bool:
    pos, neg = x[y == 1], x[y == 0]
    if len(pos) == 0 or len(neg) == 0:
        return True
    return bool(neg.max() < pos.min() or neg.min() > pos.max())


def fit_scalar_model(features: Iterable[tuple[float, int]]) -> ScalarModel:
    """Logistic regression of the label on one rating differential plus intercept."""
    pairs = list(features)
    if not pairs:
        raise ValueError("need at least one (delta, label) pair")
    x = np.array([float(d) for d, _ in pairs])
    y = np.array([float(lbl) for _, lbl in pairs])
    return fit_scalar_arrays(x, y)


def fit_scalar_arrays(x, y) -> ScalarModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    X = np.column_stack([x, np.ones_like(x)])
    penalty = 0.0
    if _separable(x, y):
        warnings.warn("rating differential separates the labels; using a tiny ridge penalty",
                      stacklevel=2)
        penalty = _SCALAR_FALLBACK_L2
    beta, converged = _logistic.fit_newton(X, y, penalty)
    if not converged and penalty == 0.0:
        warnings.warn("scalar logistic fit did not converge; refitting with a tiny ridge penalty",
                      stacklevel=2)
        beta, _ = _logistic.fit_newton(X, y, _SCALAR_FALLBACK_L2)
    return ScalarModel(float(beta[0]), float(beta[1]))


def dump_apm(r: APMRatings, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["player_id", "apm"])
    for p in sorted(r.player_apm):
        writer.writerow([p, repr(r.player_apm[p])])


def load_apm(stream, ridge: float = float("nan")) -> APMRatings:
    reader = csv.DictReader(stream)
    return APMRatings({row["player_id"]: float(row["apm"]) for row in reader}, ridge)


def dump_pagerank(s: PageRankScores, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["lineup_id", "pagerank"])
    for lid, v in zip(s.nodes, s.values):
        writer.writerow([lid, repr(float(v))])


def load_pagerank(stream, alpha: float = DEFAULT_ALPHA) -> PageRankScores:
    reader = csv.DictReader(stream)
    rows = [(int(r["lineup_id"]), float(r["pagerank"])) for r in reader]
    return PageRankScores(tuple(i for i, _ in rows), np.array([v for _, v in rows]), alpha)
