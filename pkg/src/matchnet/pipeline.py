"""End-to-end fitting and evaluation of the embedding model and both baselines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import baselines, btmodel
from .datamodel import SeasonDataset
from .embed import EmbedConfig, Embedding, WalkConfig, embed_network
from .evaluation import (
    EvalReport,
    SplitSpec,
    TeamRating,
    labels_of,
    make_report,
    split,
    team_rating,
)
from .netbuild import build_network

EMBEDDING_MODEL = "embedding"
PAGERANK_MODEL = "pagerank"
APM_MODEL = "apm"


@dataclass(frozen=True)
class ExperimentConfig:
    walk: WalkConfig = field(default_factory=WalkConfig)
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    l2: float = btmodel.DEFAULT_L2
    alpha: float = baselines.DEFAULT_ALPHA
    pagerank_weighted: bool = True
    apm_ridge: float = baselines.DEFAULT_RIDGE
    split: SplitSpec = field(default_factory=SplitSpec)


@dataclass(frozen=True, eq=False)
class FittedEmbeddingModel:
    embedding: Embedding
    model: btmodel.BTModel
    dataset: SeasonDataset

    def vector(self, lineup_id: int) -> tuple[np.ndarray, bool]:
        """Vector of a lineup and whether it had to be imputed."""
        if lineup_id in self.embedding:
            return self.embedding[lineup_id], False
        ds = self.dataset
        if lineup_id not in ds.lineups:
            raise KeyError(f"unknown lineup {lineup_id}")
        ds.require_teams([lineup_id])
        team = ds.team_of[lineup_id]
        return btmodel.impute_unseen(self.embedding, ds.team_lineups(team), ds.lineups[lineup_id]), True

    def predict_pair(self, a: int, b: int) -> float:
        xa, _ = self.vector(a)
        xb, _ = self.vector(b)
        return float(btmodel.predict(self.model, xa, xb))


def fit_embedding_model(train: SeasonDataset, cfg: ExperimentConfig) -> FittedEmbeddingModel:
    """Embed the training network and fit the Bradley-Terry model on its decided records."""
    net = build_network(train)
    emb = embed_network(net, cfg.walk, cfg.embed)
    decided = [r for r in train.matchups if r.point_diff != 0]
    if not decided:
        raise ValueError("training data has no decided records")
    X = np.stack([emb[r.lineup_a] - emb[r.lineup_b] for r in decided])
    y = np.array([1.0 if r.point_diff > 0 else 0.0 for r in decided])
    return FittedEmbeddingModel(emb, btmodel.fit_arrays(X, y, cfg.l2), train)


def evaluate_embedding(train: SeasonDataset, test: SeasonDataset, cfg: ExperimentConfig,
                       fitted: FittedEmbeddingModel | None = None) -> EvalReport:
    fitted = fitted or fit_embedding_model(train, cfg)
    labels = labels_of(test)
    preds, n_unseen, both = [], 0, 0
    for rec in test.matchups:
        xa, ua = fitted.vector(rec.lineup_a)
        xb, ub = fitted.vector(rec.lineup_b)
        n_unseen += ua or ub
        both += ua and ub
        preds.append(float(btmodel.predict(fitted.model, xa, xb)))
    notes = []
    if both:
        notes.append(f"{both} test pair(s) had both lineups imputed independently")
    return make_report(EMBEDDING_MODEL, [r.pair for r in test.matchups], preds, labels,
                       n_unseen, notes)


def _scalar_report(name, train, test, score):
    decided = [r for r in train.matchups if r.point_diff != 0]
    x = np.array([score(r.lineup_a) - score(r.lineup_b) for r in decided])
    y = np.array([1.0 if r.point_diff > 0 else 0.0 for r in decided])
    m = baselines.fit_scalar_arrays(x, y)
    x_test = np.array([score(r.lineup_a) - score(r.lineup_b) for r in test.matchups])
    preds = baselines.predict_scalar(m, x_test)
    return m, preds


def evaluate_pagerank(train: SeasonDataset, test: SeasonDataset, cfg: ExperimentConfig) -> EvalReport:
    scores = baselines.pagerank(build_network(train), cfg.alpha, weighted=cfg.pagerank_weighted)
    _, preds = _scalar_report(PAGERANK_MODEL, train, test, scores.get)
    seen = set(scores.nodes)
    n_unseen = sum(r.lineup_a not in seen or r.lineup_b not in seen for r in test.matchups)
    return make_report(PAGERANK_MODEL, [r.pair for r in test.matchups], preds, labels_of(test),
                       n_unseen, ["lineups outside the training network score 1"] if n_unseen else [])


def evaluate_apm(train: SeasonDataset, test: SeasonDataset, cfg: ExperimentConfig) -> EvalReport:
    ratings = baselines.compute_apm(train, cfg.apm_ridge)
    lineups = train.lineups

    def score(lid):
        return baselines.lineup_apm(ratings, lineups[lid])

    _, preds = _scalar_report(APM_MODEL, train, test, score)
    seen = set(train.lineup_ids_in_matchups())
    n_unseen = sum(r.lineup_a not in seen or r.lineup_b not in seen for r in test.matchups)
    return make_report(APM_MODEL, [r.pair for r in test.matchups], preds, labels_of(test), n_unseen)


def run_evaluation(ds: SeasonDataset, cfg: ExperimentConfig) -> dict[str, EvalReport]:
    """All three models on the same split."""
    train, test = split(ds, cfg.split)
    return {
        EMBEDDING_MODEL: evaluate_embedding(train, test, cfg),
        PAGERANK_MODEL: evaluate_pagerank(train, test, cfg),
        APM_MODEL: evaluate_apm(train, test, cfg),
    }


def lineup_win_probabilities(fitted: FittedEmbeddingModel, ds: SeasonDataset) -> dict[int, float]:
    """Mean probability of each lineup beating every lineup of the other teams."""
    ds.require_teams()
    ids = sorted(ds.lineups)
    X = np.stack([fitted.vector(lid)[0] for lid in ids])
    teams = np.array([ds.team_of[lid] for lid in ids])
    out = {}
    for k, lid in enumerate(ids):
        opp = teams != teams[k]
        if not opp.any():
            continue
        probs = btmodel.predict(fitted.model, np.broadcast_to(X[k], X[opp].shape), X[opp])
        out[lid] = float(np.mean(probs))
    return out


def rate_teams(ds: SeasonDataset, cfg: ExperimentConfig,
               fitted: FittedEmbeddingModel | None = None) -> list[TeamRating]:
    """Team ratings from a model fitted on the whole season; teams without a qualifying lineup are skipped."""
    fitted = fitted or fit_embedding_model(ds, cfg)
    probs = lineup_win_probabilities(fitted, ds)
    minutes = ds.lineup_minutes()
    out = []
    for team in sorted(set(ds.team_of.values())):
        ids = [lu.id for lu in ds.team_lineups(team)]
        try:
            out.append(team_rating(team, probs, minutes, ids))
        except ValueError:
            continue
    return out
