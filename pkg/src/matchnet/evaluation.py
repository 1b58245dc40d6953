"""Train/test split, probabilistic scores, calibration and team ratings."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .datamodel import Lineup, SeasonDataset, player_overlap

BIN_WIDTH = 0.05
N_BINS = 20
QUALIFYING_MINUTES = 48.0


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


def split(ds: SeasonDataset, spec: SplitSpec) -> tuple[SeasonDataset, SeasonDataset]:
    """Random partition of the decided records; tied records always go to train."""
    labeled = [r for r in ds.matchups if r.point_diff != 0]
    tied = [r for r in ds.matchups if r.point_diff == 0]
    if not labeled:
        raise ValueError("no testable labels: every record is a tie")
    if len(labeled) < 5:
        raise ValueError(f"need at least 5 decided records to split, got {len(labeled)}")
    n_train = min(max(int(round(spec.train_fraction * len(labeled))), 1), len(labeled) - 1)
    order = np.random.default_rng(spec.seed).permutation(len(labeled))
    train = [labeled[k] for k in order[:n_train]] + tied
    test = [labeled[k] for k in order[n_train:]]
    return ds.with_matchups(train), ds.with_matchups(test)


def labels_of(ds: SeasonDataset) -> np.ndarray:
    """1 where the lower-id lineup outperformed; ties are not allowed."""
    if any(r.point_diff == 0 for r in ds.matchups):
        raise ValueError("tied records carry no label")
    return np.array([1.0 if r.point_diff > 0 else 0.0 for r in ds.matchups])


def _check(preds, labels):
    preds = np.asarray(preds, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if preds.shape != labels.shape:
        raise ValueError(f"length mismatch: {preds.shape} predictions vs {labels.shape} labels")
    if preds.size == 0:
        raise ValueError("need at least one observation")
    return preds, labels


def brier(preds, labels) -> float:
    """Mean squared difference between predicted probability and 0/1 outcome."""
    preds, labels = _check(preds, labels)
    err = np.where(labels == 1, 1.0 - preds, preds)
    return float(np.mean(err * err))


def accuracy(preds, labels) -> float:
    """Share of correct calls; a prediction of exactly 0.5 counts as wrong."""
    preds, labels = _check(preds, labels)
    hit = ((preds > 0.5) & (labels == 1)) | ((preds < 0.5) & (labels == 0))
    return float(np.mean(hit))


def climatology(labels) -> tuple[float, float]:
    """Base-rate probability and the Brier score of predicting it everywhere."""
    labels = np.asarray(labels, dtype=np.float64)
    if labels.size == 0:
        raise ValueError("need at least one label")
    rate = float(labels.mean())
    return rate, brier(np.full(labels.shape, rate), labels)


@dataclass(frozen=True)
class CalibrationBin:
    lo: float
    hi: float
    count: int
    predicted_mean: float | None
    empirical_rate: float | None


@dataclass(frozen=True)
class Calibration:
    bins: list[CalibrationBin]
    slope: float | None
    intercept: float | None


def _weighted_line(x, y, w):
    sw = w.sum()
    mx, my = (w @ x) / sw, (w @ y) / sw
    sxx = w @ (x - mx) ** 2
    if sxx <= 0:
        return None, None
    slope = (w @ ((x - mx) * (y - my))) / sxx
    return float(slope), float(my - slope * mx)


def calibration(preds, labels) -> Calibration:
    """Twenty 5%-wide bins plus a count-weighted least-squares line through them."""
    preds, labels = _check(preds, labels)
    edges = np.arange(N_BINS + 1) / N_BINS
    idx = np.clip(np.searchsorted(edges, preds, side="right") - 1, 0, N_BINS - 1)
    bins = []
    for k in range(N_BINS):
        sel = idx == k
        n = int(sel.sum())
        bins.append(CalibrationBin(
            float(edges[k]),
            float(edges[k + 1]),
            n,
            float(preds[sel].mean()) if n else None,
            float(labels[sel].mean()) if n else None,
        ))
    full = [b for b in bins if b.count]
    slope = intercept = None
    if len(full) >= 2:
        slope, intercept = _weighted_line(
            np.array([b.predicted_mean for b in full]),
            np.array([b.empirical_rate for b in full]),
            np.array([b.count for b in full], dtype=np.float64),
        )
    return Calibration(bins, slope, intercept)


@dataclass(frozen=True)
class TeamRating:
    team: str
    rating: float


def team_rating(team: str, win_prob: Mapping[int, float], minutes: Mapping[int, float],
                lineup_ids: Sequence[int]) -> TeamRating:
    """Minutes-weighted mean of lineup win probabilities, over lineups with > 48 minutes."""
    qual = [lid for lid in lineup_ids if minutes.get(lid, 0.0) > QUALIFYING_MINUTES]
    if not qual:
        raise ValueError(f"team {team!r} has no lineup with more than {QUALIFYING_MINUTES:g} minutes")
    g = np.array([minutes[lid] for lid in qual])
    p = np.array([win_prob[lid] for lid in qual])
    return TeamRating(team, float(g @ p / g.sum()))


def pearson(x, y) -> float | None:
    """Pearson correlation, or ``None`` when either side has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2:
        return None
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        return None
    return float(dx @ dy / math.sqrt(sxx * syy))


def similarity_distance_diag(emb, lineups: Sequence[Lineup]) -> float | None:
    """Correlation between shared-player count and embedding distance over lineup pairs."""
    embedded = [lu for lu in lineups if lu.id in emb]
    pairs = list(combinations(embedded, 2))
    if len(pairs) < 3:
        return None
    overlap = [player_overlap(a, b) for a, b in pairs]
    dist = [float(np.linalg.norm(emb[a.id] - emb[b.id])) for a, b in pairs]
    return pearson(overlap, dist)


@dataclass
class EvalReport:
    model: str
    accuracy: float
    brier: float
    brier_climatology: float
    climatology_probability: float
    bins: list[CalibrationBin]
    calibration_slope: float | None
    calibration_intercept: float | None
    n_test: int
    n_unseen: int
    predictions: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        raw = json.loads(text)
        raw["bins"] = [CalibrationBin(**b) for b in raw["bins"]]
        return cls(**raw)

    def bins_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["lo", "hi", "count", "pred_mean", "emp_rate"])
        for b in self.bins:
            writer.writerow([b.lo, b.hi, b.count,
                             "" if b.predicted_mean is None else repr(b.predicted_mean),
                             "" if b.empirical_rate is None else repr(b.empirical_rate)])


def make_report(model: str, pairs: Sequence[tuple[int, int]], preds, labels,
                n_unseen: int = 0, notes: Sequence[str] = ()) -> EvalReport:
    preds, labels = _check(preds, labels)
    cal = calibration(preds, labels)
    clim_p, clim_b = climatology(labels)
    return EvalReport(
        model=model,
        accuracy=accuracy(preds, labels),
        brier=brier(preds, labels),
        brier_climatology=clim_b,
        climatology_probability=clim_p,
        bins=cal.bins,
        calibration_slope=cal.slope,
        calibration_intercept=cal.intercept,
        n_test=int(len(labels)),
        n_unseen=int(n_unseen),
        predictions=[
            {"lineup_a": int(a), "lineup_b": int(b), "prob": float(p), "label": int(y)}
            for (a, b), p, y in zip(pairs, preds, labels)
        ],
        notes=list(notes),
    )
