"""Synthetic seasons with planted lineup abilities."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .datamodel import LINEUP_SIZE, Lineup, MatchupRecord, SeasonDataset


@dataclass(frozen=True)
class SynthConfig:
    n_teams: int = 8
    lineups_per_team: int = 6
    ability_sd: float = 1.0
    noise_sd: float = 0.5
    matchup_density: float = 0.5
    minutes_range: tuple[float, float] = (1.0, 20.0)
    seed: int = 7
    players_per_team: int = 8

    def __post_init__(self):
        if self.n_teams < 2 or self.lineups_per_team < 2:
            raise ValueError("need at least 2 teams and 2 lineups per team")
        if not self.ability_sd > 0 or self.noise_sd < 0:
            raise ValueError("ability_sd must be positive and noise_sd non-negative")
        if not 0 < self.matchup_density <= 1:
            raise ValueError("matchup_density must lie in (0, 1]")
        lo, hi = self.minutes_range
        if not 0 < lo <= hi:
            raise ValueError(f"bad minutes_range {self.minutes_range}")
        if self.players_per_team < LINEUP_SIZE + 1:
            raise ValueError(f"players_per_team must exceed {LINEUP_SIZE}")


def _team_lineups(rng, pool: list[str], n: int) -> list[frozenset[str]]:
    """Chain of distinct lineups, each a 1-2 player substitution of the previous one."""
    current = frozenset(rng.choice(pool, LINEUP_SIZE, replace=False).tolist())
    out = [current]
    seen = {current}
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 10_000:
            raise ValueError("player pool too small for the requested number of lineups")
        n_swap = int(rng.integers(1, 3))
        leaving = rng.choice(sorted(current), n_swap, replace=False).tolist()
        bench = sorted(set(pool) - current)
        entering = rng.choice(bench, n_swap, replace=False).tolist()
        cand = (current - set(leaving)) | set(entering)
        if cand in seen:
            # restart the chain from a random earlier lineup
            current = out[int(rng.integers(len(out)))]
            continue
        out.append(cand)
        seen.add(cand)
        current = cand
    return out


def generate(cfg: SynthConfig) -> tuple[SeasonDataset, dict[int, float]]:
    """Build a season and the latent ability of every lineup.

    Only cross-team pairs are played, each with probability
    ``matchup_density``. A played pair gets uniform minutes and a per-minute
    margin drawn from ``Normal(ability_a - ability_b, noise_sd**2)``.
    """
    rng = np.random.default_rng(cfg.seed)
    lineups: dict[int, Lineup] = {}
    team_of: dict[int, str] = {}
    next_id = 1
    width = len(str(cfg.n_teams - 1))
    for t in range(cfg.n_teams):
        team = f"T{t:0{width}d}"
        pool = [f"{team}P{k}" for k in range(cfg.players_per_team)]
        for players in _team_lineups(rng, pool, cfg.lineups_per_team):
            lineups[next_id] = Lineup(next_id, players)
            team_of[next_id] = team
            next_id += 1

    ids = sorted(lineups)
    ability = dict(zip(ids, rng.normal(0.0, cfg.ability_sd, len(ids)).tolist()))
    lo, hi = cfg.minutes_range
    records = []
    for ia, a in enumerate(ids):
        for b in ids[ia + 1:]:
            if team_of[a] == team_of[b] or rng.random() >= cfg.matchup_density:
                continue
            minutes = float(rng.uniform(lo, hi))
            rate = ability[a] - ability[b] + cfg.noise_sd * rng.standard_normal()
            records.append(MatchupRecord(a, b, minutes, rate * minutes))
    return SeasonDataset(lineups, tuple(records), team_of), ability


def bayes_accuracy(ds: SeasonDataset, ability: dict[int, float]) -> float:
    """Accuracy of picking the higher-ability lineup, over the untied records."""
    hits = n = 0
    for rec in ds.matchups:
        if rec.point_diff == 0:
            continue
        n += 1
        hits += (ability[rec.lineup_a] > ability[rec.lineup_b]) == (rec.point_diff > 0)
    return hits / n if n else float("nan")


def dump_abilities(ability: dict[int, float], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["lineup_id", "ability"])
    for lid in sorted(ability):
        writer.writerow([lid, repr(ability[lid])])


def load_abilities(stream) -> dict[int, float]:
    return {int(r["lineup_id"]): float(r["ability"]) for r in csv.DictReader(stream)}
