"""Lineups, matchup records and CSV ingestion.

A season is stored as one aggregate record per unordered lineup pair, oriented
so that ``lineup_a < lineup_b`` and ``point_diff`` is points of ``a`` minus
points of ``b``.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

PlayerId = str

LINEUP_SIZE = 5

CSV_COLUMNS = (
    "lineup_a_id",
    "lineup_b_id",
    "minutes",
    "point_diff",
    "players_a",
    "players_b",
    "team_a",
    "team_b",
)


class IngestError(ValueError):
    """Raised for malformed or inconsistent matchup input."""


@dataclass(frozen=True)
class Lineup:
    id: int
    players: frozenset[PlayerId]

    def __post_init__(self):
        if len(self.players) != LINEUP_SIZE:
            raise IngestError(
                f"lineup {self.id}: expected {LINEUP_SIZE} distinct players, "
                f"got {len(self.players)}"
            )
        if any(not p for p in self.players):
            raise IngestError(f"lineup {self.id}: empty player id")


@dataclass(frozen=True)
class MatchupRecord:
    lineup_a: int
    lineup_b: int
    minutes: float
    point_diff: float

    def __post_init__(self):
        if self.lineup_a >= self.lineup_b:
            raise IngestError(
                f"record ({self.lineup_a}, {self.lineup_b}): lineup_a must be the smaller id"
            )
        if not self.minutes > 0:
            raise IngestError(
                f"record ({self.lineup_a}, {self.lineup_b}): minutes must be positive, "
                f"got {self.minutes}"
            )

    @property
    def pair(self) -> tuple[int, int]:
        return (self.lineup_a, self.lineup_b)


@dataclass(frozen=True)
class SeasonDataset:
    lineups: Mapping[int, Lineup]
    matchups: tuple[MatchupRecord, ...]
    team_of: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for rec in self.matchups:
            for lid in rec.pair:
                if lid not in self.lineups:
                    raise IngestError(f"matchup references unknown lineup {lid}")
            if rec.pair in seen:
                raise IngestError(f"duplicate record for pair {rec.pair}")
            seen.add(rec.pair)

    def with_matchups(self, records: Iterable[MatchupRecord]) -> "SeasonDataset":
        """Same lineup table and teams, different set of records."""
        recs = tuple(sorted(records, key=lambda r: r.pair))
        return SeasonDataset(self.lineups, recs, self.team_of)

    def lineup_ids_in_matchups(self) -> list[int]:
        ids = set()
        for rec in self.matchups:
            ids.update(rec.pair)
        return sorted(ids)

    def lineup_minutes(self) -> dict[int, float]:
        """Total court time of each lineup over all its records."""
        out: dict[int, float] = defaultdict(float)
        for rec in self.matchups:
            out[rec.lineup_a] += rec.minutes
            out[rec.lineup_b] += rec.minutes
        return dict(out)

    def team_lineups(self, team: str) -> list[Lineup]:
        return [self.lineups[lid] for lid in sorted(self.lineups) if self.team_of.get(lid) == team]

    def require_teams(self, lineup_ids: Iterable[int] | None = None) -> None:
        ids = self.lineups.keys() if lineup_ids is None else lineup_ids
        missing = sorted(lid for lid in ids if lid not in self.team_of)
        if missing:
            shown = ", ".join(map(str, missing[:10]))
            raise IngestError(f"no team recorded for lineup(s) {shown}")


def player_overlap(li: Lineup, lj: Lineup) -> int:
    """Number of players the two lineups have in common."""
    return len(li.players & lj.players)


def _parse_players(raw: str, lineup_id: int, line: int) -> frozenset[PlayerId]:
    tokens = [t.strip() for t in raw.split("|")]
    players = frozenset(tokens)
    if len(tokens) != LINEUP_SIZE or len(players) != LINEUP_SIZE or "" in players:
        raise IngestError(
            f"line {line}: lineup {lineup_id} must list {LINEUP_SIZE} distinct players, got {raw!r}"
        )
    return players


def _parse_number(raw: str, name: str, line: int, kind=float):
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise IngestError(f"line {line}: column {name!r} is not a valid number: {raw!r}") from None


def ingest(stream: TextIO, min_minutes: float = 0.0) -> SeasonDataset:
    """Read matchup rows, validate them and aggregate per unordered pair.

    Rows for the same pair are summed after orienting each one to the smaller
    lineup id. Aggregated records with fewer than ``min_minutes`` minutes are
    dropped (their lineups stay in the table).
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return SeasonDataset({}, ())
    header = [h.strip() for h in header]
    if tuple(header) != CSV_COLUMNS:
        raise IngestError(f"bad header {header}; expected {','.join(CSV_COLUMNS)}")

    lineups: dict[int, Lineup] = {}
    team_of: dict[int, str] = {}
    minutes: dict[tuple[int, int], float] = defaultdict(float)
    diffs: dict[tuple[int, int], float] = defaultdict(float)

    def register(lid: int, players: frozenset[PlayerId], team: str, line: int):
        known = lineups.get(lid)
        if known is None:
            lineups[lid] = Lineup(lid, players)
        elif known.players != players:
            raise IngestError(f"line {line}: lineup {lid} redefined with a different player set")
        team = team.strip()
        if team:
            if team_of.setdefault(lid, team) != team:
                raise IngestError(
                    f"line {line}: lineup {lid} assigned to both {team_of[lid]!r} and {team!r}"
                )

    for line, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_COLUMNS):
            raise IngestError(f"line {line}: expected {len(CSV_COLUMNS)} columns, got {len(row)}")
        a = _parse_number(row[0], "lineup_a_id", line, int)
        b = _parse_number(row[1], "lineup_b_id", line, int)
        mins = _parse_number(row[2], "minutes", line)
        diff = _parse_number(row[3], "point_diff", line)
        if a == b:
            raise IngestError(f"line {line}: lineup {a} matched against itself")
        if not mins > 0:
            raise IngestError(f"line {line}: minutes must be positive, got {row[2]!r}")
        register(a, _parse_players(row[4], a, line), row[6], line)
        register(b, _parse_players(row[5], b, line), row[7], line)
        if a > b:
            a, b, diff = b, a, -diff
        minutes[(a, b)] += mins
        diffs[(a, b)] += diff

    records = [
        MatchupRecord(a, b, minutes[(a, b)], diffs[(a, b)])
        for (a, b) in sorted(minutes)
        if minutes[(a, b)] >= min_minutes
    ]
    return SeasonDataset(lineups, tuple(records), team_of)


def ingest_path(path, min_minutes: float = 0.0) -> SeasonDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        return ingest(fh, min_minutes=min_minutes)


def serialize(ds: SeasonDataset, stream: TextIO) -> None:
    """Write ``ds`` in the ingestion CSV format (floats written round-trip exact)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in ds.matchups:
        la, lb = ds.lineups[rec.lineup_a], ds.lineups[rec.lineup_b]
        writer.writerow([
            rec.lineup_a,
            rec.lineup_b,
            repr(float(rec.minutes)),
            repr(float(rec.point_diff)),
            "|".join(sorted(la.players)),
            "|".join(sorted(lb.players)),
            ds.team_of.get(rec.lineup_a, ""),
            ds.team_of.get(rec.lineup_b, ""),
        ])


def to_csv_string(ds: SeasonDataset) -> str:
    buf = io.StringIO()
    serialize(ds, buf)
    return buf.getvalue()
