import io

import pytest

from matchnet.datamodel import ingest

HEADER = "lineup_a_id,lineup_b_id,minutes,point_diff,players_a,players_b,team_a,team_b\n"

ROSTERS = {
    1: "a1|a2|a3|a4|a5",
    2: "a1|a2|a3|a4|a6",
    3: "b1|b2|b3|b4|b5",
    4: "b1|b2|b3|b6|b7",
    7: "c1|c2|c3|c4|c5",
}
TEAMS = {1: "A", 2: "A", 3: "B", 4: "B", 7: "C"}


def row(a, b, minutes, diff, teams=True):
    ta, tb = (TEAMS[a], TEAMS[b]) if teams else ("", "")
    return f"{a},{b},{minutes},{diff},{ROSTERS[a]},{ROSTERS[b]},{ta},{tb}\n"


def csv_text(*rows):
    return HEADER + "".join(rows)


@pytest.fixture
def small_ds():
    text = csv_text(
        row(1, 3, 4, 8),
        row(3, 2, 2, 1),
        row(7, 1, 5, -5),
        row(4, 7, 3, 0),
        row(2, 4, 6, -3),
    )
    return ingest(io.StringIO(text))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
