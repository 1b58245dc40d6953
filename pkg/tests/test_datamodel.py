import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchnet.datamodel import (
    IngestError,
    Lineup,
    MatchupRecord,
    ingest,
    player_overlap,
    to_csv_string,
)

from conftest import HEADER, ROSTERS, csv_text, row


def test_rows_for_same_pair_are_summed_and_oriented():
    ds = ingest(io.StringIO(csv_text(row(7, 3, 2, 4), row(7, 3, 3, -1))))
    assert ds.matchups == (MatchupRecord(3, 7, 5.0, -3.0),)


def test_four_player_lineup_is_rejected_with_its_id():
    text = HEADER + "1,3,4,8,a1|a2|a3|a4,b1|b2|b3|b4|b5,,\n"
    with pytest.raises(IngestError, match="lineup 1"):
        ingest(io.StringIO(text))


def test_empty_stream():
    ds = ingest(io.StringIO(""))
    assert ds.matchups == () and dict(ds.lineups) == {}
    ds = ingest(io.StringIO(HEADER))
    assert ds.matchups == ()


@pytest.mark.parametrize(
    "line, message",
    [
        ("1,3,4,8,a1|a2|a3|a4|a5,b1|b2|b3|b4|b5,\n", "columns"),
        ("1,3,four,8,a1|a2|a3|a4|a5,b1|b2|b3|b4|b5,,\n", "minutes"),
        ("x,3,4,8,a1|a2|a3|a4|a5,b1|b2|b3|b4|b5,,\n", "lineup_a_id"),
        ("1,3,0,8,a1|a2|a3|a4|a5,b1|b2|b3|b4|b5,,\n", "positive"),
        ("1,3,-2,8,a1|a2|a3|a4|a5,b1|b2|b3|b4|b5,,\n", "positive"),
        ("1,1,4,8,a1|a2|a3|a4|a5,a1|a2|a3|a4|a5,,\n", "itself"),
        ("1,3,4,8,a1|a1|a3|a4|a5,b1|b2|b3|b4|b5,,\n", "distinct"),
    ],
)
def test_malformed_rows(line, message):
    with pytest.raises(IngestError, match=message):
        ingest(io.StringIO(HEADER + line))


def test_redefined_lineup_is_rejected():
    text = HEADER + (
        "1,3,4,8,a1|a2|a3|a4|a5,b1|b2|b3|b4|b5,,\n"
        "1,7,4,8,a1|a2|a3|a4|a9,c1|c2|c3|c4|c5,,\n"
    )
    with pytest.raises(IngestError, match="lineup 1 redefined"):
        ingest(io.StringIO(text))


def test_bad_header():
    with pytest.raises(IngestError, match="header"):
        ingest(io.StringIO("a,b,c\n"))


def test_teams_are_optional():
    ds = ingest(io.StringIO(csv_text(row(1, 3, 4, 8, teams=False))))
    assert dict(ds.team_of) == {}
    with pytest.raises(IngestError, match="no team"):
        ds.require_teams()


def test_min_minutes_filter(small_ds):
    text = csv_text(row(1, 3, 4, 8), row(3, 2, 2, 1))
    ds = ingest(io.StringIO(text), min_minutes=3)
    assert [r.pair for r in ds.matchups] == [(1, 3)]
    assert 2 in ds.lineups


def test_player_overlap_examples():
    li = Lineup(1, frozenset("abcde"))
    assert player_overlap(li, Lineup(2, frozenset("abcxy"))) == 3
    assert player_overlap(li, Lineup(3, frozenset("vwxyz"))) == 0
    assert player_overlap(li, li) == 5


def test_lineup_size_enforced():
    with pytest.raises(IngestError):
        Lineup(9, frozenset("abcd"))


def test_lineup_minutes(small_ds):
    mins = small_ds.lineup_minutes()
    assert mins[1] == 4 + 5
    assert mins[4] == 3 + 6


# -- properties -------------------------------------------------------------

ids = list(ROSTERS)
records = st.lists(
    st.tuples(
        st.sampled_from(ids),
        st.sampled_from(ids),
        st.floats(0.01, 48, allow_nan=False),
        st.integers(-30, 30).map(float),
    ).filter(lambda t: t[0] != t[1]),
    max_size=12,
)


@settings(max_examples=60, deadline=None)
@given(records)
def test_ingest_is_idempotent(recs):
    ds = ingest(io.StringIO(csv_text(*(row(a, b, m, d) for a, b, m, d in recs))))
    again = ingest(io.StringIO(to_csv_string(ds)))
    assert again == ds
    assert all(r.lineup_a < r.lineup_b for r in ds.matchups)


@settings(max_examples=60, deadline=None)
@given(records)
def test_swapping_columns_and_negating_is_invariant(recs):
    ds = ingest(io.StringIO(csv_text(*(row(a, b, m, d) for a, b, m, d in recs))))
    swapped = ingest(io.StringIO(csv_text(*(row(b, a, m, -d) for a, b, m, d in recs))))
    assert swapped == ds


@given(st.sets(st.sampled_from("abcdefghij"), min_size=5, max_size=5),
       st.sets(st.sampled_from("abcdefghij"), min_size=5, max_size=5))
def test_overlap_symmetric_and_bounded(p1, p2):
    a, b = Lineup(1, frozenset(p1)), Lineup(2, frozenset(p2))
    assert player_overlap(a, b) == player_overlap(b, a) <= 5
