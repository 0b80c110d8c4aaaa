import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bylinerank.corpus import Rank
from bylinerank.ranking import (
    GroupTooSmall,
    PeerGroup,
    build_rankings,
    peer_groups,
    percentile_rank,
    quartile_of,
    write_rankings,
)
from bylinerank.scoring import ScoreCard

from .conftest import make_researcher


def as_map(values):
    return {f"r{k}": v for k, v in enumerate(values)}


def test_distinct_scores():
    assert list(percentile_rank(as_map([1, 2, 3, 4, 5])).values()) == [0, 25, 50, 75, 100]


def test_total_tie():
    assert list(percentile_rank(as_map([7, 7, 7])).values()) == [50, 50, 50]


def test_partial_tie():
    # tied pair holds ranks 1 and 2 -> 1.5 -> 100 * 0.5 / 2
    assert list(percentile_rank(as_map([1, 1, 3])).values()) == [25, 25, 100]


def test_too_small():
    with pytest.raises(GroupTooSmall):
        percentile_rank({"a": 1.0})


@pytest.mark.parametrize("p, q", [(100, 1), (75, 1), (74.9, 2), (50, 2), (49.99, 3), (25, 3), (24.9, 4), (0, 4)])
def test_quartiles(p, q):
    assert quartile_of(p) == q


@given(st.floats(0, 100))
def test_quartile_partition(p):
    hits = [lo <= p < hi for lo, hi in ((75, 101), (50, 75), (25, 50), (0, 25))]
    assert sum(hits) == 1
    assert quartile_of(p) == hits.index(True) + 1


score_lists = st.lists(st.integers(-20, 20), min_size=2, max_size=60)


@settings(max_examples=300, deadline=None)
@given(score_lists, st.integers(1, 9), st.integers(-100, 100))
def test_percentile_properties(scores, k, c):
    pct = percentile_rank(as_map(scores))
    vals = list(pct.values())
    assert all(0 <= p <= 100 for p in vals)
    for i in range(len(scores)):
        for j in range(len(scores)):
            if scores[i] > scores[j]:
                assert vals[i] > vals[j]
            elif scores[i] == scores[j]:
                assert vals[i] == vals[j]
    n = len(scores)
    # tied extremes sit at the mean of the ranks they share
    n_min, n_max = scores.count(min(scores)), scores.count(max(scores))
    if len(set(scores)) > 1:
        assert min(vals) == pytest.approx(100 * (n_min - 1) / 2 / (n - 1), abs=1e-12)
        assert max(vals) == pytest.approx(100 - 100 * (n_max - 1) / 2 / (n - 1), abs=1e-12)
    if n_min == 1:
        assert min(vals) == 0
    if n_max == 1:
        assert max(vals) == 100
    if len(set(scores)) == len(scores):
        assert sum(vals) / len(vals) == pytest.approx(50, abs=1e-9)
    assert percentile_rank(as_map([k * s + c for s in scores])) == pct


def cards_for(ids, base=0.0):
    return [ScoreCard(rid, *(base + k + j for j in range(6))) for k, rid in enumerate(ids)]


def test_build_rankings_cardinality_and_skips(caplog):
    rs = [make_researcher(f"A{k}", field="F/1") for k in range(3)]
    rs += [make_researcher(f"B{k}", field="F/2", rank=Rank.ASSOCIATE) for k in range(4)]
    rs += [make_researcher("C0", field="F/3")]
    groups = peer_groups(rs)
    assert [(g.field_code, g.rank) for g in groups] == [("F/1", Rank.FULL), ("F/2", Rank.ASSOCIATE), ("F/3", Rank.FULL)]
    rankings, skipped = build_rankings(cards_for([r.id for r in rs]), groups)
    assert len(rankings) == 12
    assert [g.field_code for g in skipped] == ["F/3"]
    assert "F/3" in caplog.text
    rl = rankings[("F/2", Rank.ASSOCIATE, "wfi")]
    assert rl.percentiles["B3"] == 100 and rl.quartiles["B0"] == 4


def test_export_ordering(tmp_path):
    g = PeerGroup("F/1", Rank.FULL, ("x", "y", "z"))
    cards = [ScoreCard("y", 1, 1, 1, 1, 1, 1), ScoreCard("x", 1, 1, 1, 1, 1, 1), ScoreCard("z", 0, 0, 0, 0, 0, 0)]
    rankings, _ = build_rankings(cards, [g])
    write_rankings([rankings[("F/1", Rank.FULL, "wfo")]], tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "field_code,rank,indicator,researcher_id,score,percentile,quartile"
    assert [line.split(",")[3] for line in lines[1:]] == ["x", "y", "z"]
    assert lines[1] == "F/1,full,WFO,x,1,75,1"
