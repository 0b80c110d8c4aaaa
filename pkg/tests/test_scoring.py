import statistics
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bylinerank.corpus import Corpus, EligibilityConfig, filter_eligible
from bylinerank.scoring import (
    BaselineTable,
    MissingBaseline,
    build_baselines,
    normalized_impact,
    score_all,
)
from bylinerank.synth import SynthConfig, generate

from .conftest import make_byline, make_corpus, make_pub, make_researcher


def brute_force_scores(corpus: Corpus, baselines: BaselineTable):
    """Straight-line per-researcher evaluation, written without the batch kernels."""

    def weighted_share(byline, pos):
        n = len(byline)
        intra = byline[0].university_id == byline[-1].university_id
        if n == 1:
            return 1.0
        if intra:
            named = {0: 0.4, n - 1: 0.4}
            pool, rest = 0.2, n - 2
        else:
            named = {0: 0.3, n - 1: 0.3}
            if n >= 3:
                named[1] = 0.15
            if n >= 4:
                named.setdefault(n - 2, 0.15)
            pool, rest = 0.1, n - len(named)
        if rest == 0:
            total = sum(named.values())
            return named[pos] / total
        return named.get(pos, pool / rest)

    out = {}
    for rid, r in corpus.researchers.items():
        totals = [0.0] * 6
        mine = [p for p in corpus.publications.values() if rid in p.tracked_ids]
        if not mine:
            continue
        for p in mine:
            pos = next(k for k, s in enumerate(p.byline) if s.researcher_id == rid)
            n = len(p.byline)
            w = weighted_share(p.byline, pos)
            f = 1.0 / n
            c = 0.0
            if p.citations:
                c = sum(wt * p.citations / baselines.entries[(p.year, cat)] for cat, wt in p.categories)
            for k, v in enumerate((w, f, 1.0, c * w, c * f, c)):
                totals[k] += v
        out[rid] = [v / r.years_active for v in totals]
    return out


def test_baseline_medians():
    pubs = [make_pub(f"P{k}", 2005, c, make_byline(["U"]), (("A", 1.0),)) for k, c in enumerate([1, 2, 3, 4, 100, 0, 0])]
    pubs += [make_pub(f"Q{k}", 2006, c, make_byline(["U"]), (("A", 1.0),)) for k, c in enumerate([2, 4])]
    pubs += [make_pub(f"Z{k}", 2007, 0, make_byline(["U"]), (("A", 1.0),)) for k in range(3)]
    b = build_baselines(make_corpus([], pubs))
    assert b.entries == {(2005, "A"): 3.0, (2006, "A"): 3.0}
    assert (2007, "A") not in b


def test_multi_category_publication_counts_in_each_cell():
    pubs = [
        make_pub("P1", 2005, 4, make_byline(["U"]), (("A", 0.5), ("B", 0.5))),
        make_pub("P2", 2005, 8, make_byline(["U"]), (("A", 1.0),)),
    ]
    b = build_baselines(make_corpus([], pubs))
    assert b.entries == {(2005, "A"): 6.0, (2005, "B"): 4.0}


def test_normalized_impact():
    b = BaselineTable({(2005, "A"): 5.0, (2005, "B"): 6.0, (2006, "A"): 2.0})
    assert normalized_impact(make_pub("P", 2005, 10, make_byline(["U"]), (("A", 1.0),)), b) == 2.0
    two = make_pub("P", 2006, 6, make_byline(["U"]), (("A", 0.5), ("B", 0.5)))
    b2 = BaselineTable({(2006, "A"): 2.0, (2006, "B"): 6.0})
    assert normalized_impact(two, b2) == pytest.approx(0.5 * 3 + 0.5 * 1, abs=1e-15)
    assert normalized_impact(make_pub("P", 2008, 0, make_byline(["U"]), (("Q", 1.0),)), b) == 0.0
    with pytest.raises(MissingBaseline):
        normalized_impact(make_pub("P", 2008, 1, make_byline(["U"]), (("Q", 1.0),)), b)


def test_single_publication_all_indicators():
    r = make_researcher("R1", years=5)
    # 5 intra-mural authors, R1 first: weight 0.4
    p = make_pub("P1", 2005, 10, make_byline(["U1", "X", "Y", "Z", "U1"], {0: "R1"}))
    c = make_corpus([r], [p])
    card, = score_all(c, BaselineTable({(2005, "Cat"): 5.0}))
    assert card.wfo == pytest.approx(0.08, abs=1e-15)
    assert card.wfi == pytest.approx(0.16, abs=1e-15)
    assert card.fo == pytest.approx(0.04, abs=1e-15)
    assert card.o == pytest.approx(0.2, abs=1e-15)
    assert card.i == pytest.approx(0.4, abs=1e-15)


def test_two_publications_weighted_impact():
    r = make_researcher("R1", years=4)
    p1 = make_pub("P1", 2005, 6, make_byline(["U1", "U2"], {0: "R1"}))  # w = 0.5, impact 1.2
    p2 = make_pub("P2", 2006, 6, make_byline(["U1", "U2", "U3", "U4"], {0: "R1"}))  # w = 1/3, impact 3.0
    base = BaselineTable({(2005, "Cat"): 5.0, (2006, "Cat"): 2.0})
    card, = score_all(make_corpus([r], [p1, p2]), base)
    assert card.wfi == pytest.approx((0.5 * 1.2 + (1 / 3) * 3.0) / 4, abs=1e-15)
    assert card.wfi == pytest.approx(0.4, abs=1e-15)


def test_sole_author_regimes_coincide():
    r = make_researcher("R1", years=3)
    pubs = [make_pub(f"P{k}", 2005, k, make_byline(["U1"], {0: "R1"})) for k in range(4)]
    c = make_corpus([r], pubs)
    card, = score_all(c, build_baselines(c))
    assert card.wfo == card.fo == card.o
    assert card.wfi == card.fi == card.i


def test_researchers_without_publications_are_omitted():
    c = make_corpus([make_researcher("A"), make_researcher("B")],
                    [make_pub("P", 2005, 1, make_byline(["U"], {0: "A"}))])
    assert [s.researcher_id for s in score_all(c, build_baselines(c))] == ["A"]


@pytest.fixture(scope="module")
def small_synth():
    cfg = SynthConfig(
        seed=9,
        fields=[{"field_code": "F/1", "discipline_code": "D", "counts": {"full": 6, "associate": 4}},
                {"field_code": "F/2", "discipline_code": "D", "counts": {"assistant": 8}}],
        pubs_mu=1.0,
    )
    return generate(cfg).corpus


def test_oracle_equivalence_small(small_synth):
    base = build_baselines(small_synth)
    oracle = brute_force_scores(small_synth, base)
    cards = score_all(small_synth, base)
    assert {c.researcher_id for c in cards} == set(oracle)
    for c in cards:
        for got, want in zip(c.values(), oracle[c.researcher_id]):
            assert abs(got - want) <= 1e-12


def test_invariants_on_synthetic(small_synth):
    base = build_baselines(small_synth)
    cards = score_all(small_synth, base)
    for c in cards:
        assert c.o >= c.fo >= 0 and c.o >= c.wfo >= 0
        assert c.i >= c.fi >= 0 and c.i >= c.wfi >= 0


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 50))
def test_linearity_in_citations(small_synth, k):
    base = build_baselines(small_synth)
    scaled = Corpus(
        small_synth.researchers,
        {pid: replace(p, citations=p.citations * k) for pid, p in small_synth.publications.items()},
        small_synth.window,
    )
    before = {c.researcher_id: c for c in score_all(small_synth, base)}
    after = {c.researcher_id: c for c in score_all(scaled, base)}
    assert before.keys() == after.keys()
    for rid, a in after.items():
        b = before[rid]
        assert (a.wfo, a.fo, a.o) == (b.wfo, b.fo, b.o)
        for x, y in ((a.wfi, b.wfi), (a.fi, b.fi), (a.i, b.i)):
            assert x == pytest.approx(k * y, rel=1e-12, abs=1e-15)


def test_order_independence(small_synth):
    base = build_baselines(small_synth)
    reversed_pubs = dict(reversed(list(small_synth.publications.items())))
    c2 = Corpus(dict(reversed(list(small_synth.researchers.items()))), reversed_pubs, small_synth.window)
    assert score_all(c2, base) == score_all(small_synth, base)


def test_conservation_over_full_byline(small_synth):
    from bylinerank.credit import Regime, allocate

    for p in small_synth.publications.values():
        assert abs(allocate(p.byline, Regime.WEIGHTED).sum() - 1) <= 1e-12
        assert abs(allocate(p.byline, Regime.FRACTIONAL).sum() - 1) <= 1e-12


def test_baseline_csv_roundtrip(tmp_path, small_synth):
    base = build_baselines(small_synth)
    base.write_csv(tmp_path / "b.csv")
    assert BaselineTable.read_csv(tmp_path / "b.csv").entries == base.entries
    assert all(v >= 1 for v in base.entries.values())
    cells = {}
    for p in small_synth.publications.values():
        for cat, _ in p.categories:
            if p.citations >= 1:
                cells.setdefault((p.year, cat), []).append(p.citations)
    assert base.entries == {k: float(statistics.median(v)) for k, v in cells.items()}


def test_scoring_after_filtering_keeps_external_mass(small_synth):
    eligible, _ = filter_eligible(small_synth, EligibilityConfig(min_per_rank=1, min_years=1))
    base = build_baselines(small_synth)
    for c in score_all(eligible, base):
        assert c.wfo <= c.o
