"""Acceptance criteria 1-8, each reported as one PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -s`` (the lines are
also written when output is captured, via the terminal reporter).
"""

import time

import numpy as np
import pytest

from bylinerank.cli import main
from bylinerank.compare import EmptySelection, Threshold, compare_lists, quartile_transition, retention, shift_distribution, spearman
from bylinerank.corpus import DatasetKind, EligibilityConfig
from bylinerank.credit import Regime, allocate_many
from bylinerank.pipeline import run_pipeline
from bylinerank.ranking import percentile_rank
from bylinerank.scoring import INDICATORS, build_baselines, score_all
from bylinerank.synth import FieldSpec, SynthConfig, generate

from .test_scoring import brute_force_scores


@pytest.fixture
def report(request):
    terminal = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        if terminal is not None:
            terminal.write_line("")
            terminal.write_line(line)
        else:
            print(line)
        assert ok, line

    return emit


@pytest.fixture(scope="module")
def default_impact():
    cfg = SynthConfig(seed=42, position_talent_coupling=1.0)
    t0 = time.perf_counter()
    res = run_pipeline(generate(cfg).corpus, EligibilityConfig(dataset_kind=DatasetKind.IMPACT))
    return cfg, res, time.perf_counter() - t0


def test_criterion_1_conservation(report):
    rng = np.random.default_rng(2024)
    n_bylines = 100_000
    t0 = time.perf_counter()
    sizes = rng.integers(1, 201, size=n_bylines)
    # random affiliations for the two slots that decide the mode
    first = rng.integers(0, 5, size=n_bylines)
    last = rng.integers(0, 5, size=n_bylines)
    intra = (first == last).astype(np.int8)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    worst = 0.0
    violations = 0
    for regime in (Regime.WEIGHTED, Regime.FRACTIONAL):
        w = allocate_many(sizes, intra, regime)
        err = np.abs(np.add.reduceat(w, starts) - 1.0)
        violations += int((err > 1e-12).sum())
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - t0
    report(1, violations == 0 and elapsed < 10,
           f"{n_bylines} bylines x 2 regimes, {violations} violations, max |sum-1| {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_literal_fractions(report):
    bad = []
    for n in range(3, 51):
        w = allocate_many(np.array([n]), np.array([1]), Regime.WEIGHTED)
        if not (w[0] == 0.40 and w[-1] == 0.40 and all(x == 0.20 / (n - 2) for x in w[1:-1])):
            bad.append(("intra", n))
        if n >= 5:
            w = allocate_many(np.array([n]), np.array([0]), Regime.WEIGHTED)
            ok = (w[0] == 0.30 and w[-1] == 0.30 and w[1] == 0.15 and w[-2] == 0.15
                  and all(x == 0.10 / (n - 4) for x in w[2:-2]))
            if not ok:
                bad.append(("extra", n))
    report(2, not bad, f"n=3..50 exact equality, mismatches {bad or 'none'}")


def test_criterion_3_oracle(report):
    counts = ({"full": 24, "associate": 22, "assistant": 21},) * 2 + ({"full": 24, "associate": 22, "assistant": 20},)
    cfg = SynthConfig(seed=123, fields=[FieldSpec(f"F/{k}", "D", c) for k, c in enumerate(counts, 1)])
    assert cfg.n_researchers == 200
    t0 = time.perf_counter()
    corpus = generate(cfg).corpus
    base = build_baselines(corpus)
    cards = {c.researcher_id: c for c in score_all(corpus, base)}
    oracle = brute_force_scores(corpus, base)
    worst = 0.0
    for rid, want in oracle.items():
        got = cards[rid].values()
        worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
    elapsed = time.perf_counter() - t0
    same_ids = set(cards) == set(oracle)
    report(3, same_ids and worst <= 1e-12 and elapsed < 30,
           f"{len(corpus.researchers)} researchers ({len(oracle)} with publications) x 6 indicators, max abs diff {worst:.2e}, {elapsed:.2f}s")


def test_criterion_4_ranking(report):
    rng = np.random.default_rng(77)
    failures = []
    for g in range(1000):
        n = int(rng.integers(2, 80))
        scores = rng.integers(-15, 15, size=n).astype(float) if g % 2 else rng.normal(size=n)
        ids = [f"r{k}" for k in range(n)]
        pct = percentile_rank(dict(zip(ids, scores)))
        p = np.array([pct[i] for i in ids])
        lo, hi = scores.min(), scores.max()
        if lo < hi:
            # 0 and 100 are attained by an untied minimum and maximum
            if (scores == lo).sum() == 1 and p.min() != 0:
                failures.append((g, "min endpoint"))
            if (scores == hi).sum() == 1 and p.max() != 100:
                failures.append((g, "max endpoint"))
        gt = scores[:, None] > scores[None, :]
        eq = scores[:, None] == scores[None, :]
        if not (p[:, None] > p[None, :])[gt].all():
            failures.append((g, "monotone"))
        if not (p[:, None] == p[None, :])[eq].all():
            failures.append((g, "ties"))
        k, c = float(rng.integers(1, 50)), float(rng.integers(-100, 100))
        if g % 2:
            moved = percentile_rank(dict(zip(ids, k * scores + c)))
        else:
            moved = percentile_rank(dict(zip(ids, np.exp(scores))))  # any strictly increasing map
        if moved != pct:
            failures.append((g, "invariance"))
    report(4, not failures, f"1000 peer groups, failures {failures[:5] or 'none'}")


def test_criterion_5_self_identities(report, default_impact):
    _, res, _ = default_impact
    problems = []
    lists = {}
    for (field, rank, ind), rl in res.rankings.items():
        lists.setdefault(ind, []).append(rl)
        m = quartile_transition(rl, rl)
        if abs(np.trace(m) - 1) > 1e-12:
            problems.append(("trace", field, rank, ind))
        if shift_distribution(rl.percentiles, rl.percentiles).histogram[0][2] != 1.0:
            problems.append(("shift", field, rank, ind))
        if len(set(rl.scores.values())) > 1 and spearman(rl.percentiles, rl.percentiles) != 1.0:
            problems.append(("spearman", field, rank, ind))
        for kind in Threshold:
            try:
                if retention(rl, rl, kind) != 0.0:
                    problems.append(("retention", field, rank, ind, kind.value))
            except EmptySelection:  # nobody selected, nothing to lose
                pass
    for ind in INDICATORS:
        if ind not in lists:
            continue
        rep = compare_lists(lists[ind], lists[ind], (ind, ind), "total", "Total")
        ok = (rep.spearman == 1.0 and abs(np.trace(rep.quartile_matrix) - 1) < 1e-12
              and rep.lost_top10 == 0 and rep.lost_above_median == 0 and rep.shift.histogram[0][2] == 1.0)
        if not ok:
            problems.append(("pooled", ind))
    report(5, not problems, f"{len(res.rankings)} ranking lists, pooled per indicator, problems {problems[:5] or 'none'}")


def test_criterion_6_ordering(report, default_impact):
    cfg, impact, impact_time = default_impact
    t0 = time.perf_counter()
    output = run_pipeline(generate(cfg).corpus, EligibilityConfig(dataset_kind=DatasetKind.OUTPUT))
    elapsed = impact_time + time.perf_counter() - t0
    lines = []
    ok = cfg.n_researchers >= 1000
    for d in sorted(impact.rollups[("wfi", "i")]):
        r = {p: impact.rollups[p][d].general.spearman for p in impact.pairs}
        s = {p: output.rollups[p][d].general.spearman for p in output.pairs}
        good = (r[("fi", "i")] > r[("wfi", "fi")] > r[("wfi", "i")]
                and s[("fo", "o")] >= s[("wfo", "fo")] > s[("wfo", "o")])
        ok = ok and good
        lines.append(
            f"{d}: FI-I {r[('fi', 'i')]:.3f} > WFI-FI {r[('wfi', 'fi')]:.3f} > WFI-I {r[('wfi', 'i')]:.3f}; "
            f"FO-O {s[('fo', 'o')]:.3f} >= WFO-FO {s[('wfo', 'fo')]:.3f} > WFO-O {s[('wfo', 'o')]:.3f}"
        )
    ok = ok and elapsed < 60
    report(6, ok, f"seed 42, {cfg.n_researchers} researchers, {elapsed:.1f}s; " + " | ".join(lines))


def test_criterion_7_coupling(report, default_impact):
    cfg, coupled, _ = default_impact
    loose = SynthConfig(seed=cfg.seed, fields=cfg.fields, position_talent_coupling=0.0)
    uncoupled = run_pipeline(generate(loose).corpus, EligibilityConfig(dataset_kind=DatasetKind.IMPACT))
    hi = coupled.totals[("wfi", "fi")].shift.mean
    lo = uncoupled.totals[("wfi", "fi")].shift.mean
    report(7, lo < hi, f"mean |shift| WFI vs FI: coupling 1 -> {hi:.3f}, coupling 0 -> {lo:.3f}")


def test_criterion_8_determinism(report, tmp_path):
    paths = generate(SynthConfig(seed=42)).write(tmp_path / "corpus")
    bundles = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        code = main(["--quiet", "pipeline", str(paths["researchers"]), str(paths["publications"]), "--out", str(out)])
        assert code == 0
        bundles.append({p.relative_to(out): p.read_bytes() for p in out.rglob("*") if p.is_file()})
    same = bundles[0] == bundles[1]
    report(8, same, f"two pipeline runs, {len(bundles[0])} files each, byte-identical: {same}")
