"""End-to-end run: filter, score, rank, compare, and write the report bundle."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from collections import defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .compare import ComparisonReport, DisciplineRollup, compare_lists, pairs_for, rollup
from .corpus import Corpus, DatasetKind, EligibilityConfig, ExclusionLog, Rank, filter_eligible
from .credit import DEFAULT_SCHEME, WeightScheme
from .ranking import PeerGroup, RankingList, build_rankings, peer_groups, write_rankings
from .scoring import BaselineTable, ScoreCard, build_baselines, score_all, write_scorecards

TOTAL = "Total"


@dataclass
class PipelineResult:
    kind: DatasetKind
    corpus: Corpus
    exclusions: ExclusionLog
    baselines: BaselineTable
    scorecards: list[ScoreCard]
    rankings: dict[tuple[str, Rank, str], RankingList]
    skipped: list[PeerGroup]
    rollups: dict[tuple[str, str], dict[str, DisciplineRollup]]
    totals: dict[tuple[str, str], ComparisonReport]

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return pairs_for(self.kind.value)


def field_disciplines(corpus: Corpus) -> dict[str, str]:
    out: dict[str, str] = {}
    for r in corpus.researchers.values():
        prev = out.setdefault(r.field_code, r.discipline_code)
        if prev != r.discipline_code:
            raise ValueError(f"field {r.field_code!r} is assigned to both {prev!r} and {r.discipline_code!r}")
    return out


def run_pipeline(
    corpus: Corpus,
    eligibility: EligibilityConfig,
    scheme: WeightScheme = DEFAULT_SCHEME,
    baselines: BaselineTable | None = None,
    bin_width: float = 5.0,
) -> PipelineResult:
    """Run every stage on ``corpus``.

    Baselines default to the full input corpus, before eligibility filtering,
    so the citation reference population does not shrink with the filters.
    """
    if baselines is None:
        baselines = build_baselines(corpus)
    eligible, log = filter_eligible(corpus, eligibility)
    disc = field_disciplines(eligible)
    cards = score_all(eligible, baselines, scheme)
    rankings, skipped = build_rankings(cards, peer_groups(eligible.researchers.values()))

    ranked_groups = sorted({(f, rk) for (f, rk, _) in rankings}, key=lambda g: (g[0], list(Rank).index(g[1])))
    by_field: dict[str, list] = defaultdict(list)
    for g in ranked_groups:
        by_field[g[0]].append(g)

    rollups: dict[tuple[str, str], dict[str, DisciplineRollup]] = {}
    totals: dict[tuple[str, str], ComparisonReport] = {}
    for pair in pairs_for(eligibility.dataset_kind.value):
        a, b = pair

        def lists(groups, ind):
            return [rankings[(f, rk, ind)] for f, rk in groups]

        field_reports = {
            f: compare_lists(lists(gs, a), lists(gs, b), pair, "field", f, bin_width) for f, gs in sorted(by_field.items())
        }
        rollups[pair] = {}
        for d in sorted(set(disc[f] for f in by_field)):
            fs = [f for f in sorted(by_field) if disc[f] == d]
            gs = [g for f in fs for g in by_field[f]]
            pooled = compare_lists(lists(gs, a), lists(gs, b), pair, "discipline", d, bin_width)
            rollups[pair][d] = rollup({f: field_reports[f] for f in fs}, pooled)
        totals[pair] = compare_lists(lists(ranked_groups, a), lists(ranked_groups, b), pair, "total", TOTAL, bin_width)

    return PipelineResult(eligibility.dataset_kind, eligible, log, baselines, cards, rankings, skipped, rollups, totals)


# --- manifest ----------------------------------------------------------------


def _sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def build_manifest(
    researchers_path: str | Path,
    publications_path: str | Path,
    eligibility: EligibilityConfig,
    scheme: WeightScheme,
    weights_path: str | Path | None,
    baselines_path: str | Path | None,
    bin_width: float,
) -> dict:
    """Run description; ``hash`` covers every field except ``timestamp``.

    The timestamp comes from ``SOURCE_DATE_EPOCH`` when set and is null
    otherwise, so bundles stay byte-identical across reruns.
    """
    def described(path):
        return None if path is None else {"name": Path(path).name, "sha256": _sha256(path)}

    manifest = {
        "tool": "bylinerank",
        "version": __version__,
        "dataset_kind": eligibility.dataset_kind.value,
        "inputs": {"researchers": described(researchers_path), "publications": described(publications_path)},
        "eligibility": {
            "min_years": eligibility.min_years,
            "min_per_rank": eligibility.min_per_rank,
            "min_publishing_share": eligibility.min_publishing_share,
        },
        "weight_scheme": scheme.to_json(),
        "weight_scheme_sha256": hashlib.sha256(_canonical(scheme.to_json()).encode()).hexdigest(),
        "weights_file": described(weights_path),
        "baselines": described(baselines_path) if baselines_path else "auto",
        "bin_width": bin_width,
        "correlation": "spearman (average ranks of paired percentiles)",
        "shift_axis": "absolute difference of 0-100 percentiles",
        "shift_stddev": "population standard deviation",
    }
    manifest["hash"] = hashlib.sha256(_canonical(manifest).encode()).hexdigest()
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    manifest["timestamp"] = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat() if epoch else None
    )
    return manifest


# --- report rendering --------------------------------------------------------


def _num(v: float | None, scale: float = 1.0) -> str:
    return "NA" if v is None else f"{v * scale:.10g}"


def _label(pair: tuple[str, str]) -> str:
    return f"{pair[0].upper()}-{pair[1].upper()}"


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "-" for c in text)


def report_json(report: ComparisonReport, manifest_hash: str) -> dict:
    return {
        "manifest_hash": manifest_hash,
        "pair": [report.pair[0].upper(), report.pair[1].upper()],
        "scope_kind": report.scope_kind,
        "scope": report.scope,
        "observations": report.observations,
        "spearman": report.spearman,
        "shift": {
            "bin_width": report.shift.bin_width,
            "histogram": [{"bin_lo": lo, "bin_hi": hi, "share": s} for lo, hi, s in report.shift.histogram],
            "mean": report.shift.mean,
            "max": report.shift.max,
            "stddev": report.shift.stddev,
        },
        "quartile_matrix": report.quartile_matrix.tolist(),
        "changed_quartile": report.changed_quartile,
        "lost_top10": report.lost_top10,
        "lost_above_median": report.lost_above_median,
        "top10_selected": report.top10[1],
        "above_median_selected": report.above_median[1],
        "notes": {
            "correlation": "Spearman rank correlation of paired percentiles, average ranks for ties",
            "shift_axis": "histogram of |percentile_a - percentile_b|; first bin closed [0,w], then (lo,hi]",
        },
    }


def _csv_text(comment: str, header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _pair_columns(pairs) -> list[str]:
    cols = []
    for p in pairs:
        cols += [_label(p), f"{_label(p)}_field"]
    return cols


def _extreme_cells(value) -> list[str]:
    if value is None:
        return ["NA", ""]
    v, f = value
    return [_num(v), f]


def correlation_table(res: PipelineResult, mh: str) -> str:
    pairs = res.pairs
    rows = []
    for d in sorted(res.rollups[pairs[0]]):
        ru = [res.rollups[p][d] for p in pairs]
        rows.append([d, "observations"] + sum(([str(r.general.observations), ""] for r in ru), []))
        rows.append([d, "general_correlation"] + sum(([_num(r.general.spearman), ""] for r in ru), []))
        rows.append([d, "max_correlation"] + sum((_extreme_cells(r.max_correlation) for r in ru), []))
        rows.append([d, "min_correlation"] + sum((_extreme_cells(r.min_correlation) for r in ru), []))
    tot = [res.totals[p] for p in pairs]
    rows.append([TOTAL, "observations"] + sum(([str(t.observations), ""] for t in tot), []))
    rows.append([TOTAL, "general_correlation"] + sum(([_num(t.spearman), ""] for t in tot), []))
    comment = (
        f"correlation between ranking lists per discipline; pairs {', '.join(_label(p) for p in pairs)}; "
        f"Spearman on percentiles; *_field names the field attaining the extreme; manifest={mh}"
    )
    return _csv_text(comment, ["scope", "statistic", *_pair_columns(pairs)], rows)


def quartile_table(res: PipelineResult, mh: str) -> str:
    pair = res.pairs[0]
    a = pair[0].upper()
    rows = []
    scopes = [(d, res.rollups[pair][d].general) for d in sorted(res.rollups[pair])] + [(TOTAL, res.totals[pair])]
    for scope, rep in scopes:
        m = rep.quartile_matrix
        for q in range(4):
            rows.append([scope, f"{a} {q + 1}", *(_num(float(m[q, k]), 100.0) for k in range(4))])
        rows.append([scope, "changed_quartile", _num(rep.changed_quartile, 100.0), "", "", ""])
    b = pair[1].upper()
    comment = (
        f"percentage of researchers by quartile (1 best .. 4 worst) under {a} (rows) and {b} (columns); "
        f"pair {_label(pair)}; manifest={mh}"
    )
    return _csv_text(comment, ["scope", "from_quartile", *(f"{b}_q{k}_pct" for k in range(1, 5))], rows)


def shift_table(res: PipelineResult, mh: str) -> str:
    pairs = res.pairs
    rows = []
    for d in sorted(res.rollups[pairs[0]]):
        ru = [res.rollups[p][d] for p in pairs]
        rows.append([d, "avg_shift"] + sum(([_num(r.general.shift.mean), ""] for r in ru), []))
        rows.append([d, "max_avg_shift"] + sum((_extreme_cells(r.max_avg_shift) for r in ru), []))
        rows.append([d, "max_shift"] + sum((_extreme_cells(r.max_shift) for r in ru), []))
        rows.append([d, "min_shift_stddev"] + sum((_extreme_cells(r.min_shift_stddev) for r in ru), []))
        rows.append([d, "max_shift_stddev"] + sum((_extreme_cells(r.max_shift_stddev) for r in ru), []))
    tot = [res.totals[p] for p in pairs]
    rows.append([TOTAL, "avg_shift"] + sum(([_num(t.shift.mean), ""] for t in tot), []))
    comment = (
        f"descriptive statistics of |percentile shift| per discipline; pairs {', '.join(_label(p) for p in pairs)}; "
        f"*_field names the field attaining the extreme; manifest={mh}"
    )
    return _csv_text(comment, ["scope", "statistic", *_pair_columns(pairs)], rows)


def retention_table(res: PipelineResult, mh: str) -> str:
    rows = []
    for p in res.pairs:
        scopes = [(d, res.rollups[p][d].general) for d in sorted(res.rollups[p])] + [(TOTAL, res.totals[p])]
        for scope, rep in scopes:
            rows.append([_label(p), scope, _num(rep.lost_top10, 100.0), _num(rep.lost_above_median, 100.0)])
    comment = (
        f"percentage of top-10% / above-median researchers under the first indicator who lose that status "
        f"under the second; pairs {', '.join(_label(p) for p in res.pairs)}; manifest={mh}"
    )
    return _csv_text(comment, ["from_to", "scope", "lost_top10_pct", "lost_above_median_pct"], rows)


def histogram_csv(rep: ComparisonReport, mh: str) -> str:
    rows = [[_num(lo), _num(hi), _num(s)] for lo, hi, s in rep.shift.histogram]
    comment = f"percentile shift histogram; pair {_label(rep.pair)}; scope {rep.scope}; manifest={mh}"
    return _csv_text(comment, ["bin_lo", "bin_hi", "share"], rows)


TABLE_NAMES = {
    "impact": {"corr": "table2.csv", "quart": "table4.csv", "shift": "table5.csv", "ret": "table8.csv"},
    "output": {"corr": "table3.csv", "quart": "table6.csv", "shift": "table7.csv", "ret": "table9.csv"},
}


def write_bundle(res: PipelineResult, manifest: dict, out_dir: str | Path) -> list[Path]:
    """Write every report file under ``out_dir``; returns the paths written, sorted."""
    out = Path(out_dir)
    (out / "reports").mkdir(parents=True, exist_ok=True)
    mh = manifest["hash"]
    written: list[Path] = []

    def text(name: str, content: str) -> None:
        p = out / name
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        written.append(p)

    text("manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    res.baselines.write_csv(out / "baselines.csv")
    res.exclusions.write_csv(out / "exclusions.csv")
    write_scorecards(res.scorecards, out / "scorecards.csv")
    write_rankings((res.rankings[k] for k in sorted(res.rankings, key=lambda k: (k[0], list(Rank).index(k[1]), k[2]))),
                   out / "rankings.csv")
    written += [out / "baselines.csv", out / "exclusions.csv", out / "scorecards.csv", out / "rankings.csv"]

    names = TABLE_NAMES[res.kind.value]
    text(names["corr"], correlation_table(res, mh))
    text(names["quart"], quartile_table(res, mh))
    text(names["shift"], shift_table(res, mh))
    text(names["ret"], retention_table(res, mh))

    for pair in res.pairs:
        reports = [res.totals[pair]]
        for d, ru in res.rollups[pair].items():
            reports.append(ru.general)
            reports.extend(ru.fields.values())
            text(f"fig_shift_{_slug(d)}_{_label(pair)}.csv", histogram_csv(ru.general, mh))
        text(f"fig_shift_{TOTAL}_{_label(pair)}.csv", histogram_csv(res.totals[pair], mh))
        for rep in reports:
            name = f"reports/{rep.scope_kind}_{_slug(rep.scope)}_{_label(pair)}.json"
            text(name, json.dumps(report_json(rep, mh), indent=2, sort_keys=True) + "\n")
    return sorted(written)
