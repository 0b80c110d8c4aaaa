"""Distortion between two ranking lists of the same population.

Correlations, percentile-shift distributions, quartile transitions and
top-10% / above-median retention, per field and pooled per discipline.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ranking import RankingList, average_ranks

IMPACT_PAIRS = (("wfi", "i"), ("wfi", "fi"), ("fi", "i"))
OUTPUT_PAIRS = (("wfo", "o"), ("wfo", "fo"), ("fo", "o"))
TOP10_CUTOFF = 90.0


class KeyMismatch(ValueError):
    pass


class DegenerateInput(ValueError):
    """Correlation is undefined because one side is constant."""


class EmptySelection(ValueError):
    pass


class Threshold(enum.Enum):
    TOP10 = "top10"
    ABOVE_MEDIAN = "above_median"


def _paired(a: Mapping[str, float], b: Mapping[str, float]) -> tuple[np.ndarray, np.ndarray]:
    if a.keys() != b.keys():
        missing = sorted(set(a) ^ set(b))
        raise KeyMismatch(f"ranking lists cover different researchers, e.g. {missing[:3]}")
    keys = sorted(a)
    return (
        np.fromiter((a[k] for k in keys), dtype=np.float64, count=len(keys)),
        np.fromiter((b[k] for k in keys), dtype=np.float64, count=len(keys)),
    )


def spearman(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Spearman correlation: Pearson correlation of average ranks."""
    xa, xb = _paired(a, b)
    if len(xa) < 2:
        raise DegenerateInput("need at least two paired values")
    ra = average_ranks(xa)
    rb = average_ranks(xb)
    da = ra - ra.mean()
    db = rb - rb.mean()
    sa = math.fsum(da * da)
    sb = math.fsum(db * db)
    if sa == 0 or sb == 0:
        raise DegenerateInput("a ranking list is constant")
    rho = math.fsum(da * db) / math.sqrt(sa * sb)
    return max(-1.0, min(1.0, rho))


@dataclass
class ShiftSummary:
    bin_width: float
    counts: list[int]
    mean: float
    max: float
    stddev: float

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def histogram(self) -> list[tuple[float, float, float]]:
        """(low, high, share) per bin; the first bin is closed, the rest are (low, high]."""
        n = self.n
        return [
            (k * self.bin_width, min((k + 1) * self.bin_width, 100.0), c / n if n else 0.0)
            for k, c in enumerate(self.counts)
        ]


def _bin_index(shift: float, width: float, nbins: int) -> int:
    s = round(shift, 9)  # percentile arithmetic leaves ~1e-14 noise at bin edges
    if s <= width:
        return 0
    return min(math.ceil(s / width) - 1, nbins - 1)


def summarize_shifts(shifts: Sequence[float], bin_width: float = 5.0) -> ShiftSummary:
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    nbins = math.ceil(100.0 / bin_width)
    counts = [0] * nbins
    for s in shifts:
        counts[_bin_index(s, bin_width, nbins)] += 1
    if not shifts:
        return ShiftSummary(bin_width, counts, 0.0, 0.0, 0.0)
    return ShiftSummary(
        bin_width,
        counts,
        mean=statistics.fmean(shifts),
        max=max(shifts),
        stddev=statistics.pstdev(shifts),
    )


def percentile_shifts(a: Mapping[str, float], b: Mapping[str, float]) -> list[float]:
    xa, xb = _paired(a, b)
    return np.abs(xa - xb).tolist()


def shift_distribution(a: Mapping[str, float], b: Mapping[str, float], bin_width: float = 5.0) -> ShiftSummary:
    return summarize_shifts(percentile_shifts(a, b), bin_width)


def quartile_counts(qa: Mapping[str, int], qb: Mapping[str, int]) -> np.ndarray:
    if qa.keys() != qb.keys():
        raise KeyMismatch("quartile maps cover different researchers")
    m = np.zeros((4, 4), dtype=np.int64)
    for k in qa:
        m[qa[k] - 1, qb[k] - 1] += 1
    return m


def quartile_transition(list_a: RankingList, list_b: RankingList) -> np.ndarray:
    """4x4 population shares; row = quartile under ``list_a``, column = under ``list_b``."""
    m = quartile_counts(list_a.quartiles, list_b.quartiles)
    return m / m.sum()


def _selected(rl: RankingList, kind: Threshold) -> set[str]:
    if kind is Threshold.TOP10:
        return {k for k, p in rl.percentiles.items() if p >= TOP10_CUTOFF}
    med = statistics.median(rl.scores.values())
    return {k for k, s in rl.scores.items() if s > med}


def retention_counts(list_a: RankingList, list_b: RankingList, kind: Threshold) -> tuple[int, int]:
    """(lost, selected): members selected under ``list_a`` and how many of them ``list_b`` drops."""
    if list_a.scores.keys() != list_b.scores.keys():
        raise KeyMismatch("ranking lists cover different researchers")
    sa = _selected(list_a, kind)
    sb = _selected(list_b, kind)
    return len(sa - sb), len(sa)


def retention(list_a: RankingList, list_b: RankingList, kind: Threshold) -> float:
    """Share of researchers selected under ``list_a`` who are not selected under ``list_b``."""
    lost, selected = retention_counts(list_a, list_b, kind)
    if selected == 0:
        raise EmptySelection(f"no researcher selected by {kind.value} under the first list")
    return lost / selected


# --- pooled reports ----------------------------------------------------------


@dataclass
class ComparisonReport:
    pair: tuple[str, str]
    scope_kind: str  # "field", "discipline" or "total"
    scope: str
    observations: int
    spearman: float | None
    shift: ShiftSummary
    quartile_counts: np.ndarray
    top10: tuple[int, int]
    above_median: tuple[int, int]

    @property
    def quartile_matrix(self) -> np.ndarray:
        return self.quartile_counts / self.quartile_counts.sum()

    @property
    def changed_quartile(self) -> float:
        return 1.0 - float(np.trace(self.quartile_matrix))

    @property
    def lost_top10(self) -> float | None:
        lost, sel = self.top10
        return lost / sel if sel else None

    @property
    def lost_above_median(self) -> float | None:
        lost, sel = self.above_median
        return lost / sel if sel else None


def compare_lists(
    lists_a: Sequence[RankingList],
    lists_b: Sequence[RankingList],
    pair: tuple[str, str],
    scope_kind: str,
    scope: str,
    bin_width: float = 5.0,
) -> ComparisonReport:
    """Compare paired ranking lists (same peer groups, same order), pooling across groups.

    Percentiles are already relative to each peer group, so pooling is a
    plain union over researchers. Above-median selection uses each group's
    own median score.
    """
    if len(lists_a) != len(lists_b) or not lists_a:
        raise KeyMismatch("need the same nonempty sequence of peer groups on both sides")
    pa: dict[str, float] = {}
    pb: dict[str, float] = {}
    qc = np.zeros((4, 4), dtype=np.int64)
    top = [0, 0]
    above = [0, 0]
    for la, lb in zip(lists_a, lists_b):
        if (la.field_code, la.rank) != (lb.field_code, lb.rank):
            raise KeyMismatch("peer groups are not aligned")
        pa.update(la.percentiles)
        pb.update(lb.percentiles)
        qc += quartile_counts(la.quartiles, lb.quartiles)
        for acc, kind in ((top, Threshold.TOP10), (above, Threshold.ABOVE_MEDIAN)):
            lost, sel = retention_counts(la, lb, kind)
            acc[0] += lost
            acc[1] += sel
    try:
        rho: float | None = spearman(pa, pb)
    except DegenerateInput:
        rho = None
    return ComparisonReport(
        pair=pair,
        scope_kind=scope_kind,
        scope=scope,
        observations=len(pa),
        spearman=rho,
        shift=shift_distribution(pa, pb, bin_width),
        quartile_counts=qc,
        top10=(top[0], top[1]),
        above_median=(above[0], above[1]),
    )


@dataclass
class DisciplineRollup:
    discipline: str
    pair: tuple[str, str]
    general: ComparisonReport
    fields: dict[str, ComparisonReport] = field(default_factory=dict)

    def _extreme(self, key, pick) -> tuple[float, str] | None:
        vals = [(key(r), code) for code, r in sorted(self.fields.items()) if key(r) is not None]
        if not vals:
            return None
        best = pick(v for v, _ in vals)
        return next((v, c) for v, c in vals if v == best)

    @property
    def max_correlation(self):
        return self._extreme(lambda r: r.spearman, max)

    @property
    def min_correlation(self):
        return self._extreme(lambda r: r.spearman, min)

    @property
    def max_avg_shift(self):
        return self._extreme(lambda r: r.shift.mean, max)

    @property
    def max_shift(self):
        return self._extreme(lambda r: r.shift.max, max)

    @property
    def min_shift_stddev(self):
        return self._extreme(lambda r: r.shift.stddev, min)

    @property
    def max_shift_stddev(self):
        return self._extreme(lambda r: r.shift.stddev, max)


def rollup(field_reports: Mapping[str, ComparisonReport], pooled: ComparisonReport) -> DisciplineRollup:
    """Attach per-field extremes (labelled by field code) to a discipline-level pooled report."""
    if not field_reports:
        raise ValueError("a discipline rollup needs at least one field report")
    return DisciplineRollup(pooled.scope, pooled.pair, pooled, dict(sorted(field_reports.items())))


def pairs_for(kind: str) -> tuple[tuple[str, str], ...]:
    return IMPACT_PAIRS if kind == "impact" else OUTPUT_PAIRS

