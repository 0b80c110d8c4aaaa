"""Citation baselines and the six per-researcher productivity indicators."""

from __future__ import annotations

import csv
import statistics
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import kernels
from .corpus import Corpus, Publication
from .credit import DEFAULT_SCHEME, Regime, WeightScheme, allocate_many, is_intra_mural

INDICATORS = ("wfo", "fo", "o", "wfi", "fi", "i")


class MissingBaseline(KeyError):
    def __init__(self, year: int, category: str):
        self.year = year
        self.category = category
        super().__init__(f"no citation baseline for year {year}, category {category!r}")

    def __str__(self):
        return self.args[0]


@dataclass
class BaselineTable:
    """Median citations of cited publications per (year, subject category)."""

    entries: dict[tuple[int, str], float]

    def __getitem__(self, key: tuple[int, str]) -> float:
        try:
            return self.entries[key]
        except KeyError:
            raise MissingBaseline(*key) from None

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["year", "category", "median"])
            for (year, cat) in sorted(self.entries):
                w.writerow([year, cat, repr(self.entries[(year, cat)])])

    @classmethod
    def read_csv(cls, path: str | Path) -> "BaselineTable":
        entries = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["year", "category", "median"]:
                raise ValueError(f"{path}: expected header year,category,median")
            for row in reader:
                median = float(row["median"])
                if not median >= 1.0:
                    raise ValueError(f"{path}:{reader.line_num}: median must be >= 1, got {median}")
                entries[(int(row["year"]), row["category"])] = median
        return cls(entries)


def build_baselines(corpus: Corpus) -> BaselineTable:
    cells: dict[tuple[int, str], list[int]] = defaultdict(list)
    for pub in corpus.publications.values():
        if pub.citations < 1:
            continue
        for cat, _ in pub.categories:
            cells[(pub.year, cat)].append(pub.citations)
    return BaselineTable({k: float(statistics.median(v)) for k, v in sorted(cells.items())})


def normalized_impact(pub: Publication, baselines: BaselineTable) -> float:
    """Citations scaled by the cell median, averaged over categories by weight."""
    if pub.citations == 0:
        return 0.0
    return sum(w * (pub.citations / baselines[(pub.year, cat)]) for cat, w in pub.categories)


@dataclass(frozen=True)
class ScoreCard:
    researcher_id: str
    wfo: float
    fo: float
    o: float
    wfi: float
    fi: float
    i: float

    def values(self) -> tuple[float, ...]:
        return (self.wfo, self.fo, self.o, self.wfi, self.fi, self.i)

    def get(self, indicator: str) -> float:
        return getattr(self, indicator.lower())


def score_all(
    corpus: Corpus,
    baselines: BaselineTable,
    scheme: WeightScheme = DEFAULT_SCHEME,
) -> list[ScoreCard]:
    """Per-year output and impact under the three counting regimes.

    Returns one card per researcher with at least one publication, sorted
    by researcher id. Each researcher's sums run over publications in
    ascending id, so the result does not depend on input order.
    """
    rids = sorted(corpus.researchers)
    index = {rid: k for k, rid in enumerate(rids)}
    pids = sorted(corpus.publications)
    pubs = [corpus.publications[p] for p in pids]

    sizes = np.fromiter((len(p.byline) for p in pubs), dtype=np.int64, count=len(pubs))
    intra = np.fromiter((is_intra_mural(p.byline) for p in pubs), dtype=np.uint8, count=len(pubs))
    impact = np.fromiter((normalized_impact(p, baselines) for p in pubs), dtype=np.float64, count=len(pubs))
    slot_researcher = np.fromiter(
        (index[s.researcher_id] if s.researcher_id is not None else -1 for p in pubs for s in p.byline),
        dtype=np.int64,
        count=int(sizes.sum()),
    )
    slot_pub = np.repeat(np.arange(len(pubs), dtype=np.int64), sizes)

    w_weighted = allocate_many(sizes, intra, Regime.WEIGHTED, scheme)
    w_fractional = allocate_many(sizes, intra, Regime.FRACTIONAL)
    sums = kernels.accumulate(slot_researcher, slot_pub, w_weighted, w_fractional, impact, len(rids))

    cards = []
    for k, rid in enumerate(rids):
        if sums[2, k] == 0:
            continue
        t = corpus.researchers[rid].years_active
        cards.append(ScoreCard(rid, *(float(v) / t for v in sums[:, k])))
    return cards


def write_scorecards(cards: list[ScoreCard], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["researcher_id", *INDICATORS])
        for c in cards:
            w.writerow([c.researcher_id, *(f"{v:.10g}" for v in c.values())])
