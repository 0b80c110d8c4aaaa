"""Percentile ranking lists within field x academic-rank peer groups."""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ._backend import kernels
from .corpus import Rank, Researcher
from .scoring import INDICATORS, ScoreCard

log = logging.getLogger(__name__)

RANKING_COLUMNS = ["field_code", "rank", "indicator", "researcher_id", "score", "percentile", "quartile"]


class GroupTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class PeerGroup:
    field_code: str
    rank: Rank
    members: tuple[str, ...]


@dataclass
class RankingList:
    field_code: str
    rank: Rank
    indicator: str
    scores: dict[str, float]
    percentiles: dict[str, float]
    quartiles: dict[str, int]

    def __len__(self) -> int:
        return len(self.scores)


def average_ranks(values) -> np.ndarray:
    return kernels.average_ranks(np.asarray(values, dtype=np.float64))


def percentile_rank(scores: Mapping[str, float]) -> dict[str, float]:
    """Map scores onto 0 (worst) .. 100 (best); ties share their average rank."""
    n = len(scores)
    if n < 2:
        raise GroupTooSmall(f"percentiles need at least 2 members, got {n}")
    keys = list(scores)
    ranks = average_ranks(np.fromiter((scores[k] for k in keys), dtype=np.float64, count=n))
    pct = 100.0 * (ranks - 1.0) / (n - 1)
    return {k: float(p) for k, p in zip(keys, pct)}


def quartile_of(percentile: float) -> int:
    """1 is the best quartile, 4 the worst."""
    if percentile >= 75:
        return 1
    if percentile >= 50:
        return 2
    if percentile >= 25:
        return 3
    return 4


def peer_groups(researchers: Iterable[Researcher]) -> list[PeerGroup]:
    members: dict[tuple[str, Rank], list[str]] = defaultdict(list)
    for r in researchers:
        members[(r.field_code, r.rank)].append(r.id)
    order = list(Rank)
    return [
        PeerGroup(f, rk, tuple(sorted(ids)))
        for (f, rk), ids in sorted(members.items(), key=lambda kv: (kv[0][0], order.index(kv[0][1])))
    ]


def build_rankings(
    scorecards: Iterable[ScoreCard],
    groups: Iterable[PeerGroup],
) -> tuple[dict[tuple[str, Rank, str], RankingList], list[PeerGroup]]:
    """Six ranking lists per peer group.

    Only researchers holding a scorecard take part. Groups left with fewer
    than two such members are skipped, logged, and returned second.
    """
    cards = {c.researcher_id: c for c in scorecards}
    out: dict[tuple[str, Rank, str], RankingList] = {}
    skipped: list[PeerGroup] = []
    for g in groups:
        ids = [m for m in g.members if m in cards]
        if len(ids) < 2:
            log.warning("skipping peer group %s/%s: %d ranked member(s)", g.field_code, g.rank.value, len(ids))
            skipped.append(g)
            continue
        for ind in INDICATORS:
            scores = {m: cards[m].get(ind) for m in ids}
            pct = percentile_rank(scores)
            out[(g.field_code, g.rank, ind)] = RankingList(
                g.field_code, g.rank, ind, scores, pct, {m: quartile_of(p) for m, p in pct.items()}
            )
    return out, skipped


def write_rankings(rankings: Iterable[RankingList], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RANKING_COLUMNS)
        for rl in rankings:
            for rid in sorted(rl.percentiles, key=lambda k: (-rl.percentiles[k], k)):
                w.writerow([
                    rl.field_code, rl.rank.value, rl.indicator.upper(), rid,
                    f"{rl.scores[rid]:.10g}", f"{rl.percentiles[rid]:.10g}", rl.quartiles[rid],
                ])
