"""Splitting one publication's unit of credit across its byline."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._backend import kernels
from .corpus import AuthorSlot

SCHEME_TOLERANCE = 1e-9


class EmptyByline(ValueError):
    pass


class Regime(enum.Enum):
    WEIGHTED = "weighted"
    FRACTIONAL = "fractional"
    FULL = "full"


@dataclass(frozen=True)
class WeightScheme:
    """Role weights for intra-mural and extra-mural bylines.

    A byline is intra-mural when its first and last authors share a
    university. ``*_others`` is the pool split equally among the authors
    holding no named role.
    """

    intra_first: float = 0.40
    intra_last: float = 0.40
    intra_others: float = 0.20
    extra_first: float = 0.30
    extra_second: float = 0.15
    extra_second_last: float = 0.15
    extra_last: float = 0.30
    extra_others: float = 0.10

    def __post_init__(self):
        values = self.as_array()
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("role weights must be finite and non-negative")
        if self.intra_first <= 0 or self.extra_first <= 0:
            raise ValueError("first-author weight must be positive")
        intra = math.fsum(values[:3])
        extra = math.fsum(values[3:])
        if abs(intra - 1.0) > SCHEME_TOLERANCE:
            raise ValueError(f"intra-mural weights sum to {intra:g}, not 1")
        if abs(extra - 1.0) > SCHEME_TOLERANCE:
            raise ValueError(f"extra-mural weights sum to {extra:g}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.intra_first, self.intra_last, self.intra_others,
                self.extra_first, self.extra_second, self.extra_second_last,
                self.extra_last, self.extra_others,
            ],
            dtype=np.float64,
        )

    def to_json(self) -> dict:
        return {
            "intra": {"first": self.intra_first, "last": self.intra_last, "others": self.intra_others},
            "extra": {
                "first": self.extra_first,
                "second": self.extra_second,
                "second_last": self.extra_second_last,
                "last": self.extra_last,
                "others": self.extra_others,
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightScheme":
        try:
            intra, extra = obj["intra"], obj["extra"]
            return cls(
                intra_first=float(intra["first"]),
                intra_last=float(intra["last"]),
                intra_others=float(intra["others"]),
                extra_first=float(extra["first"]),
                extra_second=float(extra["second"]),
                extra_second_last=float(extra["second_last"]),
                extra_last=float(extra["last"]),
                extra_others=float(extra["others"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"weight scheme: missing or malformed entry {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "WeightScheme":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


DEFAULT_SCHEME = WeightScheme()


def is_intra_mural(byline: Sequence[AuthorSlot]) -> bool:
    return byline[0].university_id == byline[-1].university_id


def allocate(
    byline: Sequence[AuthorSlot],
    regime: Regime,
    scheme: WeightScheme = DEFAULT_SCHEME,
) -> np.ndarray:
    """Credit per byline slot, in byline order.

    Under the weighted regime each author takes the highest-precedence role
    its position matches (first > last > second > second-last > other).
    Bylines too short to fill every role have the vacant mass redistributed
    pro rata over the roles that are filled.
    """
    n = len(byline)
    if n == 0:
        raise EmptyByline("cannot allocate credit over an empty byline")
    if regime is Regime.FULL:
        return np.ones(n)
    if regime is Regime.FRACTIONAL:
        return kernels.allocate_fractional(np.array([n]))
    return kernels.allocate_weighted(
        np.array([n]), np.array([is_intra_mural(byline)], dtype=np.uint8), scheme.as_array()
    )


def allocate_many(
    sizes: np.ndarray,
    intra: np.ndarray,
    regime: Regime,
    scheme: WeightScheme = DEFAULT_SCHEME,
) -> np.ndarray:
    """Batch form of :func:`allocate` over bylines described by length and mode.

    Returns the concatenated credit vectors.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    if np.any(sizes < 1):
        raise EmptyByline("cannot allocate credit over an empty byline")
    if regime is Regime.FULL:
        return np.ones(int(sizes.sum()))
    if regime is Regime.FRACTIONAL:
        return kernels.allocate_fractional(sizes)
    return kernels.allocate_weighted(sizes, np.asarray(intra, dtype=np.uint8), scheme.as_array())
