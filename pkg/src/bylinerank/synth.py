"""Seeded synthetic corpora with leader-driven author ordering.

Every researcher draws a publication rate and a latent productivity
(log-normal, with configurable correlation between the two). Researchers
lead publications at their rate and recruit tracked colleagues (mostly
from their own field, in proportion to their rate) plus external
co-authors. With
probability ``position_talent_coupling`` a byline is ordered by latent
productivity: strongest member last, runner-up first, everyone else in
random order between them. Otherwise the order is uniformly random.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .corpus import (
    AuthorSlot,
    Corpus,
    DocType,
    Publication,
    Rank,
    Researcher,
    save_corpus,
)


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    field_code: str
    discipline_code: str
    counts: dict[str, int]


def _default_fields() -> list[FieldSpec]:
    specs = []
    for k in range(1, 5):
        specs.append(FieldSpec(f"BIO/{k:02d}", "Biology", {"full": 35, "associate": 35, "assistant": 35}))
    for k in range(1, 7):
        specs.append(FieldSpec(f"MED/{k:02d}", "Medicine", {"full": 35, "associate": 35, "assistant": 35}))
    return specs


def _default_categories() -> list[dict]:
    return [
        {"name": "Biochemistry", "probability": 0.2, "citation_scale": 1.2},
        {"name": "Cell Biology", "probability": 0.15, "citation_scale": 1.4},
        {"name": "Genetics", "probability": 0.15, "citation_scale": 1.3},
        {"name": "Oncology", "probability": 0.15, "citation_scale": 1.1},
        {"name": "Surgery", "probability": 0.15, "citation_scale": 0.6},
        {"name": "Pharmacology", "probability": 0.1, "citation_scale": 0.9},
        {"name": "Plant Sciences", "probability": 0.1, "citation_scale": 0.7},
    ]


def _default_authors() -> list[float]:
    # P(n authors) for n = 1..15
    return [0.02, 0.04, 0.07, 0.10, 0.12, 0.13, 0.12, 0.10, 0.08, 0.06, 0.05, 0.04, 0.03, 0.02, 0.02]


@dataclass
class SynthConfig:
    seed: int = 42
    fields: list[FieldSpec] = field(default_factory=_default_fields)
    window: tuple[int, int] = (2004, 2008)
    n_universities: int = 30
    # publications led over a full window ~ Poisson(lognormal(pubs_mu, pubs_sigma))
    pubs_mu: float = 0.4
    pubs_sigma: float = 0.8
    # latent productivity = exp(z); z standard normal with this correlation to the log rate
    latent_rate_correlation: float = 0.0
    # authors_per_pub[k] = P(k + 1 authors); coauthored_share_target overrides P(1 author)
    authors_per_pub: list[float] = field(default_factory=_default_authors)
    coauthored_share_target: float = 0.98
    tracked_coauthor_share: float = 0.3
    same_field_share: float = 0.8
    same_university_share: float = 0.6
    citations_r: float = 1.5
    citations_p: float = 0.15
    citation_quality_coupling: float = 0.5
    categories: list[dict] = field(default_factory=_default_categories)
    multi_category_share: float = 0.1
    doc_types: dict[str, float] = field(default_factory=lambda: {"article": 0.85, "review": 0.1, "proceedings": 0.05})
    short_tenure_share: float = 0.03
    position_talent_coupling: float = 1.0

    def __post_init__(self):
        self.window = tuple(self.window)
        self.fields = [f if isinstance(f, FieldSpec) else FieldSpec(**f) for f in self.fields]
        self.validate()

    def validate(self) -> None:
        def bad(name, why):
            raise InvalidConfig(f"{name}: {why}")

        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            bad("seed", "must be an integer in [0, 2**64)")
        if not self.fields:
            bad("fields", "at least one field is required")
        codes = set()
        for f in self.fields:
            if not f.field_code or f.field_code in codes:
                bad("fields", f"missing or duplicate field_code {f.field_code!r}")
            codes.add(f.field_code)
            for rk, n in f.counts.items():
                if rk not in {r.value for r in Rank}:
                    bad(f"fields[{f.field_code}].counts", f"unknown rank {rk!r}")
                if not isinstance(n, int) or n < 0:
                    bad(f"fields[{f.field_code}].counts.{rk}", "must be a non-negative integer")
        if len(self.window) != 2 or self.window[0] > self.window[1]:
            bad("window", "must be [start_year, end_year] with start <= end")
        if self.n_universities < 1:
            bad("n_universities", "must be >= 1")
        if self.pubs_sigma < 0:
            bad("pubs_sigma", "must be >= 0")
        if not -1.0 <= self.latent_rate_correlation <= 1.0:
            bad("latent_rate_correlation", "must lie in [-1, 1]")
        probs = np.asarray(self.authors_per_pub, dtype=float)
        if probs.size < 2 or np.any(probs < 0) or probs[1:].sum() <= 0:
            bad("authors_per_pub", "needs non-negative mass on at least one n >= 2")
        for name in (
            "coauthored_share_target", "tracked_coauthor_share", "same_field_share",
            "same_university_share", "citation_quality_coupling", "multi_category_share",
            "short_tenure_share", "position_talent_coupling",
        ):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                bad(name, f"must be a fraction in [0, 1], got {v!r}")
        if self.citations_r <= 0:
            bad("citations_r", "must be positive")
        if not 0.0 < self.citations_p <= 1.0:
            bad("citations_p", "must lie in (0, 1]")
        if not self.categories:
            bad("categories", "at least one category is required")
        for c in self.categories:
            if not c.get("name") or c.get("probability", -1) < 0 or c.get("citation_scale", 1.0) <= 0:
                bad("categories", f"malformed entry {c!r}")
        if sum(c["probability"] for c in self.categories) <= 0:
            bad("categories", "probabilities must not all be zero")
        if self.multi_category_share > 0 and len(self.categories) < 2:
            bad("multi_category_share", "needs at least two categories")
        for k, v in self.doc_types.items():
            try:
                DocType(k)
            except ValueError:
                bad("doc_types", f"unknown document type {k!r}")
            if v < 0:
                bad("doc_types", "probabilities must be non-negative")
        if sum(self.doc_types.values()) <= 0:
            bad("doc_types", "probabilities must not all be zero")

    @property
    def n_researchers(self) -> int:
        return sum(sum(f.counts.values()) for f in self.fields)

    def to_json(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "SynthConfig":
        if not isinstance(obj, dict):
            raise InvalidConfig("config: expected a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise InvalidConfig(f"{unknown[0]}: unknown config key")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise InvalidConfig(f"config: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "SynthConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_json(obj)


@dataclass
class SynthResult:
    corpus: Corpus
    latent: dict[str, float]

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "researchers": out / "researchers.csv",
            "publications": out / "publications.jsonl",
            "latent": out / "latent.csv",
        }
        save_corpus(self.corpus, paths["researchers"], paths["publications"])
        with open(paths["latent"], "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["researcher_id", "latent_productivity"])
            for rid in sorted(self.latent):
                w.writerow([rid, repr(self.latent[rid])])
        return paths


def _years_active(rng: np.random.Generator, cfg: SynthConfig) -> int:
    span = cfg.window[1] - cfg.window[0] + 1
    u = rng.random()
    if u < cfg.short_tenure_share:
        return int(rng.integers(1, min(2, span) + 1))
    if u < 0.85 or span <= 3:
        return span
    return int(rng.integers(3, span + 1))


def generate(config: SynthConfig) -> SynthResult:
    cfg = config
    cfg.validate()
    # author ordering has its own stream so coupling changes nothing else
    main_seq, order_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    rng = np.random.default_rng(main_seq)
    order_rng = np.random.default_rng(order_seq)
    start, end = cfg.window
    span = end - start + 1
    unis = [f"U{k:03d}" for k in range(1, cfg.n_universities + 1)]

    researchers: dict[str, Researcher] = {}
    latent: dict[str, float] = {}
    rate: dict[str, float] = {}
    rho = cfg.latent_rate_correlation
    by_field: dict[str, list[str]] = {}
    for f in cfg.fields:
        ids = []
        for rank in Rank:
            for _ in range(f.counts.get(rank.value, 0)):
                rid = f"R{len(researchers) + 1:05d}"
                researchers[rid] = Researcher(
                    rid,
                    unis[int(rng.integers(len(unis)))],
                    f.field_code,
                    f.discipline_code,
                    rank,
                    _years_active(rng, cfg),
                )
                z_rate, z_other = rng.standard_normal(2)
                rate[rid] = math.exp(cfg.pubs_mu + cfg.pubs_sigma * z_rate)
                latent[rid] = math.exp(rho * z_rate + math.sqrt(1.0 - rho * rho) * z_other)
                ids.append(rid)
        by_field[f.field_code] = ids

    all_ids = list(researchers)
    all_rate = np.array([rate[r] for r in all_ids])
    field_rate = {f: np.array([rate[r] for r in ids]) for f, ids in by_field.items()}
    mean_latent = float(np.mean(list(latent.values()))) if latent else 1.0

    probs = np.asarray(cfg.authors_per_pub, dtype=float)
    multi = probs[1:] / probs[1:].sum()
    cat_names = [c["name"] for c in cfg.categories]
    cat_p = np.array([c["probability"] for c in cfg.categories], dtype=float)
    cat_p /= cat_p.sum()
    cat_scale = {c["name"]: float(c.get("citation_scale", 1.0)) for c in cfg.categories}
    doc_names = sorted(cfg.doc_types)
    doc_p = np.array([cfg.doc_types[d] for d in doc_names], dtype=float)
    doc_p /= doc_p.sum()

    def pick(pool: list[str], weights: np.ndarray, exclude: set[str]) -> str | None:
        w = weights.copy()
        for k, rid in enumerate(pool):
            if rid in exclude:
                w[k] = 0.0
        total = w.sum()
        if total <= 0:
            return None
        return pool[int(rng.choice(len(pool), p=w / total))]

    pubs: dict[str, Publication] = {}
    for lead in all_ids:
        r = researchers[lead]
        n_led = int(rng.poisson(rate[lead] * r.years_active / span))
        for _ in range(n_led):
            if rng.random() < cfg.coauthored_share_target:
                n = 2 + int(rng.choice(len(multi), p=multi))
            else:
                n = 1
            # members: (researcher_id or None, university, latent)
            members = [(lead, r.university_id, latent[lead])]
            taken = {lead}
            for _ in range(n - 1):
                if rng.random() < cfg.tracked_coauthor_share:
                    if rng.random() < cfg.same_field_share:
                        pool, wts = by_field[r.field_code], field_rate[r.field_code]
                    else:
                        pool, wts = all_ids, all_rate
                    co = pick(pool, wts, taken)
                    if co is not None:
                        taken.add(co)
                        members.append((co, researchers[co].university_id, latent[co]))
                        continue
                uni = r.university_id if rng.random() < cfg.same_university_share else f"X{int(rng.integers(1, 10_000)):04d}"
                members.append((None, uni, math.exp(float(rng.standard_normal()))))

            coupled = order_rng.random() < cfg.position_talent_coupling
            perm = order_rng.permutation(n)
            if n > 1 and coupled:
                order = sorted(range(n), key=lambda k: -members[k][2])
                middle = [order[k] for k in perm if k >= 2]
                ordered = [members[order[1]], *[members[k] for k in middle], members[order[0]]]
            else:
                ordered = [members[k] for k in perm]

            year = int(rng.integers(start, end + 1))
            if rng.random() < cfg.multi_category_share:
                picks = rng.choice(len(cat_names), size=2, replace=False, p=cat_p)
                cats = tuple(sorted((cat_names[int(k)], 0.5) for k in picks))
            else:
                cats = ((cat_names[int(rng.choice(len(cat_names), p=cat_p))], 1.0),)
            scale = math.fsum(w * cat_scale[c] for c, w in cats)
            quality = (max(m[2] for m in members) / mean_latent) ** cfg.citation_quality_coupling
            age = (end - year + 1) / span
            citations = int(rng.negative_binomial(cfg.citations_r * scale * quality * age, cfg.citations_p))

            pid = f"P{len(pubs) + 1:06d}"
            pubs[pid] = Publication(
                id=pid,
                year=year,
                doc_type=DocType(doc_names[int(rng.choice(len(doc_names), p=doc_p))]),
                citations=citations,
                categories=cats,
                byline=tuple(AuthorSlot(k + 1, uni, rid) for k, (rid, uni, _) in enumerate(ordered)),
            )

    return SynthResult(Corpus(researchers, pubs, (start, end)), latent)


def summary(corpus: Corpus) -> dict[str, float]:
    pubs = list(corpus.publications.values())
    n = len(pubs)
    sizes = [len(p.byline) for p in pubs]
    return {
        "researchers": len(corpus.researchers),
        "publications": n,
        "coauthored_share": sum(s > 1 for s in sizes) / n if n else 0.0,
        "more_than_two_share": sum(s > 2 for s in sizes) / n if n else 0.0,
        "mean_authors": sum(sizes) / n if n else 0.0,
        "uncited_share": sum(p.citations == 0 for p in pubs) / n if n else 0.0,
    }
