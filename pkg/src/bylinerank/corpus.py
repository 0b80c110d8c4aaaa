"""Domain model, corpus file I/O and eligibility filtering."""

from __future__ import annotations

import csv
import enum
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

RESEARCHER_COLUMNS = ["id", "university_id", "field_code", "discipline_code", "rank", "years_active"]
WEIGHT_TOLERANCE = 1e-9


class CorpusError(Exception):
    """Base class for invalid corpus content."""


class ParseError(CorpusError):
    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class DanglingReference(CorpusError):
    def __init__(self, researcher_id: str, publication_id: str | None = None):
        self.researcher_id = researcher_id
        self.publication_id = publication_id
        msg = f"unknown researcher id {researcher_id!r}"
        if publication_id is not None:
            msg += f" in byline of publication {publication_id!r}"
        super().__init__(msg)


class DuplicateId(CorpusError):
    def __init__(self, kind: str, entity_id: str):
        self.kind = kind
        self.entity_id = entity_id
        super().__init__(f"duplicate {kind} id {entity_id!r}")


class EmptyResult(CorpusError):
    """No researcher survives the eligibility filters."""


class Rank(enum.Enum):
    FULL = "full"
    ASSOCIATE = "associate"
    ASSISTANT = "assistant"


class DocType(enum.Enum):
    ARTICLE = "article"
    REVIEW = "review"
    PROCEEDINGS = "proceedings"


class DatasetKind(enum.Enum):
    OUTPUT = "output"
    IMPACT = "impact"


@dataclass(frozen=True)
class Researcher:
    id: str
    university_id: str
    field_code: str
    discipline_code: str
    rank: Rank
    years_active: int

    def __post_init__(self):
        if self.years_active < 1:
            raise ValueError(f"researcher {self.id!r}: years_active must be >= 1")
        if not self.field_code:
            raise ValueError(f"researcher {self.id!r}: empty field_code")


@dataclass(frozen=True)
class AuthorSlot:
    position: int
    university_id: str
    researcher_id: str | None = None


@dataclass(frozen=True)
class Publication:
    id: str
    year: int
    doc_type: DocType
    citations: int
    categories: tuple[tuple[str, float], ...]
    byline: tuple[AuthorSlot, ...]

    def __post_init__(self):
        if not self.byline:
            raise ValueError(f"publication {self.id!r}: empty byline")
        if [s.position for s in self.byline] != list(range(1, len(self.byline) + 1)):
            raise ValueError(f"publication {self.id!r}: byline positions must be consecutive from 1")
        tracked = [s.researcher_id for s in self.byline if s.researcher_id is not None]
        if len(tracked) != len(set(tracked)):
            raise ValueError(f"publication {self.id!r}: researcher listed twice in byline")
        if self.citations < 0:
            raise ValueError(f"publication {self.id!r}: negative citations")
        if not self.categories:
            raise ValueError(f"publication {self.id!r}: no subject categories")
        for name, w in self.categories:
            if not (0.0 < w <= 1.0):
                raise ValueError(f"publication {self.id!r}: category {name!r} weight {w} outside (0, 1]")
        total = math.fsum(w for _, w in self.categories)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValueError(f"publication {self.id!r}: category weights sum to {total:g}, not 1")

    @property
    def tracked_ids(self) -> list[str]:
        return [s.researcher_id for s in self.byline if s.researcher_id is not None]


@dataclass(frozen=True)
class Corpus:
    researchers: dict[str, Researcher]
    publications: dict[str, Publication]
    window: tuple[int, int]

    def __post_init__(self):
        start, end = self.window
        if start > end:
            raise ValueError(f"window {self.window} is empty")
        for pub in self.publications.values():
            if not start <= pub.year <= end:
                raise ValueError(f"publication {pub.id!r}: year {pub.year} outside window {start}-{end}")
            for rid in pub.tracked_ids:
                if rid not in self.researchers:
                    raise DanglingReference(rid, pub.id)

    def publications_of(self) -> dict[str, list[Publication]]:
        """Researcher id -> that researcher's publications, in ascending publication id."""
        out: dict[str, list[Publication]] = {rid: [] for rid in self.researchers}
        for pid in sorted(self.publications):
            pub = self.publications[pid]
            for rid in pub.tracked_ids:
                out[rid].append(pub)
        return out


@dataclass(frozen=True)
class EligibilityConfig:
    dataset_kind: DatasetKind = DatasetKind.OUTPUT
    min_years: int = 3
    min_per_rank: int = 10
    min_publishing_share: float = 0.5

    def __post_init__(self):
        if self.min_years < 1:
            raise ValueError("min_years must be >= 1")
        if self.min_per_rank < 1:
            raise ValueError("min_per_rank must be >= 1")
        if not 0.0 <= self.min_publishing_share <= 1.0:
            raise ValueError("min_publishing_share must lie in [0, 1]")


@dataclass(frozen=True)
class Exclusion:
    entity_kind: str  # "researcher" or "field"
    entity_id: str
    rule: str


@dataclass
class ExclusionLog:
    entries: list[Exclusion] = field(default_factory=list)

    def add(self, kind: str, entity_id: str, rule: str) -> None:
        self.entries.append(Exclusion(kind, entity_id, rule))

    def researchers(self) -> dict[str, str]:
        return {e.entity_id: e.rule for e in self.entries if e.entity_kind == "researcher"}

    def fields(self) -> dict[str, str]:
        return {e.entity_id: e.rule for e in self.entries if e.entity_kind == "field"}

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["entity_kind", "entity_id", "rule"])
            for e in self.entries:
                w.writerow([e.entity_kind, e.entity_id, e.rule])


# --- reading -----------------------------------------------------------------


def _read_researchers(path: Path) -> dict[str, Researcher]:
    researchers: dict[str, Researcher] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty researchers file", path, 1)
        if [h.strip() for h in header] != RESEARCHER_COLUMNS:
            raise ParseError(f"expected header {','.join(RESEARCHER_COLUMNS)}", path, 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(RESEARCHER_COLUMNS):
                raise ParseError(f"expected {len(RESEARCHER_COLUMNS)} columns, got {len(row)}", path, line)
            rid, uni, fcode, dcode, rank, years = (c.strip() for c in row)
            if not rid:
                raise ParseError("empty researcher id", path, line)
            try:
                r = Researcher(rid, uni, fcode, dcode, Rank(rank.lower()), int(years))
            except ValueError as exc:
                raise ParseError(str(exc), path, line) from None
            if rid in researchers:
                raise DuplicateId("researcher", rid)
            researchers[rid] = r
    return researchers


def _parse_publication(obj: dict) -> Publication:
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")
    cats = obj["categories"]
    if not isinstance(cats, list) or not cats:
        raise ValueError("categories must be a nonempty list")
    if all("weight" not in c for c in cats):
        categories = tuple((str(c["name"]), 1.0 / len(cats)) for c in cats)
    else:
        categories = tuple((str(c["name"]), float(c["weight"])) for c in cats)
    byline = tuple(
        AuthorSlot(int(s["position"]), str(s["university_id"]), s.get("researcher_id"))
        for s in obj["byline"]
    )
    citations = obj["citations"]
    if isinstance(citations, bool) or not isinstance(citations, int):
        raise ValueError(f"citations must be an integer, got {citations!r}")
    return Publication(
        id=str(obj["id"]),
        year=int(obj["year"]),
        doc_type=DocType(obj["doc_type"]),
        citations=citations,
        categories=categories,
        byline=byline,
    )


def _read_publications(path: Path) -> dict[str, Publication]:
    pubs: dict[str, Publication] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                pub = _parse_publication(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path, line_no) from None
            except KeyError as exc:
                raise ParseError(f"missing field {exc.args[0]!r}", path, line_no) from None
            except (TypeError, ValueError) as exc:
                raise ParseError(str(exc), path, line_no) from None
            if pub.id in pubs:
                raise DuplicateId("publication", pub.id)
            pubs[pub.id] = pub
    return pubs


def load_corpus(
    researchers_path: str | Path,
    publications_path: str | Path,
    window: tuple[int, int] | None = None,
) -> Corpus:
    """Read and cross-validate a researchers CSV and a publications JSONL file.

    When ``window`` is omitted it is taken as the span of publication years.
    """
    researchers = _read_researchers(Path(researchers_path))
    pubs = _read_publications(Path(publications_path))
    for pub in pubs.values():
        for rid in pub.tracked_ids:
            if rid not in researchers:
                raise DanglingReference(rid, pub.id)
    if window is None:
        years = [p.year for p in pubs.values()]
        window = (min(years), max(years)) if years else (0, 0)
    try:
        return Corpus(researchers, pubs, window)
    except ValueError as exc:
        raise ParseError(str(exc), publications_path) from None


# --- writing -----------------------------------------------------------------


def publication_to_json(pub: Publication) -> dict:
    byline = []
    for s in pub.byline:
        slot = {"position": s.position}
        if s.researcher_id is not None:
            slot["researcher_id"] = s.researcher_id
        slot["university_id"] = s.university_id
        byline.append(slot)
    return {
        "id": pub.id,
        "year": pub.year,
        "doc_type": pub.doc_type.value,
        "citations": pub.citations,
        "categories": [{"name": n, "weight": w} for n, w in pub.categories],
        "byline": byline,
    }


def write_researchers(researchers: Iterable[Researcher], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESEARCHER_COLUMNS)
        for r in researchers:
            w.writerow([r.id, r.university_id, r.field_code, r.discipline_code, r.rank.value, r.years_active])


def write_publications(publications: Iterable[Publication], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pub in publications:
            fh.write(json.dumps(publication_to_json(pub), separators=(",", ":")))
            fh.write("\n")


def save_corpus(corpus: Corpus, researchers_path: str | Path, publications_path: str | Path) -> None:
    """Write ``corpus`` in the formats read by :func:`load_corpus`, in id order."""
    write_researchers((corpus.researchers[k] for k in sorted(corpus.researchers)), researchers_path)
    write_publications((corpus.publications[k] for k in sorted(corpus.publications)), publications_path)


# --- eligibility -------------------------------------------------------------


def filter_eligible(corpus: Corpus, config: EligibilityConfig) -> tuple[Corpus, ExclusionLog]:
    """Apply the field- and researcher-level eligibility rules.

    Order: fields with too small a share of publishing researchers go first,
    then researchers below ``min_years`` or with nil output (or nil
    citations for impact datasets), then fields where any populated rank
    group is smaller than ``min_per_rank``. Every excluded researcher gets
    exactly one log entry naming the first rule that removed it; dropped
    fields also get a ``field`` entry.

    Excluded researchers are detached from bylines rather than deleted, so
    publication credit is still split over the full author list.
    """
    log = ExclusionLog()
    by_researcher = corpus.publications_of()
    by_field: dict[str, list[Researcher]] = defaultdict(list)
    for rid in sorted(corpus.researchers):
        r = corpus.researchers[rid]
        by_field[r.field_code].append(r)

    alive: dict[str, Researcher] = {}
    for fcode in sorted(by_field):
        members = by_field[fcode]
        publishing = sum(1 for r in members if by_researcher[r.id])
        if publishing / len(members) < config.min_publishing_share:
            log.add("field", fcode, "min_publishing_share")
            for r in members:
                log.add("researcher", r.id, "min_publishing_share")
            continue
        for r in members:
            pubs = by_researcher[r.id]
            if r.years_active < config.min_years:
                log.add("researcher", r.id, "min_years")
            elif not pubs:
                log.add("researcher", r.id, "no_output")
            elif config.dataset_kind is DatasetKind.IMPACT and sum(p.citations for p in pubs) == 0:
                log.add("researcher", r.id, "no_citations")
            else:
                alive[r.id] = r

    groups = Counter((r.field_code, r.rank) for r in alive.values())
    small_fields = sorted({f for (f, _), n in groups.items() if n < config.min_per_rank})
    for fcode in small_fields:
        log.add("field", fcode, "min_per_rank")
        for rid in sorted(r.id for r in alive.values() if r.field_code == fcode):
            log.add("researcher", rid, "min_per_rank")
            del alive[rid]

    if not alive:
        raise EmptyResult("no researcher survives the eligibility filters")

    survivors = {rid: alive[rid] for rid in sorted(alive)}
    pubs = {}
    for pid, pub in corpus.publications.items():
        if any(rid is not None and rid not in survivors for rid in (s.researcher_id for s in pub.byline)):
            pub = replace(
                pub,
                byline=tuple(
                    s if s.researcher_id is None or s.researcher_id in survivors else replace(s, researcher_id=None)
                    for s in pub.byline
                ),
            )
        pubs[pid] = pub
    return Corpus(survivors, pubs, corpus.window), log
