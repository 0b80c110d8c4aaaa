from __future__ import annotations

from pathlib import Path

import pytest

from bylinerank import _pykernels
from bylinerank.corpus import AuthorSlot, Corpus, DocType, Publication, Rank, Researcher

DATA = Path(__file__).parent / "data"

try:
    from bylinerank import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if compiled is not None:
    BACKENDS.append(pytest.param(compiled, id="compiled"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def fixture_paths():
    return DATA / "researchers.csv", DATA / "publications.jsonl"


def make_byline(unis, tracked=None):
    tracked = tracked or {}
    return tuple(AuthorSlot(k + 1, u, tracked.get(k)) for k, u in enumerate(unis))


def make_pub(pid, year, citations, byline, categories=(("Cat", 1.0),), doc_type=DocType.ARTICLE):
    return Publication(pid, year, doc_type, citations, tuple(categories), byline)


def make_researcher(rid, field="F/01", rank=Rank.FULL, years=5, uni="U1", discipline="D"):
    return Researcher(rid, uni, field, discipline, rank, years)


def make_corpus(researchers, pubs, window=(2004, 2008)):
    return Corpus({r.id: r for r in researchers}, {p.id: p for p in pubs}, window)
