"""Line-delimited corpus ingestion.

Each input line is one JSON object:

    {"id": "...", "title": "...",
     "authors": [{"name": "...", "affiliation": "..."}],
     "date": "1994-05-17", "citations": ["...", ...]}

Malformed lines are counted and skipped; duplicate citations, self-loops
and references to unknown papers are dropped with counters that reconcile
exactly against the raw citation count.
"""

from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass, asdict
from datetime import date
from pathlib import Path
from typing import IO, Iterable

from ..errors import DataError
from .records import Author, Corpus, Institution, PaperRecord

log = logging.getLogger(__name__)


@dataclass
class ParseStats:
    papers: int = 0
    malformed_lines: int = 0
    duplicate_paper_ids: int = 0
    raw_citations: int = 0
    self_loops_dropped: int = 0
    duplicate_citations_dropped: int = 0
    dangling_dropped: int = 0

    @property
    def edges_after_cleaning(self) -> int:
        return (
            self.raw_citations
            - self.self_loops_dropped
            - self.duplicate_citations_dropped
            - self.dangling_dropped
        )

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["edges_after_cleaning"] = self.edges_after_cleaning
        return d


def _parse_record(obj: dict) -> PaperRecord:
    paper_id = obj["id"]
    if not isinstance(paper_id, str) or not paper_id:
        raise ValueError("id must be a non-empty string")
    title = obj["title"]
    if not isinstance(title, str):
        raise ValueError("title must be a string")
    authors = []
    for entry in obj["authors"]:
        name = entry["name"]
        if not isinstance(name, str) or not name.strip():
            raise ValueError("author name must be a non-empty string")
        affiliation = entry.get("affiliation")
        if affiliation is not None and not isinstance(affiliation, str):
            raise ValueError("affiliation must be a string when present")
        authors.append(Author(name=name, affiliation_id=affiliation or None))
    pub_date = date.fromisoformat(obj["date"])
    citations = obj["citations"]
    if not isinstance(citations, list) or any(not isinstance(c, str) for c in citations):
        raise ValueError("citations must be a list of paper ids")
    return PaperRecord(
        paper_id=paper_id,
        title=title,
        authors=tuple(authors),
        publication_date=pub_date,
        cited_paper_ids=tuple(citations),
    )


def _open_lines(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8")
    if hasattr(source, "read") or hasattr(source, "__iter__"):
        return source
    raise DataError(f"cannot read corpus from {source!r}")


def parse_corpus(source) -> tuple[Corpus, ParseStats]:
    """Parse line-delimited paper records from a path, stream, or iterable.

    Returns the cleaned corpus together with the drop counters. Parsing is
    idempotent: feeding the serialized result back in reproduces the same
    corpus with no further drops.
    """
    stats = ParseStats()
    papers: dict[str, PaperRecord] = {}
    lines = _open_lines(source)
    try:
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("record is not an object")
                record = _parse_record(obj)
            except (ValueError, KeyError, TypeError) as exc:
                stats.malformed_lines += 1
                log.warning("skipping malformed line %d: %s", lineno, exc)
                continue
            if record.paper_id in papers:
                stats.duplicate_paper_ids += 1
                log.warning("skipping duplicate paper id %r (line %d)", record.paper_id, lineno)
                continue
            stats.raw_citations += len(record.cited_paper_ids)
            deduped = list(dict.fromkeys(record.cited_paper_ids))
            stats.duplicate_citations_dropped += len(record.cited_paper_ids) - len(deduped)
            kept = [c for c in deduped if c != record.paper_id]
            stats.self_loops_dropped += len(deduped) - len(kept)
            papers[record.paper_id] = PaperRecord(
                paper_id=record.paper_id,
                title=record.title,
                authors=record.authors,
                publication_date=record.publication_date,
                cited_paper_ids=tuple(kept),
            )
    finally:
        if isinstance(lines, io.IOBase):
            lines.close()

    # References to papers outside the corpus can only be settled at the end.
    for pid, record in papers.items():
        kept = tuple(c for c in record.cited_paper_ids if c in papers)
        dropped = len(record.cited_paper_ids) - len(kept)
        if dropped:
            stats.dangling_dropped += dropped
            papers[pid] = PaperRecord(
                paper_id=record.paper_id,
                title=record.title,
                authors=record.authors,
                publication_date=record.publication_date,
                cited_paper_ids=kept,
            )
    stats.papers = len(papers)

    institutions: dict[str, Institution] = {}
    for record in papers.values():
        for author in record.authors:
            if author.affiliation_id and author.affiliation_id not in institutions:
                institutions[author.affiliation_id] = Institution(
                    institution_id=author.affiliation_id,
                    name=author.affiliation_id,
                )
    return Corpus(papers=papers, institutions=institutions), stats


def serialize_corpus(corpus: Corpus, target) -> None:
    """Write the corpus back out as line-delimited records."""

    def _write(fh: IO[str]) -> None:
        for record in corpus.papers.values():
            obj = {
                "id": record.paper_id,
                "title": record.title,
                "authors": [
                    {"name": a.name, "affiliation": a.affiliation_id}
                    for a in record.authors
                ],
                "date": record.publication_date.isoformat(),
                "citations": list(record.cited_paper_ids),
            }
            fh.write(json.dumps(obj, sort_keys=True))
            fh.write("\n")

    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fh:
            _write(fh)
    else:
        _write(target)
