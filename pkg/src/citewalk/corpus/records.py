"""Record types for papers, institutions, and the annotated citation graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Iterable

from ..geo.distance import GeoPoint


@dataclass(frozen=True)
class Author:
    name: str
    affiliation_id: str | None = None


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    title: str
    authors: tuple[Author, ...]
    publication_date: date
    cited_paper_ids: tuple[str, ...]

    def normalized_author_names(self) -> frozenset[str]:
        return frozenset(normalize_author_name(a.name) for a in self.authors)


def normalize_author_name(name: str) -> str:
    """Case-folded, whitespace-collapsed form used for self-citation matching."""
    return " ".join(name.split()).casefold()


@dataclass
class Institution:
    institution_id: str
    name: str
    location: GeoPoint | None = None
    country: str | None = None

    @property
    def resolved(self) -> bool:
        return self.location is not None


@dataclass
class Corpus:
    """Cleaned paper records plus the institutions they reference."""

    papers: dict[str, PaperRecord] = field(default_factory=dict)
    institutions: dict[str, Institution] = field(default_factory=dict)

    @property
    def n_papers(self) -> int:
        return len(self.papers)

    @property
    def n_citations(self) -> int:
        return sum(len(p.cited_paper_ids) for p in self.papers.values())

    def resolved_institutions(self) -> list[Institution]:
        return [inst for inst in self.institutions.values() if inst.resolved]


@dataclass(frozen=True)
class CitationEdge:
    """One cleaned citation, annotated with endpoint institutions and weight.

    distance_km is None when either endpoint institution lacks coordinates;
    such edges carry the neutral weight 1.0 so the citation still counts.
    """

    citing: str
    cited: str
    citing_institution: str | None
    cited_institution: str | None
    distance_km: float | None
    geographic_weight: float
    self_citation: bool
    citing_country: str | None = None
    cited_country: str | None = None

    @property
    def georesolved(self) -> bool:
        return self.distance_km is not None


@dataclass
class CitationGraph:
    """Directed citation graph over paper ids, one edge per cleaned citation."""

    nodes: tuple[str, ...]
    edges: tuple[CitationEdge, ...]
    max_distance_km: float | None = None

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("graph nodes must be unique")
        seen = set()
        node_set = set(self.nodes)
        for e in self.edges:
            if e.citing == e.cited:
                raise ValueError(f"self-loop edge on {e.citing!r}")
            if (e.citing, e.cited) in seen:
                raise ValueError(f"duplicate edge {e.citing!r} -> {e.cited!r}")
            if e.citing not in node_set or e.cited not in node_set:
                raise ValueError(f"edge endpoint missing from nodes: {e.citing!r} -> {e.cited!r}")
            seen.add((e.citing, e.cited))
        self._out: dict[str, list[CitationEdge]] | None = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def out_edges(self, node: str) -> list[CitationEdge]:
        if self._out is None:
            out: dict[str, list[CitationEdge]] = {n: [] for n in self.nodes}
            for e in self.edges:
                out[e.citing].append(e)
            # Stable successor order keeps sampling and matrices reproducible.
            for lst in out.values():
                lst.sort(key=lambda e: e.cited)
            self._out = out
        return self._out[node]

    def edge_map(self) -> dict[tuple[str, str], CitationEdge]:
        return {(e.citing, e.cited): e for e in self.edges}

    def self_citation_edges(self) -> list[CitationEdge]:
        return [e for e in self.edges if e.self_citation]
