"""Builds the institution-annotated citation graph from a cleaned corpus."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable

from ..errors import DataError
from ..geo.distance import (
    DistanceProvider,
    EARTH_RADIUS_KM,
    GreatCircleProvider,
    WEIGHT_EPSILON,
    max_pairwise_distance,
    relative_weight,
)
from .records import CitationEdge, CitationGraph, Corpus, PaperRecord

log = logging.getLogger(__name__)

STRATEGY_FIRST = "first"
STRATEGY_ALL_PAIRS = "all-pairs"
STRATEGIES = (STRATEGY_FIRST, STRATEGY_ALL_PAIRS)

GRAPH_HEADER = [
    "citing",
    "cited",
    "citing_institution",
    "cited_institution",
    "distance_km",
    "geographic_weight",
    "self_citation",
    "citing_country",
    "cited_country",
]


def _first_affiliation(paper: PaperRecord) -> str | None:
    for author in paper.authors:
        if author.affiliation_id:
            return author.affiliation_id
    return None


def _is_self_citation(citing: PaperRecord, cited: PaperRecord) -> bool:
    return bool(citing.normalized_author_names() & cited.normalized_author_names())


def build_citation_graph(
    corpus: Corpus,
    strategy: str = STRATEGY_FIRST,
    epsilon: float = WEIGHT_EPSILON,
    distance_provider: DistanceProvider | None = None,
) -> CitationGraph:
    """Annotate every cleaned citation with institutions, distance and weight.

    The weight of an edge is its endpoint distance divided by the corpus
    maximum, floored at epsilon. Edges whose institutions have no resolved
    coordinates keep the neutral weight 1.0 (flagged via distance_km=None)
    so no citation is silently deleted. When every resolved institution sits
    at a single location there is no distance scale; all edges then fall
    back to the neutral weight as well.

    strategy "first" uses the first-listed affiliation of each paper;
    "all-pairs" averages the weight over all citing-author x cited-author
    affiliation pairs that have coordinates.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    provider = distance_provider or GreatCircleProvider()

    resolved_points = [i.location for i in corpus.resolved_institutions()]
    d_max = None
    if len(resolved_points) >= 2:
        d_max = max_pairwise_distance(resolved_points)
        if d_max == 0.0:
            log.warning(
                "all resolved institutions share one location; "
                "falling back to neutral weights"
            )
            d_max = None

    def _locate(inst_id: str | None):
        if inst_id is None:
            return None
        inst = corpus.institutions.get(inst_id)
        return inst.location if inst else None

    def _country(inst_id: str | None):
        if inst_id is None:
            return None
        inst = corpus.institutions.get(inst_id)
        return inst.country if inst else None

    edges = []
    for citing_id in corpus.papers:
        citing = corpus.papers[citing_id]
        for cited_id in citing.cited_paper_ids:
            cited = corpus.papers[cited_id]
            citing_inst = _first_affiliation(citing)
            cited_inst = _first_affiliation(cited)
            distance = None
            weight = 1.0
            if d_max is not None:
                if strategy == STRATEGY_FIRST:
                    a = _locate(citing_inst)
                    b = _locate(cited_inst)
                    if a is not None and b is not None:
                        distance = provider.distance(a, b)
                        weight = relative_weight(distance, d_max, epsilon)
                else:
                    pair_stats = []
                    for au in citing.authors:
                        a = _locate(au.affiliation_id)
                        if a is None:
                            continue
                        for bu in cited.authors:
                            b = _locate(bu.affiliation_id)
                            if b is None:
                                continue
                            d = provider.distance(a, b)
                            pair_stats.append((d, relative_weight(d, d_max, epsilon)))
                    if pair_stats:
                        distance = sum(d for d, _ in pair_stats) / len(pair_stats)
                        weight = sum(w for _, w in pair_stats) / len(pair_stats)
            edges.append(
                CitationEdge(
                    citing=citing_id,
                    cited=cited_id,
                    citing_institution=citing_inst,
                    cited_institution=cited_inst,
                    distance_km=distance,
                    geographic_weight=weight,
                    self_citation=_is_self_citation(citing, cited),
                    citing_country=_country(citing_inst),
                    cited_country=_country(cited_inst),
                )
            )
    return CitationGraph(
        nodes=tuple(sorted(corpus.papers)),
        edges=tuple(edges),
        max_distance_km=d_max,
    )


def write_graph_csv(graph: CitationGraph, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GRAPH_HEADER)
        for e in graph.edges:
            writer.writerow(
                [
                    e.citing,
                    e.cited,
                    e.citing_institution or "",
                    e.cited_institution or "",
                    "" if e.distance_km is None else repr(e.distance_km),
                    repr(e.geographic_weight),
                    int(e.self_citation),
                    e.citing_country or "",
                    e.cited_country or "",
                ]
            )


def write_nodes_txt(graph: CitationGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for node in graph.nodes:
            fh.write(node)
            fh.write("\n")


def read_nodes_txt(path) -> tuple[str, ...]:
    with open(path, encoding="utf-8") as fh:
        return tuple(line.strip() for line in fh if line.strip())


def read_graph_csv(path, nodes: Iterable[str] | None = None) -> CitationGraph:
    """Rebuild a CitationGraph from its CSV dump.

    Papers that never appear on an edge are invisible in the CSV, so pass
    the node list (see write_nodes_txt) to keep isolated papers in the
    ranking universe.
    """
    edges = []
    endpoint_nodes = set()
    path = Path(path)
    if not path.exists():
        raise DataError(f"graph file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(GRAPH_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise DataError(f"graph CSV {path} lacks columns: {sorted(missing)}")
        for row in reader:
            distance = row["distance_km"]
            edges.append(
                CitationEdge(
                    citing=row["citing"],
                    cited=row["cited"],
                    citing_institution=row["citing_institution"] or None,
                    cited_institution=row["cited_institution"] or None,
                    distance_km=float(distance) if distance else None,
                    geographic_weight=float(row["geographic_weight"]),
                    self_citation=bool(int(row["self_citation"])),
                    citing_country=row["citing_country"] or None,
                    cited_country=row["cited_country"] or None,
                )
            )
            endpoint_nodes.add(row["citing"])
            endpoint_nodes.add(row["cited"])
    if nodes is None:
        node_tuple = tuple(sorted(endpoint_nodes))
    else:
        node_tuple = tuple(sorted(set(nodes) | endpoint_nodes))
    try:
        return CitationGraph(nodes=node_tuple, edges=tuple(edges))
    except ValueError as exc:
        raise DataError(f"inconsistent graph CSV {path}: {exc}") from exc


def institution_statistics(corpus: Corpus, graph: CitationGraph) -> list[dict]:
    """Per-institution paper and citation tallies for reporting."""
    papers_at: dict[str, int] = {}
    for paper in corpus.papers.values():
        inst = _first_affiliation(paper)
        if inst:
            papers_at[inst] = papers_at.get(inst, 0) + 1
    received: dict[str, int] = {}
    for e in graph.edges:
        if e.cited_institution:
            received[e.cited_institution] = received.get(e.cited_institution, 0) + 1
    rows = []
    for inst_id in sorted(corpus.institutions):
        inst = corpus.institutions[inst_id]
        rows.append(
            {
                "institution_id": inst_id,
                "name": inst.name,
                "latitude": inst.location.latitude if inst.location else None,
                "longitude": inst.location.longitude if inst.location else None,
                "country": inst.country,
                "papers": papers_at.get(inst_id, 0),
                "citations_received": received.get(inst_id, 0),
            }
        )
    return rows
