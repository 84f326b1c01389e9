"""Shared builders for graph and corpus test fixtures."""

from __future__ import annotations

import json

import numpy as np
import pytest

from citewalk.corpus.records import CitationEdge, CitationGraph


def make_edge(citing, cited, weight=1.0, distance=None, self_citation=False,
              citing_country=None, cited_country=None,
              citing_institution=None, cited_institution=None):
    return CitationEdge(
        citing=citing,
        cited=cited,
        citing_institution=citing_institution,
        cited_institution=cited_institution,
        distance_km=distance,
        geographic_weight=weight,
        self_citation=self_citation,
        citing_country=citing_country,
        cited_country=cited_country,
    )


def graph_from_pairs(pairs, weights=None, max_distance_km=None):
    """CitationGraph from (citing, cited) pairs; weights parallel when given."""
    if weights is None:
        weights = [1.0] * len(pairs)
    nodes = tuple(sorted({n for p in pairs for n in p}))
    edges = tuple(make_edge(a, b, weight=w) for (a, b), w in zip(pairs, weights))
    return CitationGraph(nodes=nodes, edges=edges, max_distance_km=max_distance_km)


def random_column_stochastic(rng, n):
    m = rng.random((n, n)) + 1e-3
    return m / m.sum(axis=0, keepdims=True)


def paper_line(paper_id, citations=(), authors=None, date="2001-06-15", title=None):
    if authors is None:
        authors = [{"name": f"Author {paper_id}", "affiliation": f"inst-{paper_id}"}]
    return json.dumps(
        {
            "id": paper_id,
            "title": title or f"Paper {paper_id}",
            "authors": authors,
            "date": date,
            "citations": list(citations),
        }
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
