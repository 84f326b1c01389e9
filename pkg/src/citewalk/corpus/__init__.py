"""Corpus ingestion: records, parsing, geocoding, graph building, synthesis."""

from .records import (
    Author,
    CitationEdge,
    CitationGraph,
    Corpus,
    Institution,
    PaperRecord,
    normalize_author_name,
)
from .parse import ParseStats, parse_corpus, serialize_corpus
from .geocode import (
    API_KEY_ENV,
    CacheEntry,
    CoordinateCache,
    Geocoder,
    HttpGeocoder,
    NullGeocoder,
    ResolutionReport,
    resolve_coordinates,
)
from .graph import (
    STRATEGIES,
    STRATEGY_ALL_PAIRS,
    STRATEGY_FIRST,
    build_citation_graph,
    institution_statistics,
    read_graph_csv,
    read_nodes_txt,
    write_graph_csv,
    write_nodes_txt,
)
from .synth import synth_corpus

__all__ = [
    "Author",
    "CitationEdge",
    "CitationGraph",
    "Corpus",
    "Institution",
    "PaperRecord",
    "normalize_author_name",
    "ParseStats",
    "parse_corpus",
    "serialize_corpus",
    "API_KEY_ENV",
    "CacheEntry",
    "CoordinateCache",
    "Geocoder",
    "HttpGeocoder",
    "NullGeocoder",
    "ResolutionReport",
    "resolve_coordinates",
    "STRATEGIES",
    "STRATEGY_ALL_PAIRS",
    "STRATEGY_FIRST",
    "build_citation_graph",
    "institution_statistics",
    "read_graph_csv",
    "read_nodes_txt",
    "write_graph_csv",
    "write_nodes_txt",
    "synth_corpus",
]
