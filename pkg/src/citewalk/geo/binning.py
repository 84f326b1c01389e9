"""Distance-binned citation counts.

Citations are grouped into uniform distance bins so the count-vs-distance
profile can be plotted and fitted. Filters restrict the counted edges to
citations within one country or across countries.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import numpy as np

if TYPE_CHECKING:
    from ..corpus.records import CitationGraph

FILTER_ALL = "all"
FILTER_INTRA = "intra-country"
FILTER_INTER = "inter-country"

FILTERS = (FILTER_ALL, FILTER_INTRA, FILTER_INTER)

DEFAULT_BIN_WIDTH_KM = 100.0


@dataclass
class DistanceBinSeries:
    """Citation counts per uniform distance bin.

    Bin k covers [k * width, (k + 1) * width). Trailing all-zero bins are
    trimmed; an empty graph yields a zero-length series.
    """

    bin_width_km: float
    counts: np.ndarray
    filter_tag: str = FILTER_ALL

    def __post_init__(self):
        if self.bin_width_km <= 0:
            raise ValueError(f"bin width must be positive, got {self.bin_width_km}")
        if self.filter_tag not in FILTERS:
            raise ValueError(f"unknown filter {self.filter_tag!r}, expected one of {FILTERS}")
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 1:
            raise ValueError("counts must be one-dimensional")
        if (self.counts < 0).any():
            raise ValueError("bin counts cannot be negative")

    @property
    def n_bins(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) * self.bin_width_km

    def nonempty(self) -> tuple[np.ndarray, np.ndarray]:
        """Midpoints and counts of the populated bins, for curve fitting."""
        mask = self.counts > 0
        return self.midpoints()[mask], self.counts[mask].astype(float)

    def to_rows(self) -> list[tuple[float, float, int, str]]:
        w = self.bin_width_km
        return [
            (k * w, (k + 1) * w, int(c), self.filter_tag)
            for k, c in enumerate(self.counts)
        ]


def _edge_passes(edge, filter_tag: str) -> bool:
    if filter_tag == FILTER_ALL:
        return True
    # Country filters need a country on both endpoints.
    if edge.citing_country is None or edge.cited_country is None:
        return False
    same = edge.citing_country == edge.cited_country
    return same if filter_tag == FILTER_INTRA else not same


def bin_citations_by_distance(
    graph: "CitationGraph",
    bin_width_km: float = DEFAULT_BIN_WIDTH_KM,
    filter_tag: str = FILTER_ALL,
) -> DistanceBinSeries:
    """Count graph edges per distance bin.

    Edges whose endpoints lack resolved coordinates carry no distance and
    are excluded from every filter, so the series total always equals the
    number of located edges passing the filter.
    """
    if bin_width_km <= 0:
        raise ValueError(f"bin width must be positive, got {bin_width_km}")
    if filter_tag not in FILTERS:
        raise ValueError(f"unknown filter {filter_tag!r}, expected one of {FILTERS}")
    indices = []
    for edge in graph.edges:
        if edge.distance_km is None:
            continue
        if not _edge_passes(edge, filter_tag):
            continue
        indices.append(int(math.floor(edge.distance_km / bin_width_km)))
    if not indices:
        return DistanceBinSeries(bin_width_km, np.zeros(0, dtype=np.int64), filter_tag)
    counts = np.bincount(np.asarray(indices, dtype=np.int64))
    return DistanceBinSeries(bin_width_km, counts, filter_tag)


def write_bin_series_csv(path, series: Iterable[DistanceBinSeries]) -> None:
    """Emit one or more bin series as bin_low_km,bin_high_km,citations,filter."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low_km", "bin_high_km", "citations", "filter"])
        for s in series:
            for low, high, count, tag in s.to_rows():
                writer.writerow([repr(low), repr(high), count, tag])


def read_bin_series_csv(path) -> dict[str, DistanceBinSeries]:
    """Inverse of write_bin_series_csv, keyed by filter tag."""
    rows: dict[str, list[tuple[float, float, int]]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.setdefault(row["filter"], []).append(
                (float(row["bin_low_km"]), float(row["bin_high_km"]), int(row["citations"]))
            )
    out = {}
    for tag, entries in rows.items():
        entries.sort()
        width = entries[0][1] - entries[0][0]
        counts = np.zeros(len(entries), dtype=np.int64)
        for low, high, count in entries:
            counts[int(round(low / width))] = count
        out[tag] = DistanceBinSeries(width, counts, tag)
    return out
