"""Great-circle geometry and the distance-based citation weight.

Distances use the haversine formula on a sphere. The citation weight of an
edge is its endpoint distance relative to the largest distance observed in
the corpus, floored at a small epsilon so that zero-distance (same campus)
citations keep a nonzero transition weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from ..validation import check_latitude, check_longitude

EARTH_RADIUS_KM = 6371.0

# Default floor for the relative weight; applies to the d = 0 case.
WEIGHT_EPSILON = 1e-3


@dataclass(frozen=True)
class GeoPoint:
    """A latitude/longitude pair in degrees."""

    latitude: float
    longitude: float

    def __post_init__(self):
        # Plain floats keep repr()-based CSV output stable across numpy types.
        object.__setattr__(self, "latitude", float(self.latitude))
        object.__setattr__(self, "longitude", float(self.longitude))
        check_latitude(self.latitude)
        check_longitude(self.longitude)


class DistanceProvider(Protocol):
    """Pluggable point-to-point distance in kilometres.

    The default is the great-circle distance below; a land-route provider
    can be swapped in without touching the graph builder.
    """

    def distance(self, a: GeoPoint, b: GeoPoint) -> float: ...


def haversine_distance(a: GeoPoint, b: GeoPoint, radius_km: float = EARTH_RADIUS_KM) -> float:
    """Great-circle distance between two points, in kilometres.

    Symmetric, zero iff the coordinates coincide, and never larger than
    half the sphere circumference (pi * radius).
    """
    if radius_km <= 0:
        raise ValueError(f"radius must be positive, got {radius_km}")
    lat_a = math.radians(a.latitude)
    lat_b = math.radians(b.latitude)
    half_dlat = abs(lat_a - lat_b) / 2.0
    half_dlon = abs(math.radians(a.longitude) - math.radians(b.longitude)) / 2.0
    s = math.sin(half_dlat) ** 2 + math.cos(lat_a) * math.cos(lat_b) * math.sin(half_dlon) ** 2
    # Rounding can push the radicand a hair outside [0, 1]; asin needs it inside.
    s = min(max(s, 0.0), 1.0)
    return 2.0 * radius_km * abs(math.asin(math.sqrt(s)))


class GreatCircleProvider:
    """Default DistanceProvider backed by haversine_distance."""

    def __init__(self, radius_km: float = EARTH_RADIUS_KM):
        if radius_km <= 0:
            raise ValueError(f"radius must be positive, got {radius_km}")
        self.radius_km = radius_km

    def distance(self, a: GeoPoint, b: GeoPoint) -> float:
        return haversine_distance(a, b, self.radius_km)


def _haversine_matrix_block(lat, lon, lat2, lon2, radius_km):
    # Vectorised pairwise distances between two coordinate blocks (radians in).
    half_dlat = np.abs(lat[:, None] - lat2[None, :]) / 2.0
    half_dlon = np.abs(lon[:, None] - lon2[None, :]) / 2.0
    s = np.sin(half_dlat) ** 2 + np.cos(lat[:, None]) * np.cos(lat2[None, :]) * np.sin(half_dlon) ** 2
    np.clip(s, 0.0, 1.0, out=s)
    return 2.0 * radius_km * np.abs(np.arcsin(np.sqrt(s)))


def max_pairwise_distance(
    points: Iterable[GeoPoint] | Sequence[GeoPoint],
    radius_km: float = EARTH_RADIUS_KM,
    block: int = 2048,
) -> float:
    """Largest great-circle distance over all point pairs (exact scan).

    Requires at least two points. Identical points give 0, which makes the
    relative weight downstream undefined; see relative_weight. Row blocks
    keep the O(n^2) scan inside a bounded memory footprint.
    """
    pts = list(points)
    if len(pts) < 2:
        raise ValueError(f"need at least two points, got {len(pts)}")
    if block < 1:
        raise ValueError(f"block must be positive, got {block}")
    lat = np.radians([p.latitude for p in pts])
    lon = np.radians([p.longitude for p in pts])
    best = 0.0
    for start in range(0, len(pts), block):
        stop = min(start + block, len(pts))
        d = _haversine_matrix_block(lat[start:stop], lon[start:stop], lat, lon, radius_km)
        best = max(best, float(d.max()))
    return best


def relative_weight(distance_km: float, max_distance_km: float, epsilon: float = WEIGHT_EPSILON) -> float:
    """Citation weight of an edge: max(d / d_max, epsilon).

    Long-range citations approach 1; co-located papers get the epsilon
    floor instead of 0 so they stay reachable in the transition matrix.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if max_distance_km <= 0:
        raise ValueError(
            "max distance must be positive; a corpus whose institutions all share "
            "one location has no usable distance scale"
        )
    if distance_km < 0:
        raise ValueError(f"distance must be non-negative, got {distance_km}")
    # Allow a whisker of float excess from the d_max scan itself.
    if distance_km > max_distance_km * (1.0 + 1e-9):
        raise ValueError(
            f"distance {distance_km} exceeds the corpus maximum {max_distance_km}"
        )
    return max(min(distance_km / max_distance_km, 1.0), epsilon)
