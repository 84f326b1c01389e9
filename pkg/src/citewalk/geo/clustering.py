"""Density clustering of institution coordinates on the sphere."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.cluster import DBSCAN

from ..validation import check_coordinates_array
from .distance import EARTH_RADIUS_KM, GeoPoint

# Points too sparse to join any cluster get this label.
NOISE = -1

DEFAULT_EPS_KM = 50.0
DEFAULT_MIN_PTS = 5


@dataclass
class ClusterAssignment:
    """Cluster labels per institution; NOISE (-1) marks unclustered points."""

    labels: dict[str, int]
    eps_km: float
    min_pts: int

    @property
    def n_clusters(self) -> int:
        return len({v for v in self.labels.values() if v != NOISE})

    @property
    def n_noise(self) -> int:
        return sum(1 for v in self.labels.values() if v == NOISE)

    def partition(self) -> dict[int, frozenset[str]]:
        """Label-independent view: cluster id -> member set, noise excluded."""
        out: dict[int, set[str]] = {}
        for key, label in self.labels.items():
            if label != NOISE:
                out.setdefault(label, set()).add(key)
        return {k: frozenset(v) for k, v in out.items()}


class GeoDBSCAN(BaseEstimator, ClusterMixin):
    """DBSCAN over latitude/longitude pairs with great-circle distances.

    eps_km is the neighbourhood radius in kilometres; min_pts the minimum
    neighbourhood size (the point itself included) for a core point.
    Labels are deterministic for a fixed input order.
    """

    def __init__(
        self,
        eps_km: float = DEFAULT_EPS_KM,
        min_pts: int = DEFAULT_MIN_PTS,
        earth_radius_km: float = EARTH_RADIUS_KM,
    ):
        self.eps_km = eps_km
        self.min_pts = min_pts
        self.earth_radius_km = earth_radius_km

    def fit(self, X, y=None):
        if self.eps_km <= 0:
            raise ValueError(f"eps_km must be positive, got {self.eps_km}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be at least 1, got {self.min_pts}")
        coords = check_coordinates_array(X)
        # sklearn's haversine metric works on a unit sphere in radians.
        core = DBSCAN(
            eps=self.eps_km / self.earth_radius_km,
            min_samples=self.min_pts,
            metric="haversine",
            algorithm="ball_tree",
        ).fit(np.radians(coords))
        self.labels_ = core.labels_.astype(int)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


def dbscan_cluster(
    points: Sequence[tuple[str, GeoPoint]] | Iterable[tuple[str, GeoPoint]],
    eps_km: float = DEFAULT_EPS_KM,
    min_pts: int = DEFAULT_MIN_PTS,
    earth_radius_km: float = EARTH_RADIUS_KM,
) -> ClusterAssignment:
    """Cluster (id, GeoPoint) pairs; empty input gives an empty assignment."""
    items = list(points)
    if not items:
        return ClusterAssignment({}, eps_km, min_pts)
    ids = [key for key, _ in items]
    coords = [(p.latitude, p.longitude) for _, p in items]
    labels = GeoDBSCAN(eps_km, min_pts, earth_radius_km).fit(coords).labels_
    return ClusterAssignment(dict(zip(ids, (int(v) for v in labels))), eps_km, min_pts)


def write_clusters_csv(path, assignment: ClusterAssignment) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["institution_id", "cluster"])
        for key in sorted(assignment.labels):
            writer.writerow([key, assignment.labels[key]])
