"""Institution coordinate resolution with a CSV-backed cache.

Resolution order is cache first, then the pluggable geocoder. The default
geocoder is offline and resolves nothing, so runs without network access
are reproducible; an HTTP geocoder can be enabled explicitly.
"""

from __future__ import annotations

import csv
import logging
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests

from ..errors import DataError
from ..geo.distance import GeoPoint
from .records import Corpus

log = logging.getLogger(__name__)

API_KEY_ENV = "CITEWALK_GEOCODER_API_KEY"

CACHE_HEADER = ["institution_id", "name", "latitude", "longitude", "country"]


class Geocoder(Protocol):
    def geocode(self, query: str) -> GeoPoint | None: ...


class NullGeocoder:
    """Offline default; resolves nothing."""

    def geocode(self, query: str) -> GeoPoint | None:
        return None


class HttpGeocoder:
    """Minimal HTTP GET geocoder.

    Sends ?address=<query>&key=<api key> and accepts either a flat
    {"latitude": .., "longitude": ..} / {"lat": .., "lon": ..} body or a
    Google-style results list. The API key comes from the environment, not
    from configuration files, so it never lands in run artifacts.
    """

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = API_KEY_ENV,
        timeout: float = 10.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout
        self._session = session or requests.Session()

    def geocode(self, query: str) -> GeoPoint | None:
        params = {"address": query}
        key = os.environ.get(self.api_key_env)
        if key:
            params["key"] = key
        try:
            resp = self._session.get(self.endpoint, params=params, timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
        except (requests.RequestException, ValueError) as exc:
            log.warning("geocoding %r failed: %s", query, exc)
            return None
        return _extract_point(body)


def _extract_point(body) -> GeoPoint | None:
    if not isinstance(body, dict):
        return None
    candidates = []
    if "latitude" in body and "longitude" in body:
        candidates.append((body["latitude"], body["longitude"]))
    if "lat" in body and ("lon" in body or "lng" in body):
        candidates.append((body["lat"], body.get("lon", body.get("lng"))))
    results = body.get("results")
    if isinstance(results, list) and results:
        loc = results[0].get("geometry", {}).get("location", {})
        if "lat" in loc and "lng" in loc:
            candidates.append((loc["lat"], loc["lng"]))
    for lat, lon in candidates:
        try:
            return GeoPoint(float(lat), float(lon))
        except (TypeError, ValueError):
            continue
    return None


@dataclass
class CacheEntry:
    name: str
    location: GeoPoint | None = None
    country: str | None = None


class CoordinateCache:
    """CSV-backed institution coordinate store.

    The whole file is rewritten atomically (temp file + rename) on save, so
    a concurrent reader never sees a half-written cache.
    """

    def __init__(self, path):
        self.path = Path(path)
        self.entries: dict[str, CacheEntry] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                inst_id = (row.get("institution_id") or "").strip()
                if not inst_id:
                    continue
                lat_raw = (row.get("latitude") or "").strip()
                lon_raw = (row.get("longitude") or "").strip()
                location = None
                if lat_raw and lon_raw:
                    try:
                        location = GeoPoint(float(lat_raw), float(lon_raw))
                    except ValueError as exc:
                        raise DataError(
                            f"bad coordinates for {inst_id!r} in {self.path}: {exc}"
                        ) from exc
                self.entries[inst_id] = CacheEntry(
                    name=(row.get("name") or inst_id).strip() or inst_id,
                    location=location,
                    country=(row.get("country") or "").strip() or None,
                )

    def get(self, institution_id: str) -> CacheEntry | None:
        return self.entries.get(institution_id)

    def put(self, institution_id: str, entry: CacheEntry) -> None:
        with self._lock:
            self.entries[institution_id] = entry

    def save(self) -> None:
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(
                dir=self.path.parent, prefix=self.path.name, suffix=".tmp"
            )
            try:
                with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
                    writer = csv.writer(fh)
                    writer.writerow(CACHE_HEADER)
                    for inst_id in sorted(self.entries):
                        e = self.entries[inst_id]
                        lat = repr(e.location.latitude) if e.location else ""
                        lon = repr(e.location.longitude) if e.location else ""
                        writer.writerow([inst_id, e.name, lat, lon, e.country or ""])
                os.replace(tmp_name, self.path)
            except OSError:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
                raise


@dataclass
class ResolutionReport:
    resolved: int = 0
    unresolved_ids: list[str] = field(default_factory=list)
    cache_hits: int = 0
    geocoder_calls: int = 0
    geocoder_hits: int = 0

    @property
    def total(self) -> int:
        return self.resolved + len(self.unresolved_ids)

    @property
    def resolution_rate(self) -> float:
        return self.resolved / self.total if self.total else 1.0

    def to_json_dict(self) -> dict:
        return {
            "resolved": self.resolved,
            "unresolved": len(self.unresolved_ids),
            "unresolved_ids": sorted(self.unresolved_ids),
            "cache_hits": self.cache_hits,
            "geocoder_calls": self.geocoder_calls,
            "geocoder_hits": self.geocoder_hits,
            "resolution_rate": self.resolution_rate,
        }


def resolve_coordinates(
    corpus: Corpus,
    geocoder: Geocoder | None = None,
    cache: CoordinateCache | None = None,
    save_cache: bool = True,
) -> tuple[Corpus, ResolutionReport]:
    """Fill institution locations from the cache, then the geocoder.

    Already-resolved institutions are left untouched. Freshly geocoded hits
    are added to the cache, which is saved atomically at the end. Unresolved
    institutions are flagged in the report; their citations later carry the
    neutral weight 1.0 rather than being dropped.
    """
    geocoder = geocoder or NullGeocoder()
    report = ResolutionReport()
    cache_dirty = False
    for inst_id in sorted(corpus.institutions):
        inst = corpus.institutions[inst_id]
        if inst.resolved:
            report.resolved += 1
            continue
        entry = cache.get(inst_id) if cache else None
        if entry is not None:
            if entry.name and inst.name == inst_id:
                inst.name = entry.name
            if entry.country and inst.country is None:
                inst.country = entry.country
            if entry.location is not None:
                inst.location = entry.location
                report.cache_hits += 1
                report.resolved += 1
                continue
        report.geocoder_calls += 1
        point = geocoder.geocode(inst.name)
        if point is not None:
            inst.location = point
            report.geocoder_hits += 1
            report.resolved += 1
            if cache is not None:
                cache.put(inst_id, CacheEntry(inst.name, point, inst.country))
                cache_dirty = True
        else:
            report.unresolved_ids.append(inst_id)
    if cache is not None and cache_dirty and save_cache:
        cache.save()
    return corpus, report


def apply_cache_to_corpus(corpus: Corpus, cache: CoordinateCache) -> None:
    """Register cache-only institutions' names/countries without geocoding."""
    for inst_id, inst in corpus.institutions.items():
        entry = cache.get(inst_id)
        if entry is None:
            continue
        if inst.name == inst_id and entry.name:
            inst.name = entry.name
        if inst.country is None:
            inst.country = entry.country
