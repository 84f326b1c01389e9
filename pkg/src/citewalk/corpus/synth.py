"""Deterministic synthetic corpora with a distance-controlled citation profile.

The generator places institutions around a handful of country centres, then
allocates citations so that the count in each distance bin tracks the decay
curve scale * (y0 + A1 * exp(-mid / t1)) at the bin midpoint. Fitting the
binned output therefore recovers (scale * y0, scale * A1, t1) up to integer
rounding, which is what the round-trip tests rely on.
"""

from __future__ import annotations

import math
from datetime import date, timedelta

import numpy as np

from ..errors import DataError
from ..geo.distance import GeoPoint, haversine_distance
from ..validation import check_seed
from .records import Author, Corpus, Institution, PaperRecord

DEFAULT_Y0 = 2.0
DEFAULT_A1 = 10.0
DEFAULT_T1_KM = 3000.0
DEFAULT_SCALE = 20.0


def synth_corpus(
    n_papers: int,
    n_institutions: int = 50,
    y0: float = DEFAULT_Y0,
    a1: float = DEFAULT_A1,
    t1_km: float = DEFAULT_T1_KM,
    scale: float = DEFAULT_SCALE,
    bin_width_km: float = 100.0,
    seed: int = 0,
) -> Corpus:
    """Generate a reproducible corpus with an exponential citation-distance profile."""
    if n_papers < 1:
        raise DataError("cannot generate an empty corpus (n_papers must be >= 1)")
    if n_institutions < 1:
        raise DataError("need at least one institution")
    if t1_km <= 0 or scale <= 0 or bin_width_km <= 0:
        raise ValueError("t1_km, scale, and bin_width_km must all be positive")
    rng = np.random.default_rng(check_seed(seed))

    institutions = _make_institutions(n_institutions, rng)
    papers_at = _assign_papers(n_papers, institutions, rng)
    citations = _allocate_citations(
        institutions, papers_at, y0, a1, t1_km, scale, bin_width_km, rng
    )

    papers: dict[str, PaperRecord] = {}
    epoch = date(1970, 1, 1)
    author_pools = {
        inst.institution_id: [
            f"Author {inst.institution_id}-{k}"
            for k in range(max(2, len(papers_at[inst.institution_id]) // 3 + 1))
        ]
        for inst in institutions
    }
    for inst in institutions:
        pool = author_pools[inst.institution_id]
        for pid in papers_at[inst.institution_id]:
            n_authors = int(rng.integers(1, min(3, len(pool)) + 1))
            picked = rng.choice(len(pool), size=n_authors, replace=False)
            papers[pid] = PaperRecord(
                paper_id=pid,
                title=f"Synthetic paper {pid}",
                authors=tuple(
                    Author(pool[i], inst.institution_id) for i in sorted(picked)
                ),
                publication_date=epoch + timedelta(days=int(rng.integers(0, 16000))),
                cited_paper_ids=tuple(citations.get(pid, ())),
            )
    ordered = {pid: papers[pid] for pid in sorted(papers)}
    return Corpus(
        papers=ordered,
        institutions={inst.institution_id: inst for inst in institutions},
    )


def _make_institutions(n: int, rng) -> list[Institution]:
    n_countries = max(2, n // 5) if n > 1 else 1
    centres = [
        (rng.uniform(-55.0, 65.0), rng.uniform(-180.0, 180.0))
        for _ in range(n_countries)
    ]
    out = []
    for i in range(n):
        country_idx = i % n_countries
        lat0, lon0 = centres[country_idx]
        lat = float(np.clip(lat0 + rng.normal(0.0, 1.2), -89.0, 89.0))
        lon = float((lon0 + rng.normal(0.0, 1.2) + 180.0) % 360.0 - 180.0)
        out.append(
            Institution(
                institution_id=f"inst-{i:03d}",
                name=f"Institution {i:03d}",
                location=GeoPoint(lat, lon),
                country=f"C{country_idx:02d}",
            )
        )
    return out


def _assign_papers(n_papers: int, institutions, rng) -> dict[str, list[str]]:
    width = len(str(max(n_papers - 1, 1)))
    papers_at: dict[str, list[str]] = {inst.institution_id: [] for inst in institutions}
    for i in range(n_papers):
        inst = institutions[i % len(institutions)]
        papers_at[inst.institution_id].append(f"p{i:0{width}d}")
    return papers_at


def _allocate_citations(
    institutions, papers_at, y0, a1, t1_km, scale, bin_width_km, rng
) -> dict[str, list[str]]:
    # Bucket institution pairs (including same-institution pairs, d = 0)
    # by distance bin, then fill each bin to its curve target.
    bins: dict[int, list[tuple[str, str]]] = {}
    for i, inst_a in enumerate(institutions):
        for inst_b in institutions[i:]:
            d = haversine_distance(inst_a.location, inst_b.location)
            k = int(math.floor(d / bin_width_km))
            bins.setdefault(k, []).append(
                (inst_a.institution_id, inst_b.institution_id)
            )

    citations: dict[str, list[str]] = {}
    used: set[tuple[str, str]] = set()

    def _try_cite(inst_from: str, inst_to: str) -> bool:
        src = papers_at[inst_from]
        dst = papers_at[inst_to]
        if not src or not dst:
            return False
        for _ in range(50):
            citing = src[int(rng.integers(0, len(src)))]
            cited = dst[int(rng.integers(0, len(dst)))]
            if citing == cited or (citing, cited) in used:
                continue
            used.add((citing, cited))
            citations.setdefault(citing, []).append(cited)
            return True
        return False

    for k in sorted(bins):
        pairs = bins[k]
        mid = (k + 0.5) * bin_width_km
        target = int(round(scale * (y0 + a1 * math.exp(-mid / t1_km))))
        placed = 0
        idx = 0
        misses = 0
        while placed < target and misses < 2 * len(pairs):
            a, b = pairs[idx % len(pairs)]
            idx += 1
            # Alternate direction so in/out degrees stay balanced.
            src, dst = (a, b) if idx % 2 else (b, a)
            if _try_cite(src, dst):
                placed += 1
                misses = 0
            else:
                misses += 1
    return citations
