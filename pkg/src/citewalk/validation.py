"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import numpy as np

# Column sums of a damped transition matrix must stay within this of 1.
STOCHASTIC_ATOL = 1e-12


def check_latitude(value: float) -> float:
    v = float(value)
    if not np.isfinite(v) or not -90.0 <= v <= 90.0:
        raise ValueError(f"latitude must be in [-90, 90] degrees, got {value!r}")
    return v


def check_longitude(value: float) -> float:
    v = float(value)
    if not np.isfinite(v) or not -180.0 <= v <= 180.0:
        raise ValueError(f"longitude must be in [-180, 180] degrees, got {value!r}")
    return v


def check_seed(seed) -> int:
    if seed is None:
        return 0
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return int(seed)


def check_probability_vector(vec, atol: float = 1e-9) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("probability vector must be a non-empty 1-d array")
    if (v < -atol).any():
        raise ValueError("probability vector has negative entries")
    total = v.sum()
    if abs(total - 1.0) > atol:
        raise ValueError(f"probability vector sums to {total}, expected 1")
    return v


def check_column_stochastic(matrix, atol: float = STOCHASTIC_ATOL) -> np.ndarray:
    """Validate a square column-stochastic matrix, returning it as float64."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] == 0:
        raise ValueError("matrix must be non-empty")
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    if (m < 0).any():
        raise ValueError("matrix has negative entries")
    col_sums = m.sum(axis=0)
    worst = np.abs(col_sums - 1.0).max()
    if worst > atol:
        raise ValueError(
            f"matrix is not column-stochastic: worst column sum deviation {worst:.3e}"
        )
    return m


def check_coordinates_array(X) -> np.ndarray:
    """Validate an (n, 2) array of latitude/longitude pairs in degrees."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of lat/lon pairs, got shape {arr.shape}")
    for lat, lon in arr:
        check_latitude(lat)
        check_longitude(lon)
    return arr
