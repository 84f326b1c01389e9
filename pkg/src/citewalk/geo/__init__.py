"""Geographic analysis: distances, citation weights, binning, decay fits, clustering."""

from .distance import (
    EARTH_RADIUS_KM,
    WEIGHT_EPSILON,
    GeoPoint,
    GreatCircleProvider,
    haversine_distance,
    max_pairwise_distance,
    relative_weight,
)
from .binning import (
    DEFAULT_BIN_WIDTH_KM,
    FILTER_ALL,
    FILTER_INTER,
    FILTER_INTRA,
    FILTERS,
    DistanceBinSeries,
    bin_citations_by_distance,
    read_bin_series_csv,
    write_bin_series_csv,
)
from .decay import ExpDecayFit, ExponentialDecayModel, fit_exp_decay, write_fit_json
from .clustering import (
    DEFAULT_EPS_KM,
    DEFAULT_MIN_PTS,
    NOISE,
    ClusterAssignment,
    GeoDBSCAN,
    dbscan_cluster,
    write_clusters_csv,
)

__all__ = [
    "EARTH_RADIUS_KM",
    "WEIGHT_EPSILON",
    "GeoPoint",
    "GreatCircleProvider",
    "haversine_distance",
    "max_pairwise_distance",
    "relative_weight",
    "DEFAULT_BIN_WIDTH_KM",
    "FILTER_ALL",
    "FILTER_INTER",
    "FILTER_INTRA",
    "FILTERS",
    "DistanceBinSeries",
    "bin_citations_by_distance",
    "read_bin_series_csv",
    "write_bin_series_csv",
    "ExpDecayFit",
    "ExponentialDecayModel",
    "fit_exp_decay",
    "write_fit_json",
    "DEFAULT_EPS_KM",
    "DEFAULT_MIN_PTS",
    "NOISE",
    "ClusterAssignment",
    "GeoDBSCAN",
    "dbscan_cluster",
    "write_clusters_csv",
]
