"""Distance binning, exponential decay fitting, and spatial clustering."""

import math

import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from citewalk.errors import DataError
from citewalk.corpus.records import CitationGraph
from citewalk.geo.binning import (
    FILTER_ALL,
    FILTER_INTER,
    FILTER_INTRA,
    DistanceBinSeries,
    bin_citations_by_distance,
    read_bin_series_csv,
    write_bin_series_csv,
)
from citewalk.geo.clustering import (
    NOISE,
    GeoDBSCAN,
    dbscan_cluster,
    write_clusters_csv,
)
from citewalk.geo.decay import ExponentialDecayModel, fit_exp_decay, write_fit_json
from citewalk.geo.distance import GeoPoint

from conftest import make_edge


def _graph(edges):
    nodes = tuple(sorted({e.citing for e in edges} | {e.cited for e in edges}))
    return CitationGraph(nodes=nodes, edges=tuple(edges), max_distance_km=None)


def test_binning_counts_by_hand():
    edges = [
        make_edge("a", "b", distance=0.0, citing_country="US", cited_country="US"),
        make_edge("a", "c", distance=99.9, citing_country="US", cited_country="US"),
        make_edge("b", "c", distance=100.0, citing_country="US", cited_country="FR"),
        make_edge("c", "d", distance=250.0, citing_country="FR", cited_country="US"),
        make_edge("d", "a", distance=250.0, citing_country="FR", cited_country=None),
        make_edge("d", "b", distance=None),  # unresolved, excluded everywhere
    ]
    series = bin_citations_by_distance(_graph(edges), 100.0, FILTER_ALL)
    # Bin edges are half-open: 100.0 lands in the second bin.
    assert series.counts.tolist() == [2, 1, 2]
    assert series.total == 5

    intra = bin_citations_by_distance(_graph(edges), 100.0, FILTER_INTRA)
    assert intra.counts.tolist() == [2]
    inter = bin_citations_by_distance(_graph(edges), 100.0, FILTER_INTER)
    # The edge with a missing country is excluded from both country filters.
    assert inter.counts.tolist() == [0, 1, 1]


def test_binning_empty_graph_gives_empty_series():
    graph = CitationGraph(nodes=("a",), edges=(), max_distance_km=None)
    series = bin_citations_by_distance(graph, 100.0, FILTER_ALL)
    assert series.n_bins == 0
    assert series.total == 0
    assert series.midpoints().size == 0


def test_binning_rejects_bad_width_and_filter():
    graph = _graph([make_edge("a", "b", distance=10.0)])
    with pytest.raises(ValueError):
        bin_citations_by_distance(graph, 0.0, FILTER_ALL)
    with pytest.raises(ValueError):
        bin_citations_by_distance(graph, 100.0, "nearby")


def test_bin_series_csv_round_trip(tmp_path):
    edges = [
        make_edge("a", "b", distance=42.0, citing_country="US", cited_country="US"),
        make_edge("b", "c", distance=4242.0, citing_country="US", cited_country="DE"),
    ]
    graph = _graph(edges)
    series = [bin_citations_by_distance(graph, 100.0, f) for f in (FILTER_ALL, FILTER_INTRA)]
    path = tmp_path / "bins.csv"
    write_bin_series_csv(path, series)
    loaded = read_bin_series_csv(path)
    assert set(loaded) == {FILTER_ALL, FILTER_INTRA}
    for s in series:
        assert loaded[s.filter_tag].counts.tolist() == s.counts.tolist()
        assert loaded[s.filter_tag].bin_width_km == s.bin_width_km


def test_midpoints_sit_at_bin_centres():
    series = DistanceBinSeries(bin_width_km=100.0, counts=np.array([1, 0, 3]), filter_tag=FILTER_ALL)
    assert series.midpoints().tolist() == [50.0, 150.0, 250.0]
    xs, ys = series.nonempty()
    assert xs.tolist() == [50.0, 250.0]
    assert ys.tolist() == [1, 3]


# -- decay fit ---------------------------------------------------------------

GEN = dict(y0=2.0, a1=10.0, t1=3000.0)


def _curve(x, y0=GEN["y0"], a1=GEN["a1"], t1=GEN["t1"]):
    return y0 + a1 * np.exp(-x / t1)


def test_fit_recovers_generating_parameters_noise_free():
    x = np.arange(100) * 100.0 + 50.0
    model = ExponentialDecayModel().fit(x, _curve(x))
    assert model.y0_ == pytest.approx(GEN["y0"], rel=1e-3)
    assert model.a1_ == pytest.approx(GEN["a1"], rel=1e-3)
    assert model.t1_ == pytest.approx(GEN["t1"], rel=1e-3)
    assert model.converged_
    assert model.residual_norm_ < 1e-9


def test_fit_tolerates_one_percent_multiplicative_noise():
    x = np.arange(100) * 100.0 + 50.0
    for seed in range(3):
        rng = np.random.default_rng(seed)
        y = _curve(x) * (1.0 + 0.01 * rng.standard_normal(x.size))
        model = ExponentialDecayModel().fit(x, y)
        assert model.y0_ == pytest.approx(GEN["y0"], rel=0.05)
        assert model.a1_ == pytest.approx(GEN["a1"], rel=0.05)
        assert model.t1_ == pytest.approx(GEN["t1"], rel=0.05)


def test_fit_constant_series_degenerates_to_offset():
    x = np.linspace(50.0, 5000.0, 40)
    model = ExponentialDecayModel().fit(x, np.full_like(x, 5.0))
    assert model.y0_ + model.a1_ * math.exp(-x[0] / model.t1_) == pytest.approx(5.0, abs=1e-6)
    assert abs(model.a1_) < 1e-3
    assert model.y0_ == pytest.approx(5.0, abs=1e-3)
    assert model.residual_norm_ < 1e-6


def test_fit_requires_four_populated_bins():
    series = DistanceBinSeries(
        bin_width_km=100.0, counts=np.array([5, 0, 3, 0, 2]), filter_tag=FILTER_ALL
    )
    with pytest.raises(DataError):
        fit_exp_decay(series)


def test_fit_on_binned_counts_recovers_scaled_profile():
    # Integer counts quantize the curve, so the tolerance is looser here.
    x = np.arange(120) * 100.0 + 50.0
    scale = 2000.0
    counts = np.round(scale * _curve(x)).astype(np.int64)
    series = DistanceBinSeries(bin_width_km=100.0, counts=counts, filter_tag=FILTER_ALL)
    fit = fit_exp_decay(series)
    assert fit.converged
    assert fit.y0 / scale == pytest.approx(GEN["y0"], rel=0.02)
    assert fit.a1 / scale == pytest.approx(GEN["a1"], rel=0.02)
    assert fit.t1 == pytest.approx(GEN["t1"], rel=0.02)


def test_fit_json_artifact_names_state(tmp_path):
    x = np.arange(50) * 100.0 + 50.0
    model = ExponentialDecayModel().fit(x, _curve(x))
    path = tmp_path / "fit.json"
    write_fit_json(path, model.fit_result_)
    import json

    payload = json.loads(path.read_text())
    assert set(payload) >= {"y0", "A1", "t1", "residual", "converged"}
    assert payload["converged"] is True


def test_predict_before_fit_raises():
    with pytest.raises(NotFittedError):
        ExponentialDecayModel().predict([1.0, 2.0])


def test_estimator_params_round_trip():
    model = ExponentialDecayModel(max_iter=77, rel_tol=1e-6)
    params = model.get_params()
    assert params == {"max_iter": 77, "rel_tol": 1e-6}
    clone = ExponentialDecayModel(**params)
    assert clone.get_params() == params


# -- clustering --------------------------------------------------------------


def _blob(lat, lon, n, spread_deg=0.02):
    # ~2 km jitter keeps every member inside a 50 km radius of the centre.
    return [
        GeoPoint(lat + spread_deg * math.sin(i), lon + spread_deg * math.cos(i))
        for i in range(n)
    ]


def test_two_blobs_and_a_stray_point():
    points = (
        [(f"a{i}", p) for i, p in enumerate(_blob(48.85, 2.35, 6))]
        + [(f"b{i}", p) for i, p in enumerate(_blob(40.71, -74.0, 7))]
        + [("stray", GeoPoint(-33.86, 151.2))]
    )
    assignment = dbscan_cluster(points, eps_km=50.0, min_pts=5)
    assert assignment.n_clusters == 2
    assert assignment.n_noise == 1
    assert assignment.labels["stray"] == NOISE
    parts = assignment.partition()
    sizes = sorted(len(members) for members in parts.values())
    assert sizes == [6, 7]


def test_eps_is_interpreted_in_kilometres():
    # Two points ~41 km apart: one cluster at eps 50, noise at eps 30.
    pair = [("x", GeoPoint(0.0, 0.0)), ("y", GeoPoint(0.0, 0.37))]
    merged = dbscan_cluster(pair, eps_km=50.0, min_pts=2)
    assert merged.n_clusters == 1 and merged.n_noise == 0
    split = dbscan_cluster(pair, eps_km=30.0, min_pts=2)
    assert split.n_clusters == 0 and split.n_noise == 2


def test_empty_input_clusters_to_nothing():
    assignment = dbscan_cluster([], eps_km=50.0, min_pts=5)
    assert assignment.n_clusters == 0
    assert assignment.labels == {}


def test_cluster_estimator_exposes_sklearn_labels():
    pts = [(p.latitude, p.longitude) for p in _blob(10.0, 10.0, 5)]
    est = GeoDBSCAN(eps_km=50.0, min_pts=3).fit(pts)
    assert len(est.labels_) == 5
    assert set(est.labels_) == {0}
    assert est.get_params()["eps_km"] == 50.0


def test_clusters_csv_lists_every_point(tmp_path):
    points = [(f"p{i}", p) for i, p in enumerate(_blob(48.0, 11.0, 5))]
    assignment = dbscan_cluster(points, eps_km=50.0, min_pts=3)
    path = tmp_path / "clusters.csv"
    write_clusters_csv(path, assignment)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 6  # header + one row per point
    assert lines[0].split(",")[0] == "institution_id"
