"""Artifact-directory pipeline: ingest -> geo -> hon -> rank -> report.

Every stage reads files written by earlier stages and writes its own under
the run directory, so a run can be resumed from any intermediate point and
two runs with the same inputs, config and seed produce byte-identical
rankings. The effective configuration and a manifest with input digests
are persisted next to the artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import platform
import sys
from dataclasses import dataclass, fields, asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .errors import DataError
from .corpus.geocode import CoordinateCache, HttpGeocoder, NullGeocoder, resolve_coordinates
from .corpus.graph import (
    STRATEGIES,
    build_citation_graph,
    institution_statistics,
    read_graph_csv,
    read_nodes_txt,
    write_graph_csv,
    write_nodes_txt,
)
from .corpus.parse import parse_corpus, serialize_corpus
from .corpus.records import CitationGraph
from .geo.binning import FILTERS, bin_citations_by_distance, read_bin_series_csv, write_bin_series_csv
from .geo.clustering import dbscan_cluster, write_clusters_csv
from .geo.decay import MIN_POINTS, fit_exp_decay, write_fit_json
from .geo.distance import GeoPoint, WEIGHT_EPSILON
from .hon.estimator import HigherOrderNetwork
from .hon.matrix import first_order_matrix, load_matrix, save_matrix
from .hon.rewire import write_hon_edges_csv
from .rank.classical import ClassicalPageRank
from .rank.compare import (
    compare_rankings,
    self_citation_weight_report,
    write_paired_series_csv,
    write_self_citation_csv,
    write_tie_report_json,
)
from .rank.quantum import QuantumPageRank

log = logging.getLogger(__name__)

STAGES = ("ingest", "geo", "hon", "rank", "report")


@dataclass
class PipelineConfig:
    """Flat key/value run configuration (TOML file, CLI flags override)."""

    papers: str = ""
    coords: str = ""
    out_dir: str = "citewalk-run"
    geocode_endpoint: str = ""
    strategy: str = "first"
    epsilon: float = WEIGHT_EPSILON
    bin_width_km: float = 100.0
    fit: bool = True
    fit_filter: str = "all"
    dbscan_eps_km: float = 50.0
    dbscan_min_pts: int = 5
    order: int = 3
    walks_per_node: int = 100
    max_len: int = 10
    min_support: float = 50.0
    alpha: float = 0.85
    seed: int = 42
    steps: int = 64
    pr_tol: float = 1e-12
    pr_max_iter: int = 10000
    tie_tol: float = 1e-12
    top_k: int = 0
    node_cap: int = 2000
    emit_series: bool = True

    def validate(self) -> None:
        if self.strategy not in STRATEGIES:
            raise DataError(f"unknown strategy {self.strategy!r}")
        if self.fit_filter not in FILTERS:
            raise DataError(f"unknown fit filter {self.fit_filter!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise DataError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.order < 1:
            raise DataError(f"order must be >= 1, got {self.order}")
        if self.top_k < 0:
            raise DataError(f"top_k must be >= 0, got {self.top_k}")

    @classmethod
    def from_toml(cls, path) -> "PipelineConfig":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        return cls().with_overrides(data)

    def with_overrides(self, overrides: dict) -> "PipelineConfig":
        known = {f.name: f for f in fields(self)}
        values = asdict(self)
        for key, value in overrides.items():
            if key not in known:
                raise DataError(f"unknown configuration key {key!r}")
            values[key] = _coerce(value, type(values[key]), key)
        return PipelineConfig(**values)

    def to_toml(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for f in fields(self):
                value = getattr(self, f.name)
                if isinstance(value, bool):
                    rendered = "true" if value else "false"
                elif isinstance(value, str):
                    rendered = json.dumps(value)
                else:
                    rendered = repr(value)
                fh.write(f"{f.name} = {rendered}\n")

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()


def _coerce(value, target_type, key):
    if target_type is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise DataError(f"expected true/false for {key!r}, got {value!r}")
    if target_type is int:
        try:
            as_float = float(value)
        except (TypeError, ValueError):
            raise DataError(f"expected an integer for {key!r}, got {value!r}") from None
        if as_float != int(as_float):
            raise DataError(f"expected an integer for {key!r}, got {value!r}")
        return int(as_float)
    if target_type is float:
        try:
            return float(value)
        except (TypeError, ValueError):
            raise DataError(f"expected a number for {key!r}, got {value!r}") from None
    return str(value)


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


# Files each stage must have produced for a resume to skip it.
STAGE_OUTPUTS = {
    "ingest": (
        "ingest/corpus.jsonl",
        "ingest/graph.csv",
        "ingest/nodes.txt",
        "ingest/parse_stats.json",
        "ingest/resolution.json",
        "ingest/institution_stats.csv",
    ),
    "geo": ("geo/distance_bins.csv", "geo/geo_summary.json", "geo/clusters.csv"),
    "hon": ("hon/matrix.npz", "hon/hon_edges.csv", "hon/hon_summary.json"),
    "rank": (
        "rank/rankings.csv",
        "rank/rank_summary.json",
        "rank/tie_report.json",
        "rank/self_citation_report.csv",
    ),
    "report": ("report/summary.txt",),
}


@dataclass
class PipelineResult:
    out_dir: Path
    manifest: dict

    def path(self, relative: str) -> Path:
        return self.out_dir / relative


def run_pipeline(config: PipelineConfig, resume: bool = False) -> PipelineResult:
    """Run all stages, or only the ones whose outputs are missing (resume)."""
    config.validate()
    if not config.papers:
        raise DataError("configuration needs a papers file")
    papers_path = Path(config.papers)
    if not papers_path.exists():
        raise DataError(f"papers file not found: {papers_path}")
    coords_path = Path(config.coords) if config.coords else None
    if config.coords and not Path(config.coords).exists():
        raise DataError(f"coordinate file not found: {config.coords}")

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config.to_toml(out / "effective_config.toml")

    manifest_path = out / "run_manifest.json"
    manifest = {
        "package_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "seed": config.seed,
        "config_digest": config.digest(),
        "inputs": {
            "papers": _sha256_file(papers_path),
            "coords": _sha256_file(coords_path) if coords_path else None,
        },
        "stages": {},
        "started_at": datetime.now(timezone.utc).isoformat(),
    }
    if resume and manifest_path.exists():
        try:
            previous = json.loads(manifest_path.read_text())
        except json.JSONDecodeError:
            previous = {}
        if previous.get("config_digest") == manifest["config_digest"] and previous.get(
            "inputs"
        ) == manifest["inputs"]:
            manifest["stages"] = previous.get("stages", {})
        else:
            log.warning("config or inputs changed; ignoring previous run state")

    runners = {
        "ingest": _stage_ingest,
        "geo": _stage_geo,
        "hon": _stage_hon,
        "rank": _stage_rank,
        "report": _stage_report,
    }
    for stage in STAGES:
        if resume and manifest["stages"].get(stage, {}).get("status") == "done":
            if all((out / rel).exists() for rel in STAGE_OUTPUTS[stage]):
                log.info("stage %s: outputs present, skipping", stage)
                continue
            log.info("stage %s: marked done but outputs missing, re-running", stage)
        (out / stage).mkdir(exist_ok=True)
        log.info("stage %s: running", stage)
        try:
            runners[stage](config, out)
        except Exception as exc:
            manifest["stages"][stage] = {"status": "failed", "error": str(exc)}
            manifest["finished_at"] = datetime.now(timezone.utc).isoformat()
            manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
            raise
        manifest["stages"][stage] = {"status": "done"}
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    manifest["finished_at"] = datetime.now(timezone.utc).isoformat()
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return PipelineResult(out, manifest)


def _stage_ingest(config: PipelineConfig, out: Path) -> None:
    corpus, stats = parse_corpus(config.papers)
    if corpus.n_papers == 0:
        raise DataError(f"no valid records in {config.papers}")
    cache = CoordinateCache(config.coords) if config.coords else None
    geocoder = (
        HttpGeocoder(config.geocode_endpoint) if config.geocode_endpoint else NullGeocoder()
    )
    corpus, resolution = resolve_coordinates(corpus, geocoder, cache)
    graph = build_citation_graph(corpus, strategy=config.strategy, epsilon=config.epsilon)

    serialize_corpus(corpus, out / "ingest" / "corpus.jsonl")
    write_graph_csv(graph, out / "ingest" / "graph.csv")
    write_nodes_txt(graph, out / "ingest" / "nodes.txt")
    (out / "ingest" / "parse_stats.json").write_text(
        json.dumps(stats.to_json_dict(), indent=2, sort_keys=True) + "\n"
    )
    (out / "ingest" / "resolution.json").write_text(
        json.dumps(resolution.to_json_dict(), indent=2, sort_keys=True) + "\n"
    )
    with open(out / "ingest" / "institution_stats.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["institution_id", "name", "latitude", "longitude", "country", "papers", "citations_received"]
        )
        for row in institution_statistics(corpus, graph):
            writer.writerow(
                [
                    row["institution_id"],
                    row["name"],
                    "" if row["latitude"] is None else repr(row["latitude"]),
                    "" if row["longitude"] is None else repr(row["longitude"]),
                    row["country"] or "",
                    row["papers"],
                    row["citations_received"],
                ]
            )


def _load_ingest_graph(config: PipelineConfig, out: Path) -> CitationGraph:
    nodes = read_nodes_txt(out / "ingest" / "nodes.txt")
    return read_graph_csv(out / "ingest" / "graph.csv", nodes=nodes)


def _read_institution_points(out: Path) -> list[tuple[str, GeoPoint]]:
    points = []
    with open(out / "ingest" / "institution_stats.csv", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["latitude"] and row["longitude"]:
                points.append(
                    (row["institution_id"], GeoPoint(float(row["latitude"]), float(row["longitude"])))
                )
    return points


def _stage_geo(config: PipelineConfig, out: Path) -> None:
    graph = _load_ingest_graph(config, out)
    series = [
        bin_citations_by_distance(graph, config.bin_width_km, tag) for tag in FILTERS
    ]
    write_bin_series_csv(out / "geo" / "distance_bins.csv", series)

    summary: dict = {"bins": {s.filter_tag: {"total": s.total, "n_bins": s.n_bins} for s in series}}
    if config.fit:
        target = next(s for s in series if s.filter_tag == config.fit_filter)
        populated = int((target.counts > 0).sum()) if target.n_bins else 0
        if populated < MIN_POINTS:
            # A corpus without coordinates has nothing to fit; note it and
            # keep the run alive rather than failing the whole pipeline.
            log.warning(
                "decay fit skipped: %d populated bins under filter %r",
                populated,
                config.fit_filter,
            )
            summary["fit"] = {"skipped": f"only {populated} populated bins"}
        else:
            fit = fit_exp_decay(target)
            write_fit_json(out / "geo" / "decay_fit.json", fit)
            summary["fit"] = fit.to_json_dict()

    points = _read_institution_points(out)
    assignment = dbscan_cluster(points, config.dbscan_eps_km, config.dbscan_min_pts)
    write_clusters_csv(out / "geo" / "clusters.csv", assignment)
    summary["clusters"] = {
        "n_clusters": assignment.n_clusters,
        "n_noise": assignment.n_noise,
        "n_points": len(points),
        "eps_km": config.dbscan_eps_km,
        "min_pts": config.dbscan_min_pts,
    }
    (out / "geo" / "geo_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )


def extract_top_k(graph: CitationGraph, k: int) -> CitationGraph:
    """Induced subgraph on the k most-cited papers (ties broken by id)."""
    if k <= 0 or k >= len(graph.nodes):
        return graph
    received: dict[str, int] = {node: 0 for node in graph.nodes}
    for e in graph.edges:
        received[e.cited] += 1
    keep = set(sorted(graph.nodes, key=lambda n: (-received[n], n))[:k])
    edges = tuple(e for e in graph.edges if e.citing in keep and e.cited in keep)
    return CitationGraph(nodes=tuple(sorted(keep)), edges=edges, max_distance_km=graph.max_distance_km)


def _stage_hon(config: PipelineConfig, out: Path) -> None:
    graph = extract_top_k(_load_ingest_graph(config, out), config.top_k)
    builder = HigherOrderNetwork(
        order=config.order,
        walks_per_node=config.walks_per_node,
        max_len=config.max_len,
        min_support=config.min_support,
        alpha=config.alpha,
        seed=config.seed,
    ).fit(graph)
    save_matrix(out / "hon" / "matrix.npz", builder.matrix_)
    write_hon_edges_csv(builder.graph_, out / "hon" / "hon_edges.csv")
    summary = {
        "n_chains": builder.n_chains_,
        "n_nodes": builder.graph_.n_nodes,
        "n_conditioned": builder.graph_.n_conditioned,
        "detected": sorted(n.label for n in builder.nodes_),
        "order": config.order,
        "min_support": config.min_support,
        "graph_nodes": len(graph.nodes),
        "graph_edges": graph.n_edges,
        "top_k": config.top_k,
    }
    (out / "hon" / "hon_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )


def _rank_positions(scores: dict[str, float]) -> dict[str, int]:
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return {pid: pos for pos, (pid, _) in enumerate(ordered, start=1)}


def _stage_rank(config: PipelineConfig, out: Path) -> None:
    graph = extract_top_k(_load_ingest_graph(config, out), config.top_k)
    hon_matrix = load_matrix(out / "hon" / "matrix.npz")
    if tuple(hon_matrix.base_labels) != tuple(graph.nodes):
        raise DataError(
            "conditioned matrix does not cover the ingest graph; "
            "re-run the hon stage after changing top_k or inputs"
        )

    plain = first_order_matrix(graph, config.alpha, weighted=False)
    weighted = first_order_matrix(graph, config.alpha, weighted=True)

    classical = ClassicalPageRank(tol=config.pr_tol, max_iter=config.pr_max_iter).fit(plain)
    quantum_plain = QuantumPageRank(steps=config.steps, node_cap=config.node_cap).fit(plain)
    quantum_hon = QuantumPageRank(steps=config.steps, node_cap=config.node_cap).fit(hon_matrix)

    papers = list(graph.nodes)
    classical_scores = {p: float(s) for p, s in zip(papers, classical.scores_)}
    quantum_scores = {p: float(s) for p, s in zip(papers, quantum_plain.scores_)}
    hon_scores = {p: float(s) for p, s in zip(hon_matrix.base_labels, quantum_hon.scores_)}

    classical_rank = _rank_positions(classical_scores)
    quantum_rank = _rank_positions(quantum_scores)
    hon_rank = _rank_positions(hon_scores)

    with open(out / "rank" / "rankings.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "paper_id",
                "classical_pr",
                "quantum_pr",
                "hon_weighted_quantum_pr",
                "classical_rank",
                "quantum_rank",
                "hon_quantum_rank",
                "rank_delta",
            ]
        )
        for pid in papers:
            writer.writerow(
                [
                    pid,
                    repr(classical_scores[pid]),
                    repr(quantum_scores[pid]),
                    repr(hon_scores[pid]),
                    classical_rank[pid],
                    quantum_rank[pid],
                    hon_rank[pid],
                    classical_rank[pid] - hon_rank[pid],
                ]
            )

    if config.emit_series:
        with open(out / "rank" / "series_hon.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "m", "P_im"])
            for i, label in enumerate(hon_matrix.labels):
                for m in range(quantum_hon.series_.shape[0]):
                    writer.writerow([label, m, repr(float(quantum_hon.series_[m, i]))])

    ties_cq = compare_rankings(classical_scores, quantum_scores, config.tie_tol)
    ties_qh = compare_rankings(quantum_scores, hon_scores, config.tie_tol)
    write_tie_report_json(
        out / "rank" / "tie_report.json",
        {"classical_vs_quantum": ties_cq, "quantum_vs_hon_quantum": ties_qh},
    )
    write_paired_series_csv(
        out / "rank" / "pairs_classical_vs_quantum.csv", ties_cq, "classical_pr", "quantum_pr"
    )
    write_paired_series_csv(
        out / "rank" / "pairs_quantum_vs_hon.csv", ties_qh, "quantum_pr", "hon_weighted_quantum_pr"
    )

    self_rows = self_citation_weight_report(weighted, hon_matrix, graph.self_citation_edges())
    write_self_citation_csv(out / "rank" / "self_citation_report.csv", self_rows)

    summary = {
        "classical_iterations": classical.n_iter_,
        "quantum_tail_gap": quantum_plain.tail_gap_,
        "quantum_tail_converged": quantum_plain.tail_converged_,
        "quantum_renorms": quantum_plain.renorm_count_,
        "hon_tail_gap": quantum_hon.tail_gap_,
        "hon_tail_converged": quantum_hon.tail_converged_,
        "hon_renorms": quantum_hon.renorm_count_,
        "steps": config.steps,
        "n_tie_groups_classical_vs_quantum": len(ties_cq.groups),
        "n_tie_groups_quantum_vs_hon": len(ties_qh.groups),
        "n_self_citation_rows": len(self_rows),
    }
    (out / "rank" / "rank_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )


def _stage_report(config: PipelineConfig, out: Path) -> None:
    text = render_report(out, top_k=10)
    (out / "report" / "summary.txt").write_text(text)


def render_report(out_dir, top_k: int = 10) -> str:
    """Human-readable run summary assembled from stage artifacts."""
    out = Path(out_dir)
    if not (out / "ingest" / "parse_stats.json").exists():
        raise DataError(f"ingest artifacts missing under {out}")
    lines: list[str] = []

    stats = json.loads((out / "ingest" / "parse_stats.json").read_text())
    resolution = json.loads((out / "ingest" / "resolution.json").read_text())
    lines.append("== corpus ==")
    lines.append(f"papers: {stats['papers']}")
    lines.append(f"citations kept: {stats['edges_after_cleaning']}")
    lines.append(
        "dropped: "
        f"{stats['self_loops_dropped']} self-loops, "
        f"{stats['duplicate_citations_dropped']} duplicates, "
        f"{stats['dangling_dropped']} dangling, "
        f"{stats['malformed_lines']} malformed lines"
    )
    lines.append(
        f"institutions resolved: {resolution['resolved']}/"
        f"{resolution['resolved'] + resolution['unresolved']} "
        f"(rate {resolution['resolution_rate']:.3f})"
    )
    lines.append("")

    geo_summary_path = out / "geo" / "geo_summary.json"
    if geo_summary_path.exists():
        geo = json.loads(geo_summary_path.read_text())
        lines.append("== geo ==")
        for tag, info in sorted(geo.get("bins", {}).items()):
            lines.append(f"bins[{tag}]: {info['total']} citations over {info['n_bins']} bins")
        fit = geo.get("fit")
        if fit and "skipped" not in fit:
            lines.append(
                f"decay fit: y0={fit['y0']:.4g} A1={fit['A1']:.4g} t1={fit['t1']:.4g} km "
                f"(converged: {fit['converged']})"
            )
        elif fit:
            lines.append(f"decay fit skipped: {fit['skipped']}")
        clusters = geo.get("clusters", {})
        lines.append(
            f"clusters: {clusters.get('n_clusters', 0)} "
            f"(noise points: {clusters.get('n_noise', 0)} of {clusters.get('n_points', 0)})"
        )
        lines.append("")

    hon_summary_path = out / "hon" / "hon_summary.json"
    if hon_summary_path.exists():
        hon = json.loads(hon_summary_path.read_text())
        lines.append("== hon ==")
        lines.append(f"chains sampled: {hon['n_chains']}")
        lines.append(
            f"matrix nodes: {hon['n_nodes']} ({hon['n_conditioned']} conditioned, "
            f"order {hon['order']}, min support {hon['min_support']})"
        )
        lines.append("")

    rank_summary_path = out / "rank" / "rank_summary.json"
    rankings_path = out / "rank" / "rankings.csv"
    if not rank_summary_path.exists() or not rankings_path.exists():
        raise DataError("rank artifacts missing; run the rank stage first")
    rank_summary = json.loads(rank_summary_path.read_text())
    lines.append("== rank ==")
    lines.append(
        f"quantum steps: {rank_summary['steps']} "
        f"(tail gap {rank_summary['hon_tail_gap']:.2e}, "
        f"converged: {rank_summary['hon_tail_converged']}, "
        f"renormalizations: {rank_summary['hon_renorms']})"
    )
    lines.append(f"classical iterations: {rank_summary['classical_iterations']}")
    lines.append(
        "tie groups: "
        f"{rank_summary['n_tie_groups_classical_vs_quantum']} classical-vs-quantum, "
        f"{rank_summary['n_tie_groups_quantum_vs_hon']} quantum-vs-conditioned"
    )
    rows = list(csv.DictReader(open(rankings_path, newline="", encoding="utf-8")))
    rows.sort(key=lambda r: int(r["hon_quantum_rank"]))
    lines.append(f"top {min(top_k, len(rows))} papers by conditioned quantum score:")
    lines.append("  rank  paper_id  hon_weighted_quantum_pr  classical_rank  delta")
    for row in rows[:top_k]:
        lines.append(
            f"  {row['hon_quantum_rank']:>4}  {row['paper_id']}  "
            f"{float(row['hon_weighted_quantum_pr']):.6e}  "
            f"{row['classical_rank']:>4}  {row['rank_delta']}"
        )
    lines.append("")
    return "\n".join(lines) + "\n"
