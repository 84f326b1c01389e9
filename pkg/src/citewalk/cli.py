"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 bad or missing data, 3 numeric
failure (non-convergence). Subcommands mirror the pipeline stages so any
stage can be run standalone on existing artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .errors import DataError, NumericError
from .corpus.geocode import CacheEntry, CoordinateCache, HttpGeocoder, NullGeocoder, resolve_coordinates
from .corpus.graph import (
    STRATEGIES,
    STRATEGY_FIRST,
    build_citation_graph,
    institution_statistics,
    read_graph_csv,
    read_nodes_txt,
    write_graph_csv,
    write_nodes_txt,
)
from .corpus.parse import parse_corpus, serialize_corpus
from .corpus.synth import synth_corpus
from .geo.binning import FILTER_ALL, FILTERS, bin_citations_by_distance, write_bin_series_csv
from .geo.clustering import DEFAULT_EPS_KM, DEFAULT_MIN_PTS, dbscan_cluster, write_clusters_csv
from .geo.decay import fit_exp_decay, write_fit_json
from .geo.distance import GeoPoint, WEIGHT_EPSILON
from .hon.detect import DEFAULT_MIN_SUPPORT, DEFAULT_ORDER
from .hon.estimator import HigherOrderNetwork
from .hon.matrix import DEFAULT_ALPHA, first_order_matrix, load_matrix, redamp, save_matrix
from .hon.rewire import write_hon_edges_csv
from .pipeline import PipelineConfig, extract_top_k, render_report, run_pipeline
from .rank.classical import DEFAULT_MAX_ITER, DEFAULT_TOL, ClassicalPageRank
from .rank.compare import DEFAULT_TIE_TOL, compare_rankings, write_tie_report_json
from .rank.quantum import DEFAULT_NODE_CAP, DEFAULT_STEPS, QuantumPageRank

log = logging.getLogger("citewalk")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; that code is reserved for
    # data errors here, so route usage problems through an exception.
    def error(self, message):
        raise UsageError(message)


def _load_graph(graph_path, nodes_path=None):
    nodes = read_nodes_txt(nodes_path) if nodes_path else None
    return read_graph_csv(graph_path, nodes=nodes)


def _cmd_ingest(args) -> int:
    corpus, stats = parse_corpus(args.papers)
    if corpus.n_papers == 0:
        raise DataError(f"no valid records in {args.papers}")
    cache = CoordinateCache(args.coords) if args.coords else None
    geocoder = HttpGeocoder(args.geocode_endpoint) if args.geocode_endpoint else NullGeocoder()
    corpus, resolution = resolve_coordinates(corpus, geocoder, cache)
    graph = build_citation_graph(corpus, strategy=args.strategy, epsilon=args.epsilon)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    serialize_corpus(corpus, out / "corpus.jsonl")
    write_graph_csv(graph, out / "graph.csv")
    write_nodes_txt(graph, out / "nodes.txt")
    (out / "parse_stats.json").write_text(
        json.dumps(stats.to_json_dict(), indent=2, sort_keys=True) + "\n"
    )
    (out / "resolution.json").write_text(
        json.dumps(resolution.to_json_dict(), indent=2, sort_keys=True) + "\n"
    )
    print(
        f"{corpus.n_papers} papers, {graph.n_edges} citation edges "
        f"({stats.malformed_lines} malformed lines, "
        f"resolution rate {resolution.resolution_rate:.3f})"
    )
    return 0


def _cmd_geo_analyze(args) -> int:
    graph = _load_graph(args.graph, args.nodes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    tags = FILTERS if args.filter == "each" else (args.filter,)
    series = [bin_citations_by_distance(graph, args.bin_width, t) for t in tags]
    write_bin_series_csv(out / "distance_bins.csv", series)
    for s in series:
        print(f"bins[{s.filter_tag}]: {s.total} citations over {s.n_bins} bins")

    if args.fit:
        target = next((s for s in series if s.filter_tag == args.fit_filter), None)
        if target is None:
            raise DataError(
                f"fit filter {args.fit_filter!r} not among computed filters {tags}"
            )
        fit = fit_exp_decay(target)
        write_fit_json(out / "decay_fit.json", fit)
        print(
            f"fit[{args.fit_filter}]: y0={fit.y0:.6g} A1={fit.a1:.6g} "
            f"t1={fit.t1:.6g} km (converged: {fit.converged}, {fit.n_iter} iterations)"
        )

    if args.coords:
        points = []
        cache = CoordinateCache(args.coords)
        for inst_id in sorted(cache.entries):
            entry = cache.entries[inst_id]
            if entry.location is not None:
                points.append((inst_id, entry.location))
        assignment = dbscan_cluster(points, args.dbscan_eps, args.dbscan_min_pts)
        write_clusters_csv(out / "clusters.csv", assignment)
        print(
            f"clusters: {assignment.n_clusters} "
            f"({assignment.n_noise} noise points of {len(points)})"
        )
    return 0


def _cmd_hon_build(args) -> int:
    graph = extract_top_k(_load_graph(args.graph, args.nodes), args.top_k)
    builder = HigherOrderNetwork(
        order=args.order,
        walks_per_node=args.walks,
        max_len=args.max_len,
        min_support=args.min_support,
        alpha=args.alpha,
        seed=args.seed,
    ).fit(graph)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(out / "matrix.npz", builder.matrix_)
    write_hon_edges_csv(builder.graph_, out / "hon_edges.csv")
    print(
        f"{builder.n_chains_} chains -> {builder.graph_.n_nodes} nodes "
        f"({builder.graph_.n_conditioned} conditioned)"
    )
    return 0


def _cmd_rank(args) -> int:
    matrix = load_matrix(args.matrix)
    if args.alpha is not None:
        matrix = redamp(matrix, args.alpha)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    classical = ClassicalPageRank(tol=args.pr_tol, max_iter=args.pr_max_iter).fit(matrix)
    quantum = QuantumPageRank(steps=args.steps, node_cap=args.node_cap).fit(matrix)

    scores = {
        label: (float(c), float(q))
        for label, c, q in zip(
            matrix.base_labels,
            classical.base_scores_ if hasattr(classical, "base_scores_") else classical.scores_,
            quantum.scores_,
        )
    }
    with open(out / "scores.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["paper_id", "classical_pr", "quantum_pr"])
        for label in matrix.base_labels:
            c, q = scores[label]
            writer.writerow([label, repr(c), repr(q)])
    if args.emit_series:
        with open(out / "series.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "m", "P_im"])
            for i, label in enumerate(matrix.labels):
                for m in range(quantum.series_.shape[0]):
                    writer.writerow([label, m, repr(float(quantum.series_[m, i]))])
    report = compare_rankings(
        {k: v[0] for k, v in scores.items()},
        {k: v[1] for k, v in scores.items()},
        args.tie_tol,
    )
    write_tie_report_json(out / "tie_report.json", {"classical_vs_quantum": report})
    print(
        f"ranked {len(matrix.base_labels)} papers "
        f"(classical in {classical.n_iter_} iterations, "
        f"quantum tail gap {quantum.tail_gap_:.2e}, "
        f"{len(report.groups)} classical tie groups)"
    )
    return 0


def _read_score_csv(path, column):
    scores = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise DataError(f"{path}: no column {column!r}")
        id_col = reader.fieldnames[0]
        for row in reader:
            scores[row[id_col]] = float(row[column])
    return scores


def _cmd_compare(args) -> int:
    scores_a = _read_score_csv(args.a, args.col_a)
    scores_b = _read_score_csv(args.b, args.col_b)
    if set(scores_a) != set(scores_b):
        raise DataError("the two score files must cover the same papers")
    report = compare_rankings(scores_a, scores_b, args.tie_tol)
    write_tie_report_json(args.out, {f"{args.col_a}_vs_{args.col_b}": report})
    print(f"{len(report.groups)} tie groups ({report.n_tied} papers tied) -> {args.out}")
    return 0


def _cmd_report(args) -> int:
    sys.stdout.write(render_report(args.artifact_dir, top_k=args.top))
    return 0


def _cmd_synth(args) -> int:
    corpus = synth_corpus(
        n_papers=args.n_papers,
        n_institutions=args.n_institutions,
        y0=args.y0,
        a1=args.a1,
        t1_km=args.t1,
        scale=args.scale,
        seed=args.seed,
    )
    serialize_corpus(corpus, args.papers_out)
    cache = CoordinateCache(args.coords_out)
    for inst_id in sorted(corpus.institutions):
        inst = corpus.institutions[inst_id]
        cache.put(inst_id, CacheEntry(name=inst.name, location=inst.location, country=inst.country))
    cache.save()
    print(
        f"wrote {corpus.n_papers} papers / {corpus.n_citations} citations to "
        f"{args.papers_out}, {len(corpus.institutions)} institutions to {args.coords_out}"
    )
    return 0


def _cmd_pipeline(args) -> int:
    config = PipelineConfig.from_toml(args.config) if args.config else PipelineConfig()
    overrides = {}
    for flag in ("papers", "coords", "out_dir", "seed", "order", "alpha", "steps", "top_k"):
        value = getattr(args, flag)
        if value is not None:
            overrides[flag] = value
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    config = config.with_overrides(overrides)
    result = run_pipeline(config, resume=args.resume)
    print(f"pipeline finished -> {result.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="citewalk", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse papers, resolve coordinates, build the citation graph")
    p.add_argument("--papers", required=True, help="JSON-lines paper records")
    p.add_argument("--coords", default="", help="institution coordinate cache CSV")
    p.add_argument("--geocode-endpoint", default="", help="HTTP geocoder URL (off by default)")
    p.add_argument("--strategy", choices=STRATEGIES, default=STRATEGY_FIRST)
    p.add_argument("--epsilon", type=float, default=WEIGHT_EPSILON)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("geo-analyze", help="distance bins, decay fit, institution clusters")
    p.add_argument("--graph", required=True, help="citation graph CSV from ingest")
    p.add_argument("--nodes", default="", help="node list (keeps isolated papers)")
    p.add_argument("--coords", default="", help="coordinate CSV for clustering")
    p.add_argument("--bin-width", type=float, default=100.0)
    p.add_argument("--filter", choices=FILTERS + ("each",), default="each")
    p.add_argument("--fit", action="store_true", help="fit the exponential decay model")
    p.add_argument("--fit-filter", choices=FILTERS, default=FILTER_ALL)
    p.add_argument("--dbscan-eps", type=float, default=DEFAULT_EPS_KM)
    p.add_argument("--dbscan-min-pts", type=int, default=DEFAULT_MIN_PTS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_geo_analyze)

    p = sub.add_parser("hon-build", help="sample chains, detect conditioned nodes, build the transition matrix")
    p.add_argument("--graph", required=True)
    p.add_argument("--nodes", default="")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--walks", type=int, default=100)
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument("--min-support", type=float, default=DEFAULT_MIN_SUPPORT)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--top-k", type=int, default=0, help="restrict to the k most-cited papers first")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_hon_build)

    p = sub.add_parser("rank", help="classical and quantum rankings from a saved matrix")
    p.add_argument("--matrix", required=True, help="matrix.npz from hon-build")
    p.add_argument("--alpha", type=float, default=None, help="re-damp the stored link structure")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    p.add_argument("--pr-tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--pr-max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--tie-tol", type=float, default=DEFAULT_TIE_TOL)
    p.add_argument("--emit-series", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("compare", help="tie analysis between two score files")
    p.add_argument("--a", required=True, help="first score CSV")
    p.add_argument("--b", required=True, help="second score CSV")
    p.add_argument("--col-a", default="classical_pr")
    p.add_argument("--col-b", default="quantum_pr")
    p.add_argument("--tie-tol", type=float, default=DEFAULT_TIE_TOL)
    p.add_argument("--out", required=True, help="tie report JSON path")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("report", help="print a run summary from a pipeline artifact directory")
    p.add_argument("artifact_dir")
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic corpus with a known decay profile")
    p.add_argument("--papers-out", required=True)
    p.add_argument("--coords-out", required=True)
    p.add_argument("--n-papers", type=int, default=500)
    p.add_argument("--n-institutions", type=int, default=50)
    p.add_argument("--y0", type=float, default=2.0)
    p.add_argument("--a1", type=float, default=10.0)
    p.add_argument("--t1", type=float, default=3000.0)
    p.add_argument("--scale", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("pipeline", help="run ingest -> geo -> hon -> rank -> report")
    p.add_argument("--config", default="", help="TOML configuration file")
    p.add_argument("--papers")
    p.add_argument("--coords")
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--top-k", type=int)
    p.add_argument("--resume", action="store_true", help="skip stages whose outputs already exist")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"citewalk: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"citewalk: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"citewalk: numeric failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"citewalk: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"citewalk: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
