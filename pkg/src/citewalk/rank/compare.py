"""Ranking comparisons: tie groups, paired series, self-citation weights."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..corpus.records import CitationEdge
from ..hon.matrix import StochasticMatrix
from ..hon.rewire import parse_node_label

DEFAULT_TIE_TOL = 1e-12


@dataclass
class TieGroup:
    ids: tuple[str, ...]
    score_a: float
    spread_b: float

    def to_json_dict(self) -> dict:
        return {"ids": list(self.ids), "score_a": self.score_a, "spread_b": self.spread_b}


@dataclass
class TieReport:
    """Groups of ids tied under ranking A, with their spread under ranking B."""

    groups: list[TieGroup]
    tie_tol: float
    pairs: list[tuple[str, float, float]] = field(default_factory=list)

    @property
    def n_tied(self) -> int:
        return sum(len(g.ids) for g in self.groups)

    def to_json_dict(self) -> dict:
        return {
            "tie_tol": self.tie_tol,
            "n_groups": len(self.groups),
            "n_tied_ids": self.n_tied,
            "groups": [g.to_json_dict() for g in self.groups],
        }


def compare_rankings(
    scores_a: Mapping[str, float],
    scores_b: Mapping[str, float],
    tie_tol: float = DEFAULT_TIE_TOL,
) -> TieReport:
    """Find score ties in A and measure how B separates each tied group.

    Ids whose A-scores sit within tie_tol of each other (chained through
    consecutive gaps) form one group; the report also carries the paired
    (id, score_a, score_b) series in descending A order for plotting.
    """
    if tie_tol <= 0:
        raise ValueError(f"tie_tol must be positive, got {tie_tol}")
    if set(scores_a) != set(scores_b):
        raise ValueError("the two rankings must cover the same ids")
    scores_a = {pid: float(v) for pid, v in scores_a.items()}
    scores_b = {pid: float(v) for pid, v in scores_b.items()}
    if not scores_a:
        return TieReport([], tie_tol)
    ordered = sorted(scores_a.items(), key=lambda kv: (kv[1], kv[0]))
    groups: list[TieGroup] = []
    block = [ordered[0]]
    for item in ordered[1:]:
        if abs(item[1] - block[-1][1]) < tie_tol:
            block.append(item)
            continue
        if len(block) > 1:
            groups.append(_close_group(block, scores_b))
        block = [item]
    if len(block) > 1:
        groups.append(_close_group(block, scores_b))
    pairs = [
        (pid, score, scores_b[pid])
        for pid, score in sorted(scores_a.items(), key=lambda kv: (-kv[1], kv[0]))
    ]
    return TieReport(groups, tie_tol, pairs)


def _close_group(block, scores_b) -> TieGroup:
    ids = tuple(sorted(pid for pid, _ in block))
    b_vals = [scores_b[pid] for pid in ids]
    return TieGroup(
        ids=ids,
        score_a=block[0][1],
        spread_b=max(b_vals) - min(b_vals),
    )


def write_tie_report_json(path, reports: Mapping[str, TieReport]) -> None:
    with open(path, "w") as fh:
        json.dump(
            {name: report.to_json_dict() for name, report in reports.items()},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def write_paired_series_csv(path, report: TieReport, col_a: str = "score_a", col_b: str = "score_b") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", col_a, col_b])
        for pid, a, b in report.pairs:
            writer.writerow([pid, repr(a), repr(b)])


@dataclass
class SelfCitationWeight:
    """Transition weight of one self-citation edge, per source variant."""

    citing: str
    cited: str
    source_variant: str
    first_order_weight: float
    higher_order_weight: float

    def to_row(self) -> list:
        return [
            self.citing,
            self.cited,
            self.source_variant,
            repr(self.first_order_weight),
            repr(self.higher_order_weight),
        ]


def self_citation_weight_report(
    first_order: StochasticMatrix,
    higher_order: StochasticMatrix,
    edges: Iterable[CitationEdge],
) -> list[SelfCitationWeight]:
    """Compare each self-citation's transition weight across the two matrices.

    For every self-citation edge u -> v the report lists one row per node
    variant of u in the conditioned matrix (the plain u included), with the
    matrix entry toward the variant of v that the walk actually routes to.
    A corpus without self-citations gives an empty report.
    """
    hon_keys = {parse_node_label(lbl): i for i, lbl in enumerate(higher_order.labels)}
    max_ctx = max((len(k[1]) for k in hon_keys), default=0)

    def _route(target: str, history: tuple[str, ...]) -> int | None:
        for length in range(min(len(history), max_ctx), 0, -1):
            idx = hon_keys.get((target, history[:length]))
            if idx is not None:
                return idx
        return hon_keys.get((target, ()))

    rows: list[SelfCitationWeight] = []
    for edge in edges:
        if not edge.self_citation:
            continue
        try:
            u_first = first_order.index_of(edge.citing)
            v_first = first_order.index_of(edge.cited)
        except KeyError:
            continue
        base_weight = float(first_order.matrix[v_first, u_first])
        for (base, context), j in sorted(hon_keys.items()):
            if base != edge.citing:
                continue
            target_idx = _route(edge.cited, (edge.citing,) + context)
            if target_idx is None:
                continue
            rows.append(
                SelfCitationWeight(
                    citing=edge.citing,
                    cited=edge.cited,
                    source_variant=higher_order.labels[j],
                    first_order_weight=base_weight,
                    higher_order_weight=float(higher_order.matrix[target_idx, j]),
                )
            )
    return rows


def write_self_citation_csv(path, rows: Iterable[SelfCitationWeight]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["citing", "cited", "source_variant", "first_order_weight", "higher_order_weight"]
        )
        for row in rows:
            writer.writerow(row.to_row())
