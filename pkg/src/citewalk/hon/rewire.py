"""Graph surgery that installs context-conditioned nodes.

The rewired graph keeps every first-order node. A conditioned node b|a
takes over the in-edges that reach b from a (or from a's own conditioned
variants) and carries the conditioned successor distribution out; edges
arriving at b from other predecessors keep targeting the first-order b.
Out-edges route to the deepest conditioned variant of the target that
matches the walk history, so path semantics survive the surgery.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

from ..corpus.records import CitationGraph
from ..errors import DataError
from .counts import ConditionalCounts
from .detect import HigherOrderNode

log = logging.getLogger(__name__)

# (base paper id, context of predecessors, most recent first)
NodeKey = tuple[str, tuple[str, ...]]


def node_label(key: NodeKey) -> str:
    base, context = key
    return base if not context else f"{base}|{','.join(context)}"


def parse_node_label(label: str) -> NodeKey:
    if "|" not in label:
        return (label, ())
    base, _, ctx = label.partition("|")
    return (base, tuple(ctx.split(",")))


@dataclass(frozen=True)
class HonEdge:
    target: NodeKey
    probability: float
    weight: float


class HigherOrderGraph:
    """First-order and conditioned nodes with per-node outgoing distributions.

    probability is the transition share before geographic weighting; per
    node the probabilities sum to 1 (dangling nodes have no out-edges).
    """

    def __init__(self, nodes: list[NodeKey], out: dict[NodeKey, list[HonEdge]]):
        self.nodes = sorted(nodes)
        self.out = out
        self._index = {key: i for i, key in enumerate(self.nodes)}
        if len(self._index) != len(self.nodes):
            raise ValueError("duplicate node keys")
        for key, edges in out.items():
            if key not in self._index:
                raise ValueError(f"out-edges for unknown node {key!r}")
            for e in edges:
                if e.target not in self._index:
                    raise ValueError(f"edge to unknown node {e.target!r}")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_conditioned(self) -> int:
        return sum(1 for _, ctx in self.nodes if ctx)

    def index(self, key: NodeKey) -> int:
        return self._index[key]

    def out_edges(self, key: NodeKey) -> list[HonEdge]:
        return self.out.get(key, [])

    def in_degree(self) -> dict[NodeKey, int]:
        deg = {key: 0 for key in self.nodes}
        for edges in self.out.values():
            for e in edges:
                deg[e.target] += 1
        return deg

    def labels(self) -> list[str]:
        return [node_label(k) for k in self.nodes]


def _closure_with_parents(
    hon_nodes: set[HigherOrderNode], counts: ConditionalCounts
) -> tuple[set[NodeKey], set[NodeKey]]:
    """Add the parent context of every deep node so nothing ends up orphaned.

    A node b|a1,a2 can only be entered from a1|a2; when detection kept the
    child but not that parent, the parent is added as a support node. Its
    counts exist by construction: every observation of (b | a1, a2) passed
    through (a1 | a2) first.
    """
    keys: set[NodeKey] = {(n.base, n.context) for n in hon_nodes}
    added: set[NodeKey] = set()
    frontier = [k for k in keys if len(k[1]) >= 2]
    while frontier:
        base, context = frontier.pop()
        parent: NodeKey = (context[0], context[1:])
        if parent in keys:
            continue
        if counts.support(*parent) == 0:
            raise DataError(
                f"conditioned node {node_label((base, context))} has no observed "
                f"entry path {node_label(parent)}"
            )
        keys.add(parent)
        added.add(parent)
        if len(parent[1]) >= 2:
            frontier.append(parent)
    return keys, added


def rewire(
    graph: CitationGraph,
    hon_nodes: set[HigherOrderNode],
    counts: ConditionalCounts | None = None,
    order: int | None = None,
) -> HigherOrderGraph:
    """Install conditioned nodes into the citation graph.

    With an empty node set the result is the first-order graph itself
    (uniform probability over each paper's references, geographic weight
    carried per edge). counts may be omitted only in that degenerate case.
    """
    if hon_nodes and counts is None:
        raise ValueError("counts are required to rewire conditioned nodes")
    counts = counts or ConditionalCounts()
    if order is None:
        order = max((n.order for n in hon_nodes), default=1)

    keys, added = _closure_with_parents(hon_nodes, counts)
    if added:
        log.info(
            "added %d support node(s) to keep conditioned paths reachable", len(added)
        )
    all_keys = [(n, ()) for n in graph.nodes] + sorted(keys)
    key_set = set(all_keys)
    if len(key_set) != len(all_keys):
        raise DataError("conditioned node collides with a first-order node")

    max_ctx = max((len(k[1]) for k in keys), default=0)

    def resolve(target_base: str, history: tuple[str, ...]) -> NodeKey:
        # Deepest conditioned variant of the target consistent with the
        # walk history wins; otherwise fall back to the first-order node.
        for length in range(min(len(history), max_ctx), 0, -1):
            candidate = (target_base, history[:length])
            if candidate in key_set:
                return candidate
        return (target_base, ())

    edge_weight = {(e.citing, e.cited): e.geographic_weight for e in graph.edges}
    out: dict[NodeKey, list[HonEdge]] = {}

    for node in graph.nodes:
        edges = graph.out_edges(node)
        if not edges:
            continue
        share = 1.0 / len(edges)
        out[(node, ())] = [
            HonEdge(resolve(e.cited, (node,)), share, e.geographic_weight)
            for e in edges
        ]

    for key in sorted(keys):
        base, context = key
        successors = counts.successors(base, context)
        support = sum(successors.values())
        if support == 0:
            raise DataError(f"no successor counts for {node_label(key)}")
        edges = []
        for target in sorted(successors):
            weight = edge_weight.get((base, target))
            if weight is None:
                raise DataError(
                    f"chain step {base!r} -> {target!r} has no citation edge"
                )
            edges.append(
                HonEdge(
                    resolve(target, (base,) + context),
                    successors[target] / support,
                    weight,
                )
            )
        out[key] = edges

    result = HigherOrderGraph(all_keys, out)
    in_deg = result.in_degree()
    orphans = [node_label(k) for k in sorted(keys) if in_deg[k] == 0]
    if orphans:
        raise RuntimeError(
            f"internal error: conditioned node(s) left without in-edges: {orphans}"
        )
    return result


def write_hon_edges_csv(graph: HigherOrderGraph, path) -> None:
    """Dump edges as source,target,probability,weight with b|a,z labels."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "probability", "weight"])
        for key in graph.nodes:
            for e in graph.out_edges(key):
                writer.writerow(
                    [node_label(key), node_label(e.target), repr(e.probability), repr(e.weight)]
                )
