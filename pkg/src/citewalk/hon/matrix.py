"""Damped column-stochastic transition matrices over (possibly conditioned) nodes.

Column j holds the outgoing distribution of node j: transition shares
multiplied by the geographic weight of the underlying citation, then
renormalized. Dangling columns become uniform, and the damped matrix is
G = alpha * G_link + (1 - alpha) / N, so every column sums to one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..corpus.records import CitationGraph
from ..validation import check_column_stochastic
from .rewire import HigherOrderGraph, NodeKey, parse_node_label, rewire

DEFAULT_ALPHA = 0.85


@dataclass
class StochasticMatrix:
    """A validated column-stochastic matrix with node identity attached.

    labels name the matrix nodes (conditioned ones as "b|a,z"); base_index
    maps each node to its underlying paper in base_labels so conditioned
    scores can be folded back onto papers.
    """

    matrix: np.ndarray
    labels: tuple[str, ...]
    base_labels: tuple[str, ...]
    base_index: np.ndarray
    alpha: float

    def __post_init__(self):
        self.matrix = check_column_stochastic(self.matrix)
        self.base_index = np.asarray(self.base_index, dtype=np.int64)
        n = self.matrix.shape[0]
        if len(self.labels) != n or self.base_index.shape != (n,):
            raise ValueError("labels and base_index must match the matrix dimension")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if len(self.base_labels) == 0 or self.base_index.max() >= len(self.base_labels):
            raise ValueError("base_index points outside base_labels")

    @property
    def n_nodes(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_base(self) -> int:
        return len(self.base_labels)

    def aggregate_to_base(self, node_values: np.ndarray) -> np.ndarray:
        """Sum per-node values onto their base papers."""
        values = np.asarray(node_values, dtype=float)
        if values.shape != (self.n_nodes,):
            raise ValueError(f"expected {self.n_nodes} values, got shape {values.shape}")
        out = np.zeros(self.n_base)
        np.add.at(out, self.base_index, values)
        return out

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no node labelled {label!r}") from None


def build_transition_matrix(graph: HigherOrderGraph, alpha: float = DEFAULT_ALPHA) -> StochasticMatrix:
    """Weighted, damped transition matrix of a (rewired) citation graph."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    n = graph.n_nodes
    if n == 0:
        raise ValueError("cannot build a transition matrix for an empty graph")
    link = np.zeros((n, n))
    for key in graph.nodes:
        j = graph.index(key)
        edges = graph.out_edges(key)
        if not edges:
            # Dangling column: distribute uniformly before damping.
            link[:, j] = 1.0 / n
            continue
        for e in edges:
            link[graph.index(e.target), j] += e.probability * e.weight
        total = link[:, j].sum()
        if total <= 0:
            link[:, j] = 1.0 / n
        else:
            link[:, j] /= total
    damped = alpha * link + (1.0 - alpha) / n

    base_labels = tuple(sorted({base for base, _ in graph.nodes}))
    base_pos = {b: i for i, b in enumerate(base_labels)}
    base_index = np.array([base_pos[base] for base, _ in graph.nodes], dtype=np.int64)
    return StochasticMatrix(
        matrix=damped,
        labels=tuple(graph.labels()),
        base_labels=base_labels,
        base_index=base_index,
        alpha=alpha,
    )


def first_order_matrix(
    graph: CitationGraph, alpha: float = DEFAULT_ALPHA, weighted: bool = True
) -> StochasticMatrix:
    """Transition matrix of the plain citation graph.

    weighted=False ignores geographic weights, which gives the classic
    damped uniform-out-degree matrix. Both variants share the conditioned
    build path, so a corpus with uniform weights produces bit-identical
    matrices through either route.
    """
    if weighted:
        hon = rewire(graph, set())
    else:
        stripped = CitationGraph(
            nodes=graph.nodes,
            edges=tuple(replace(e, geographic_weight=1.0) for e in graph.edges),
            max_distance_km=graph.max_distance_km,
        )
        hon = rewire(stripped, set())
    return build_transition_matrix(hon, alpha)


def redamp(sm: StochasticMatrix, alpha: float) -> StochasticMatrix:
    """The same link structure under a different damping parameter.

    Damping is affine, so the undamped link matrix can be recovered from a
    stored matrix exactly; columns are renormalized to absorb rounding
    before the new damping is applied.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if alpha == sm.alpha:
        return sm
    n = sm.matrix.shape[0]
    link = (sm.matrix - (1.0 - sm.alpha) / n) / sm.alpha
    link = np.clip(link, 0.0, None)
    link /= link.sum(axis=0, keepdims=True)
    return replace(sm, matrix=alpha * link + (1.0 - alpha) / n, alpha=alpha)


def save_matrix(path, sm: StochasticMatrix) -> None:
    np.savez_compressed(
        path,
        matrix=sm.matrix,
        labels=np.array(sm.labels, dtype=np.str_),
        base_labels=np.array(sm.base_labels, dtype=np.str_),
        base_index=sm.base_index,
        alpha=np.float64(sm.alpha),
    )


def load_matrix(path) -> StochasticMatrix:
    with np.load(path, allow_pickle=False) as data:
        return StochasticMatrix(
            matrix=data["matrix"],
            labels=tuple(str(v) for v in data["labels"]),
            base_labels=tuple(str(v) for v in data["base_labels"]),
            base_index=data["base_index"],
            alpha=float(data["alpha"]),
        )
