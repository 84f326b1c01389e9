"""End-to-end builder: chains -> counts -> detection -> rewiring -> matrix."""

from __future__ import annotations

from sklearn.base import BaseEstimator

from ..corpus.records import CitationGraph
from .chains import DEFAULT_MAX_LEN, DEFAULT_WALKS_PER_NODE, sample_citation_chains
from .counts import count_subchains
from .detect import DEFAULT_MIN_SUPPORT, DEFAULT_ORDER, detect_higher_order
from .matrix import DEFAULT_ALPHA, build_transition_matrix
from .rewire import rewire


class HigherOrderNetwork(BaseEstimator):
    """Builds the conditioned transition matrix of a citation graph.

    Parameters mirror the pipeline configuration: context depth (order),
    sampling effort (walks_per_node, max_len, seed), the evidence gate
    (min_support), the damping factor, and the divergence log base.

    Fitted attributes: chains sampled (n_chains_), conditioned nodes kept
    (nodes_), the rewired graph (graph_), the transition matrix (matrix_),
    and the raw counts (counts_).
    """

    def __init__(
        self,
        order: int = DEFAULT_ORDER,
        walks_per_node: int = DEFAULT_WALKS_PER_NODE,
        max_len: int = DEFAULT_MAX_LEN,
        min_support: int | float = DEFAULT_MIN_SUPPORT,
        alpha: float = DEFAULT_ALPHA,
        seed: int = 0,
        log_base: float | None = None,
        weighted_sampling: bool = True,
    ):
        self.order = order
        self.walks_per_node = walks_per_node
        self.max_len = max_len
        self.min_support = min_support
        self.alpha = alpha
        self.seed = seed
        self.log_base = log_base
        self.weighted_sampling = weighted_sampling

    def fit(self, graph: CitationGraph, y=None):
        chains = sample_citation_chains(
            graph,
            walks_per_node=self.walks_per_node,
            max_len=self.max_len,
            seed=self.seed,
            weighted=self.weighted_sampling,
        )
        self.n_chains_ = len(chains)
        self.counts_ = count_subchains(chains, self.order)
        self.nodes_ = detect_higher_order(
            self.counts_,
            order=self.order,
            min_support=self.min_support,
            log_base=self.log_base,
        )
        self.graph_ = rewire(graph, self.nodes_, self.counts_, order=self.order)
        self.matrix_ = build_transition_matrix(self.graph_, alpha=self.alpha)
        return self

    def fit_transform(self, graph: CitationGraph, y=None):
        return self.fit(graph).matrix_
