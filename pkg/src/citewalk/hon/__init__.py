"""Context-conditioned citation networks: chains, counts, detection, rewiring."""

from .chains import DEFAULT_MAX_LEN, DEFAULT_WALKS_PER_NODE, sample_citation_chains
from .counts import (
    ConditionalCounts,
    conditional_probability,
    count_subchains,
    kl_divergence,
)
from .detect import (
    DEFAULT_MIN_SUPPORT,
    DEFAULT_ORDER,
    HigherOrderNode,
    detect_higher_order,
    detection_threshold,
)
from .rewire import (
    HigherOrderGraph,
    HonEdge,
    NodeKey,
    node_label,
    parse_node_label,
    rewire,
    write_hon_edges_csv,
)
from .matrix import (
    DEFAULT_ALPHA,
    StochasticMatrix,
    build_transition_matrix,
    first_order_matrix,
    load_matrix,
    save_matrix,
)
from .estimator import HigherOrderNetwork

__all__ = [
    "DEFAULT_MAX_LEN",
    "DEFAULT_WALKS_PER_NODE",
    "sample_citation_chains",
    "ConditionalCounts",
    "conditional_probability",
    "count_subchains",
    "kl_divergence",
    "DEFAULT_MIN_SUPPORT",
    "DEFAULT_ORDER",
    "HigherOrderNode",
    "detect_higher_order",
    "detection_threshold",
    "HigherOrderGraph",
    "HonEdge",
    "NodeKey",
    "node_label",
    "parse_node_label",
    "rewire",
    "write_hon_edges_csv",
    "DEFAULT_ALPHA",
    "StochasticMatrix",
    "build_transition_matrix",
    "first_order_matrix",
    "load_matrix",
    "save_matrix",
    "HigherOrderNetwork",
]
