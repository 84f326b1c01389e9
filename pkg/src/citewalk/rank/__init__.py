"""Ranking algorithms and ranking comparisons."""

from .classical import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    ClassicalPageRank,
    classical_pagerank,
)
from .quantum import (
    DEFAULT_NODE_CAP,
    DEFAULT_STEPS,
    DENSE_OPERATOR_LIMIT,
    NORM_DRIFT_TOL,
    QuantumPageRank,
    WalkOperator,
    build_walk_operator,
    impact_scores,
    node_probabilities,
    prepare_initial_state,
    step_probabilities,
    tail_gap,
    walk_series,
)
from .compare import (
    DEFAULT_TIE_TOL,
    SelfCitationWeight,
    TieGroup,
    TieReport,
    compare_rankings,
    self_citation_weight_report,
    write_paired_series_csv,
    write_self_citation_csv,
    write_tie_report_json,
)

__all__ = [
    "DEFAULT_MAX_ITER",
    "DEFAULT_TOL",
    "ClassicalPageRank",
    "classical_pagerank",
    "DEFAULT_NODE_CAP",
    "DEFAULT_STEPS",
    "DENSE_OPERATOR_LIMIT",
    "NORM_DRIFT_TOL",
    "QuantumPageRank",
    "WalkOperator",
    "build_walk_operator",
    "impact_scores",
    "node_probabilities",
    "prepare_initial_state",
    "step_probabilities",
    "tail_gap",
    "walk_series",
    "DEFAULT_TIE_TOL",
    "SelfCitationWeight",
    "TieGroup",
    "TieReport",
    "compare_rankings",
    "self_citation_weight_report",
    "write_paired_series_csv",
    "write_self_citation_csv",
    "write_tie_report_json",
]
