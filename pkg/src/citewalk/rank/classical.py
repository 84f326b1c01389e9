"""Classical PageRank by damped power iteration."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import ConvergenceError
from ..hon.matrix import StochasticMatrix
from ..validation import check_column_stochastic

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


def classical_pagerank(
    matrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> tuple[np.ndarray, int]:
    """Stationary scores of a damped column-stochastic matrix.

    Iterates v <- G v from the uniform vector until the L1 change drops
    below tol. Raises ConvergenceError (with the last iterate attached)
    if the budget runs out first.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    g = matrix.matrix if isinstance(matrix, StochasticMatrix) else check_column_stochastic(matrix)
    n = g.shape[0]
    v = np.full(n, 1.0 / n)
    for iteration in range(1, max_iter + 1):
        nxt = g @ v
        if np.abs(nxt - v).sum() < tol:
            return nxt / nxt.sum(), iteration
        v = nxt
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} within {max_iter} iterations",
        last_iterate=v,
    )


class ClassicalPageRank(BaseEstimator):
    """Estimator wrapper around classical_pagerank.

    After fit: scores_ (per matrix node, sums to 1), n_iter_, and, when a
    StochasticMatrix with conditioned nodes is given, base_scores_ with the
    conditioned mass folded onto papers.
    """

    def __init__(self, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, G, y=None):
        scores, n_iter = classical_pagerank(G, tol=self.tol, max_iter=self.max_iter)
        self.scores_ = scores
        self.n_iter_ = n_iter
        if isinstance(G, StochasticMatrix):
            self.base_scores_ = G.aggregate_to_base(scores)
            self.base_labels_ = G.base_labels
        return self
