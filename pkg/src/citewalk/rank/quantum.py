"""Two-register quantum-walk ranking over a stochastic matrix.

The walk lives on an N^2 space spanned by |j> x |k>. Each column j of the
matrix defines a normalized state |psi_j> = |j> x sum_k sqrt(G_kj) |k>;
the step operator is U = pi * S with pi = 2 sum_j |psi_j><psi_j| - I the
reflection around their span and S the register swap. Starting from the
uniform superposition of the |psi_j>, the walk is read out by projecting
the second register after 2m steps, giving a probability P(i, m) per node,
and a node's impact score is the time average of that series.

U is applied in product form on an (N, N) amplitude array, so the N^2 x N^2
operator is materialized only for small N (diagnostics and tests).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..hon.matrix import StochasticMatrix
from ..validation import check_column_stochastic

DEFAULT_STEPS = 64

# The amplitude array alone is N^2 complex values; 2000 nodes ~ 64 MB.
DEFAULT_NODE_CAP = 2000

# Dense materialization is (N^2)^2 entries; only sensible for small N.
DENSE_OPERATOR_LIMIT = 64

# Unitary steps preserve the norm; drift beyond this triggers renormalization.
NORM_DRIFT_TOL = 1e-10

# The time average over the last half of the series should sit within this
# of the full average, otherwise more steps are advisable.
TAIL_GAP_TOL = 1e-3


def _as_link_matrix(G) -> np.ndarray:
    g = G.matrix if isinstance(G, StochasticMatrix) else check_column_stochastic(G)
    return g


class WalkOperator:
    """U = pi * S applied in product form to (N, N) amplitude arrays.

    amp[j, k] is the coefficient of |j> x |k>. The swap transposes the
    array; the reflection needs only the sqrt(G) row table, so one step
    costs O(N^2).
    """

    def __init__(self, G):
        g = _as_link_matrix(G)
        # Row j holds the second-register amplitudes of |psi_j>.
        self._sqrt_g_t = np.sqrt(g.T)
        self.n_nodes = g.shape[0]

    def apply(self, amp: np.ndarray) -> np.ndarray:
        swapped = amp.T
        overlap = (self._sqrt_g_t * swapped).sum(axis=1)
        return (2.0 * overlap[:, None]) * self._sqrt_g_t - swapped

    def dense(self) -> np.ndarray:
        """The full N^2 x N^2 operator, for small-N diagnostics only."""
        n = self.n_nodes
        if n > DENSE_OPERATOR_LIMIT:
            raise ValueError(
                f"refusing to materialize a {n * n} x {n * n} operator; "
                f"dense form is limited to N <= {DENSE_OPERATOR_LIMIT}"
            )
        basis = np.zeros((n * n, n))
        for j in range(n):
            basis[j * n:(j + 1) * n, j] = self._sqrt_g_t[j]
        reflection = 2.0 * (basis @ basis.T) - np.eye(n * n)
        swap_cols = np.empty(n * n, dtype=np.intp)
        for j in range(n):
            for k in range(n):
                swap_cols[j * n + k] = k * n + j
        # U column (j,k) is pi applied to |k,j|.
        return reflection[:, swap_cols]


def prepare_initial_state(G) -> np.ndarray:
    """Uniform superposition of the column states, as an (N, N) array."""
    g = _as_link_matrix(G)
    n = g.shape[0]
    return (np.sqrt(g.T) / np.sqrt(n)).astype(np.complex128)


def node_probabilities(amp: np.ndarray) -> np.ndarray:
    """Second-register marginals: P(i) = sum_j |amp[j, i]|^2."""
    return (np.abs(amp) ** 2).sum(axis=0)


def build_walk_operator(G) -> WalkOperator:
    return WalkOperator(G)


def step_probabilities(operator: WalkOperator, initial: np.ndarray, m: int) -> np.ndarray:
    """Node probabilities after 2m applications of U (m = 0 reads psi_0)."""
    if m < 0:
        raise ValueError(f"step index must be >= 0, got {m}")
    amp = initial
    for _ in range(2 * m):
        amp = operator.apply(amp)
    return node_probabilities(amp)


def walk_series(
    operator: WalkOperator,
    initial: np.ndarray,
    steps: int,
    renorm_tol: float = NORM_DRIFT_TOL,
) -> tuple[np.ndarray, int]:
    """Probability series P(i, m) for m = 0 .. steps, plus renorm count.

    Rows are produced incrementally (two operator applications per row).
    Norm drift beyond renorm_tol is corrected and counted; with exact
    arithmetic U is unitary and the counter stays at zero.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    n = operator.n_nodes
    series = np.empty((steps + 1, n))
    amp = initial.astype(np.complex128, copy=True)
    series[0] = node_probabilities(amp)
    renorms = 0
    for m in range(1, steps + 1):
        amp = operator.apply(operator.apply(amp))
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > renorm_tol:
            amp = amp / norm
            renorms += 1
        series[m] = node_probabilities(amp)
    return series, renorms


def impact_scores(series: np.ndarray) -> np.ndarray:
    """Time-averaged node probabilities over m = 1 .. M."""
    if series.shape[0] < 2:
        raise ValueError("need at least one evolved step to average")
    return series[1:].mean(axis=0)


def tail_gap(series: np.ndarray) -> float:
    """Largest deviation between the full average and the last-half average."""
    full = impact_scores(series)
    steps = series.shape[0] - 1
    tail = series[steps // 2 + 1:].mean(axis=0)
    return float(np.abs(full - tail).max())


class QuantumPageRank(BaseEstimator):
    """Quantum-walk node scores from a stochastic matrix.

    Parameters
    ----------
    steps : number of time-average samples M (series has M + 1 rows).
    node_cap : refuse matrices larger than this; the walk state is N^2
        complex amplitudes, so very large graphs need subgraph extraction
        (see the top-k option of the CLI) first.
    renorm_tol : norm drift tolerated before renormalizing.

    After fit: series_ (per matrix node), node_scores_, scores_ (folded
    onto base papers and summing to 1), renorm_count_, tail_gap_ and
    tail_converged_.
    """

    def __init__(
        self,
        steps: int = DEFAULT_STEPS,
        node_cap: int = DEFAULT_NODE_CAP,
        renorm_tol: float = NORM_DRIFT_TOL,
    ):
        self.steps = steps
        self.node_cap = node_cap
        self.renorm_tol = renorm_tol

    def fit(self, G, y=None):
        g = _as_link_matrix(G)
        n = g.shape[0]
        if n > self.node_cap:
            raise ValueError(
                f"matrix has {n} nodes, above the walk cap of {self.node_cap}; "
                "extract a top-k citation subgraph first (citewalk hon-build --top-k)"
            )
        operator = WalkOperator(g)
        initial = prepare_initial_state(g)
        series, renorms = walk_series(operator, initial, self.steps, self.renorm_tol)
        self.series_ = series
        self.node_scores_ = impact_scores(series)
        self.renorm_count_ = renorms
        self.tail_gap_ = tail_gap(series)
        self.tail_converged_ = self.tail_gap_ <= TAIL_GAP_TOL
        if isinstance(G, StochasticMatrix):
            self.scores_ = G.aggregate_to_base(self.node_scores_)
            self.base_labels_ = G.base_labels
            self.node_labels_ = G.labels
        else:
            self.scores_ = self.node_scores_.copy()
        return self
