"""Offset exponential decay fit for citation-distance profiles.

The model is y = y0 + A1 * exp(-x / t1), fitted by a damped Gauss-Newton
(Levenberg-Marquardt style) loop on the populated distance bins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..errors import DataError
from .binning import DistanceBinSeries

MAX_ITER = 500
REL_TOL = 1e-9

# Fitting three parameters needs at least four populated bins.
MIN_POINTS = 4


@dataclass
class ExpDecayFit:
    """Fitted parameters plus a residual norm and a convergence flag."""

    y0: float
    a1: float
    t1: float
    residual_norm: float
    converged: bool
    n_iter: int

    def predict(self, x) -> np.ndarray:
        return _model(np.array([self.y0, self.a1, self.t1]), np.asarray(x, dtype=float))

    def to_json_dict(self) -> dict:
        return {
            "y0": self.y0,
            "A1": self.a1,
            "t1": self.t1,
            "residual": self.residual_norm,
            "converged": self.converged,
        }


def _model(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    y0, a1, t1 = params
    # t1 may wander during iteration; keep the exponent finite either way.
    with np.errstate(divide="ignore", over="ignore"):
        expo = np.where(t1 != 0.0, -x / t1, np.inf * np.sign(-x))
    return y0 + a1 * np.exp(np.clip(expo, -700.0, 700.0))


def _jacobian(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    y0, a1, t1 = params
    with np.errstate(divide="ignore", over="ignore"):
        expo = np.where(t1 != 0.0, -x / t1, np.inf * np.sign(-x))
    e = np.exp(np.clip(expo, -700.0, 700.0))
    j = np.empty((x.size, 3))
    j[:, 0] = 1.0
    j[:, 1] = e
    with np.errstate(divide="ignore", invalid="ignore"):
        j[:, 2] = np.where(t1 != 0.0, a1 * x / (t1 * t1) * e, 0.0)
    return j


def _initial_params(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x_range = float(x.max() - x.min())
    if x_range <= 0:
        raise DataError("fit needs at least two distinct x positions")
    return np.array([float(y.min()), float(y.max() - y.min()), x_range / 3.0])


def _lm_fit(x, y, p0, max_iter, rel_tol):
    p = np.asarray(p0, dtype=float).copy()
    r = _model(p, x) - y
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        jac = _jacobian(p, x)
        grad = jac.T @ r
        hess = jac.T @ jac
        accepted = False
        while lam < 1e14:
            damp = np.diag(np.maximum(np.diag(hess), 1e-12))
            try:
                delta = np.linalg.solve(hess + lam * damp, -grad)
            except np.linalg.LinAlgError:
                delta = np.linalg.lstsq(hess + lam * damp, -grad, rcond=None)[0]
            cand = p + delta
            r_cand = _model(cand, x) - y
            cost_cand = float(r_cand @ r_cand)
            if np.isfinite(cost_cand) and cost_cand <= cost:
                rel_change = float(
                    np.max(np.abs(delta) / np.maximum(np.abs(p), 1e-12))
                )
                p, r, cost = cand, r_cand, cost_cand
                lam = max(lam * 0.3, 1e-12)
                accepted = True
                if rel_change < rel_tol:
                    converged = True
                break
            lam *= 10.0
        if converged or not accepted:
            break
    # A negative or zero decay length means the model left its valid regime.
    if p[2] <= 0:
        converged = False
    return p, float(np.sqrt(cost)), converged, n_iter


class ExponentialDecayModel(BaseEstimator):
    """Least-squares fit of y = y0 + A1 * exp(-x / t1).

    Parameters
    ----------
    max_iter : iteration cap for the damped Gauss-Newton loop.
    rel_tol : relative parameter change that counts as converged.

    After fit the parameters are available as y0_, a1_ and t1_, together
    with residual_norm_, converged_ and n_iter_.
    """

    def __init__(self, max_iter: int = MAX_ITER, rel_tol: float = REL_TOL):
        self.max_iter = max_iter
        self.rel_tol = rel_tol

    def fit(self, X, y):
        x = np.asarray(X, dtype=float).ravel()
        yv = np.asarray(y, dtype=float).ravel()
        if x.size != yv.size:
            raise ValueError(f"x and y lengths differ: {x.size} vs {yv.size}")
        if x.size < MIN_POINTS:
            raise DataError(
                f"need at least {MIN_POINTS} populated bins to fit, got {x.size}"
            )
        if not (np.isfinite(x).all() and np.isfinite(yv).all()):
            raise ValueError("fit inputs must be finite")
        p0 = _initial_params(x, yv)
        params, resid, converged, n_iter = _lm_fit(
            x, yv, p0, self.max_iter, self.rel_tol
        )
        self.y0_, self.a1_, self.t1_ = (float(v) for v in params)
        self.residual_norm_ = resid
        self.converged_ = converged
        self.n_iter_ = n_iter
        self.fit_result_ = ExpDecayFit(
            self.y0_, self.a1_, self.t1_, resid, converged, n_iter
        )
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "fit_result_"):
            raise NotFittedError("call fit before predict")
        return self.fit_result_.predict(np.asarray(X, dtype=float))


def fit_exp_decay(series: DistanceBinSeries, max_iter: int = MAX_ITER, rel_tol: float = REL_TOL) -> ExpDecayFit:
    """Fit the decay model to the populated bins of a distance series.

    Bin midpoints are the x positions; empty bins are excluded. Raises
    DataError when fewer than four bins are populated.
    """
    x, y = series.nonempty()
    if x.size < MIN_POINTS:
        raise DataError(
            f"need at least {MIN_POINTS} populated bins to fit, got {x.size}"
        )
    model = ExponentialDecayModel(max_iter=max_iter, rel_tol=rel_tol).fit(x, y)
    return model.fit_result_


def write_fit_json(path, fit: ExpDecayFit) -> None:
    with open(path, "w") as fh:
        json.dump(fit.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
