"""Pairwise Granger causality with BIC order selection and an F-test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .errors import ConditioningError, InvalidArgumentError
from .signal import as_series

DEFAULT_MAX_ORDER = 20
ALPHA = 0.05
RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GrangerResult:
    order: int
    F_x_to_y: float
    F_y_to_x: float
    p_x_to_y: float
    p_y_to_x: float
    rss_restricted_y: float
    rss_full_y: float
    rss_restricted_x: float
    rss_full_x: float
    n_obs: int
    alpha: float = ALPHA

    @property
    def detected_x_to_y(self) -> bool:
        return self.p_x_to_y < self.alpha

    @property
    def detected_y_to_x(self) -> bool:
        return self.p_y_to_x < self.alpha

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "F": {"x_to_y": self.F_x_to_y, "y_to_x": self.F_y_to_x},
            "p": {"x_to_y": self.p_x_to_y, "y_to_x": self.p_y_to_x},
            "detected": {"x_to_y": self.detected_x_to_y, "y_to_x": self.detected_y_to_x},
            "alpha": self.alpha,
        }


def _lags(v: np.ndarray, p: int, start: int) -> np.ndarray:
    """Columns v[t-1], ..., v[t-p] for t = start .. n-1."""
    n = v.shape[0]
    return np.column_stack([v[start - j:n - j] for j in range(1, p + 1)])


def _rss(design: np.ndarray, target: np.ndarray) -> float:
    q, r, _ = linalg.qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] == 0 or np.any(diag < RANK_TOLERANCE * diag[0]):
        raise ConditioningError("regressor matrix is rank deficient (constant or collinear input)")
    resid = target - q @ (q.T @ target)
    return float(resid @ resid)


def _design(own, other, p, start):
    n = own.shape[0] - start
    parts = [np.ones((n, 1)), _lags(own, p, start)]
    if other is not None:
        parts.append(_lags(other, p, start))
    return np.hstack(parts)


def select_order(x: np.ndarray, y: np.ndarray, max_order: int) -> int:
    """BIC-optimal lag order of the bivariate VAR, all orders fit on one sample."""
    start = max_order
    t = x.shape[0] - start
    best, best_bic = 1, np.inf
    for p in range(1, max_order + 1):
        resid = []
        for own, other in ((x, y), (y, x)):
            a = _design(own, other, p, start)
            target = own[start:]
            coef, *_ = np.linalg.lstsq(a, target, rcond=None)
            resid.append(target - a @ coef)
        cov = np.cov(np.vstack(resid), bias=True)
        sign, logdet = np.linalg.slogdet(cov)
        if sign <= 0:
            raise ConditioningError("singular residual covariance during order selection")
        bic = logdet + np.log(t) * (2 * (2 * p + 1)) / t
        if bic < best_bic:
            best, best_bic = p, bic
    return best


def _f_test(own, other, p):
    target = own[p:]
    rss_r = _rss(_design(own, None, p, p), target)
    rss_f = _rss(_design(own, other, p, p), target)
    df2 = target.shape[0] - 2 * p - 1
    # exact nesting can be lost to rounding when other adds nothing
    rss_f = min(rss_f, rss_r)
    if rss_f == 0:
        return rss_r, rss_f, (np.inf if rss_r > 0 else 0.0), (0.0 if rss_r > 0 else 1.0)
    f = ((rss_r - rss_f) / p) / (rss_f / df2)
    return rss_r, rss_f, float(f), float(stats.f.sf(f, p, df2))


def granger_pairwise(x, y, max_order: int | None = None, alpha: float = ALPHA) -> GrangerResult:
    """Test whether each series' past improves the forecast of the other.

    Parameters
    ----------
    x, y : TimeSeries or array_like
        Equal-length series.
    max_order : int, optional
        Largest lag order tried by BIC. Defaults to 20, clipped so that the
        series is longer than ``3 * max_order + 10``.
    alpha : float
        Significance level behind the ``detected_*`` flags.

    Raises
    ------
    ConditioningError
        Constant or perfectly collinear regressors.
    """
    xs, ys = as_series(x).samples, as_series(y).samples
    n = xs.shape[0]
    if ys.shape[0] != n:
        raise InvalidArgumentError(f"series lengths differ: {n} vs {ys.shape[0]}")
    limit = (n - 11) // 3
    if max_order is None:
        max_order = min(DEFAULT_MAX_ORDER, limit)
        if max_order < 1:
            raise InvalidArgumentError(f"series of length {n} is too short for Granger analysis")
    elif max_order < 1 or n <= 3 * max_order + 10:
        raise InvalidArgumentError(f"need length > 3*max_order + 10 (= {3 * max_order + 10}), got {n}")
    p = select_order(xs, ys, max_order)
    ry_r, ry_f, f_xy, p_xy = _f_test(ys, xs, p)
    rx_r, rx_f, f_yx, p_yx = _f_test(xs, ys, p)
    return GrangerResult(p, f_xy, f_yx, p_xy, p_yx, ry_r, ry_f, rx_r, rx_f, n - p, alpha)
