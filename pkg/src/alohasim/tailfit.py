"""Empirical CCDF construction and log-log tail-slope estimation.

The default fitting window [1e-3, 1e-1] in survival probability targets
the regime where the power-law body is developed but Monte Carlo noise
has not yet taken over (at 1e5 to 1e6 samples).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError

#: default survival-probability window (high edge, low edge)
DEFAULT_WINDOW = (1e-1, 1e-3)

#: fewer in-window points than this flags the fit unreliable
MIN_RELIABLE_POINTS = 30

#: a Hill estimate above this is flagged as a light (non-power) tail
LIGHT_TAIL_THRESHOLD = -0.2


@dataclass(frozen=True)
class CcdfPoints:
    """Distinct sorted x with survival P[X > x]; the survival-0 point is
    dropped, so constant samples yield an empty (degenerate) grid."""

    x: np.ndarray
    survival: np.ndarray
    sample_count: int

    @property
    def degenerate(self) -> bool:
        return len(self.x) == 0

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class TailFit:
    slope: float
    stderr: float
    window: tuple[float, float]  # (p_hi, p_lo)
    points_used: int

    @property
    def reliable(self) -> bool:
        return self.points_used >= MIN_RELIABLE_POINTS


@dataclass(frozen=True)
class HillEstimate:
    """Negated mean log-spacing of the top k order statistics.

    For a power law of index 1 this sits near -1; for light-tailed data
    it drifts toward 0 from below, flagged via ``light_tail``.
    """

    estimate: float
    k: int

    @property
    def light_tail(self) -> bool:
        return self.estimate > LIGHT_TAIL_THRESHOLD


def empirical_ccdf(samples) -> CcdfPoints:
    """Survival at each distinct x: (# samples > x) / total."""
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or len(s) < 2:
        raise ConfigError(f"need at least 2 samples, got shape {s.shape}")
    s = np.sort(s)
    n = len(s)
    x, first = np.unique(s, return_index=True)
    # strictly-greater counts: everything past the last copy of each x
    counts = np.append(first[1:], n)
    surv = (n - counts) / n
    keep = surv > 0.0
    return CcdfPoints(x=x[keep], survival=surv[keep], sample_count=n)


def fit_loglog_slope(
    points: CcdfPoints, window: tuple[float, float] = DEFAULT_WINDOW
) -> TailFit:
    """OLS of log survival on log x over the given survival window.

    ``window`` is (p_hi, p_lo); points with survival in [p_lo, p_hi] are
    used.  Fewer than 30 in-window points gives an unreliable fit (see
    :attr:`TailFit.reliable`); fewer than 2 is an error.
    """
    p_hi, p_lo = window
    if not (0.0 < p_lo < p_hi <= 1.0):
        raise ConfigError(f"window must satisfy 0 < p_lo < p_hi <= 1, got {window}")
    if points.degenerate:
        raise NumericError("degenerate CCDF: no points with positive survival")
    mask = (points.survival >= p_lo) & (points.survival <= p_hi) & (points.x > 0)
    lx = np.log(points.x[mask])
    ly = np.log(points.survival[mask])
    k = len(lx)
    if k < 2:
        raise NumericError(
            f"only {k} CCDF points inside survival window {window}; cannot fit"
        )
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    if k > 2:
        stderr = math.sqrt(float(resid @ resid) / (k - 2) / sxx)
    else:
        stderr = 0.0
    return TailFit(slope=float(slope), stderr=stderr, window=window, points_used=k)


def hill_estimator(samples, k: int) -> HillEstimate:
    """Hill tail estimate from the top k order statistics.

    Returns the negated mean of log X_(n-i+1) - log X_(n-k), i = 1..k,
    so a power law of index beta gives roughly -1/beta.
    """
    s = np.asarray(samples, dtype=float)
    n = len(s)
    if not 2 <= k < n:
        raise ConfigError(f"k must satisfy 2 <= k < n={n}, got {k}")
    top = np.sort(s)[n - k - 1 :]
    if top[0] <= 0:
        raise ConfigError("Hill estimator needs positive order statistics")
    gamma = float(np.mean(np.log(top[1:]) - np.log(top[0])))
    return HillEstimate(estimate=-gamma, k=k)
