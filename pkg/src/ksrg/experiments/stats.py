"""Least-squares slopes and interval estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..errors import InsufficientEventsError

CONFIDENCE = 0.95


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r2: float
    stderr_slope: float
    points: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "stderr_slope": self.stderr_slope,
            "points": [[float(x), float(y)] for x, y in self.points],
        }


def fit_line(x, y) -> ScalingFit:
    """Ordinary least squares y = slope * x + intercept."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y differ in length")
    if len(x) < 3:
        raise InsufficientEventsError(f"a fit needs at least 3 points, got {len(x)}")
    res = stats.linregress(x, y)
    r2 = float(res.rvalue) ** 2
    if not math.isfinite(r2):
        # constant y: the line is exact
        r2 = 1.0
    return ScalingFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        r2=min(1.0, max(0.0, r2)),
        stderr_slope=float(res.stderr),
        points=list(zip(x.tolist(), y.tolist())),
    )


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE):
    if trials <= 0:
        return 0.0, 1.0
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def mean_interval(values, confidence: float = CONFIDENCE):
    """(mean, low, high) with a Student t interval."""
    v = np.asarray(values, dtype=float)
    m = float(v.mean())
    if len(v) < 2:
        return m, -math.inf, math.inf
    half = float(stats.t.ppf(0.5 + confidence / 2, len(v) - 1)) * float(v.std(ddof=1)) / math.sqrt(len(v))
    return m, m - half, m + half


def std_interval(values, confidence: float = CONFIDENCE):
    """(sample stddev, low, high) from the chi-square interval of the variance."""
    v = np.asarray(values, dtype=float)
    k = len(v) - 1
    if k < 1:
        return 0.0, 0.0, math.inf
    s = float(v.std(ddof=1))
    lo = s * math.sqrt(k / float(stats.chi2.ppf(0.5 + confidence / 2, k)))
    hi = s * math.sqrt(k / float(stats.chi2.ppf(0.5 - confidence / 2, k)))
    return s, lo, hi


def median_interval(values, confidence: float = CONFIDENCE):
    """(median, low, high); distribution-free order-statistic interval."""
    v = np.sort(np.asarray(values, dtype=float))
    m = float(np.median(v))
    r = len(v)
    lo_k = int(stats.binom.ppf((1 - confidence) / 2, r, 0.5))
    hi_k = int(stats.binom.isf((1 - confidence) / 2, r, 0.5))
    lo = float(v[max(lo_k - 1, 0)]) if lo_k >= 1 else -math.inf
    hi = float(v[min(hi_k, r - 1)]) if hi_k < r else math.inf
    return m, min(lo, m), max(hi, m)
