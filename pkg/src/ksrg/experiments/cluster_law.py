"""Cluster-size law of the origin, its generating function and the hub count."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..errors import OutOfRangeError
from ..params import ModelParams, validate
from ..seeding import run_replicates
from .runs import DEFAULT_ELL_MAX, box_replicate, palm_replicate
from .stats import wilson_interval

INTEGER_TOL = 1e-9
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class ClusterLawEstimate:
    theta_hat: float
    pmf: dict  # ell -> estimate of P(|C(0)| = ell, 0 not in the giant)
    tail_mass: float  # P(|C(0)| > ell_max, 0 not in the giant)
    replicates: int
    n_used: float
    # True: theta_hat is "origin in the giant of the box", a finite-volume stand-in for 0 <-> infinity
    theta_is_proxy: bool = True
    palm: str = "origin"
    samples: int = 0  # number of (origin or typical-vertex) observations
    # vertex-weighted pmf sum_l l*S_l/|V| over non-giant components of the same runs
    census_pmf: dict = field(default=None, repr=False)

    @classmethod
    def from_pmf(cls, pmf: dict, theta: float = 0.0, n_used: float = math.inf, replicates: int = 0):
        """Law with a given finite-cluster pmf; the remainder of 1 - theta goes to the tail."""
        pmf = {int(k): float(v) for k, v in pmf.items()}
        tail = max(0.0, 1.0 - theta - sum(pmf.values()))
        return cls(float(theta), pmf, tail, replicates, n_used, theta_is_proxy=False, palm="given")

    @property
    def ell_max(self) -> int:
        return max(self.pmf) if self.pmf else 0

    def total(self) -> float:
        return self.theta_hat + sum(self.pmf.values()) + self.tail_mass

    def to_dict(self) -> dict:
        return {
            "theta_hat": self.theta_hat,
            "pmf": {str(k): v for k, v in sorted(self.pmf.items())},
            "tail_mass": self.tail_mass,
            "replicates": self.replicates,
            "n_used": self.n_used,
            "theta_is_proxy": self.theta_is_proxy,
            "palm": self.palm,
            "samples": self.samples,
        }


def _law_from_counts(giant, by_size, tail, total, ell_max, **kw):
    pmf = {ell: by_size[ell] / total for ell in range(1, ell_max + 1)}
    return ClusterLawEstimate(giant / total, pmf, tail / total, samples=int(total), **kw)


def estimate_cluster_law(params: ModelParams, n: float, replicates: int, ell_max: int = DEFAULT_ELL_MAX,
                         seed: int = 0, threads: int = 1, palm: str = "origin",
                         enlargement: float = 1.0) -> ClusterLawEstimate:
    """Estimate theta and theta_ell from Palm replicates.

    ``palm="origin"`` inserts a vertex at the origin in every replicate and
    classifies its cluster within the box.  ``palm="typical"`` uses every vertex
    of the box as a Palm sample (translation invariance), which gives far more
    observations per replicate but correlated ones.
    """
    validate(params)
    if n <= 0 or replicates < 1:
        raise ValueError("n and replicates must be positive")
    if palm not in ("origin", "typical"):
        raise ValueError(f"palm must be 'origin' or 'typical', got {palm!r}")

    if palm == "origin":
        recs = run_replicates(lambda i, s: palm_replicate(params, n, s, enlargement, ell_max),
                              replicates, seed, threads)
        giant = sum(r.origin_in_giant for r in recs)
        by_size = np.zeros(ell_max + 1)
        tail = 0
        for r in recs:
            if r.origin_in_giant:
                continue
            if r.origin_cluster_size <= ell_max:
                by_size[r.origin_cluster_size] += 1
            else:
                tail += 1
        census = _census_law(recs, ell_max)
        return _law_from_counts(giant, by_size, tail, len(recs), ell_max, replicates=replicates,
                                n_used=n, palm="origin", census_pmf=census)

    recs = run_replicates(lambda i, s: box_replicate(params, n, s, ell_max), replicates, seed, threads)
    law = _census_law(recs, ell_max, full=True)
    return dataclasses.replace(law, replicates=replicates, n_used=n, census_pmf=law.pmf)


def _census_law(recs, ell_max, full=False):
    """Vertex-weighted cluster law from the component censuses of ``recs``."""
    total = sum(r.n_vertices for r in recs)
    giant = sum(r.giant_size for r in recs)
    by_size = np.zeros(ell_max + 1)
    tail = 0
    for r in recs:
        by_size += r.nongiant_mass[: ell_max + 1]
        tail += r.nongiant_tail
    if total == 0:
        if not full:
            return None
        return ClusterLawEstimate(0.0, {ell: 0.0 for ell in range(1, ell_max + 1)}, 1.0, len(recs), 0.0,
                                  palm="typical")
    if not full:
        return {ell: by_size[ell] / total for ell in range(1, ell_max + 1)}
    return _law_from_counts(giant, by_size, tail, total, ell_max, replicates=len(recs), n_used=0.0,
                            palm="typical")


@dataclass(frozen=True)
class TailAnalysis:
    hubs_value: float
    h_up: int
    h_lo: int
    rate_I: float | None  # (tau - 2) * h_up; None without a finite tau
    # hubs under the two extreme treatments of the truncated tail mass
    hubs_interval: tuple = (math.nan, math.nan)

    def to_dict(self) -> dict:
        return {
            "hubs_value": self.hubs_value,
            "h_up": self.h_up,
            "h_lo": self.h_lo,
            "rate_I": self.rate_I,
            "hubs_interval": list(self.hubs_interval),
        }


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) <= INTEGER_TOL


def _pgf(law: ClusterLawEstimate, tail_in: bool):
    ells = np.array(sorted(law.pmf), dtype=float)
    coef = np.array([law.pmf[int(e)] for e in ells])
    if tail_in and law.tail_mass > 0:
        ells = np.append(ells, (ells.max() if len(ells) else 0.0) + 1.0)
        coef = np.append(coef, law.tail_mass)
    return lambda z: float(np.sum(coef * z**ells))


def _invert(H, y):
    """z in (0, 1] with H(z) = y, or None if y > H(1)."""
    top = H(1.0)
    if y > top:
        return None
    if y == top:
        return 1.0
    z = optimize.brentq(lambda t: H(t) - y, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    assert abs(H(z) - y) <= ROOT_TOL, "generating-function inversion did not converge"
    return z


def hubs(rho: float, p: float, law: ClusterLawEstimate, tau: float | None = None) -> TailAnalysis:
    """Number of linear-mark hubs needed to lift the giant density to ``rho``.

    The truncated tail mass enters the generating function as z^(ell_max+1),
    the largest admissible value, so the primary estimate leans high; the
    interval also reports the inversion with the tail dropped.
    """
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    rate = lambda h: None if tau is None or math.isinf(tau) else (tau - 2.0) * h
    if p == 1:
        return TailAnalysis(1.0, 1, 1, rate(1), (1.0, 1.0))
    y = 1.0 - rho
    if not (rho < 1 and rho > law.theta_hat):
        raise OutOfRangeError(
            f"rho={rho} is outside ({law.theta_hat:.6g}, 1), where 1 - rho can be inverted")
    log1p_ = math.log1p(-p)
    z_hi = _invert(_pgf(law, True), y)
    if z_hi is None or z_hi <= 0:
        raise OutOfRangeError(f"1 - rho = {y} is not attained by the truncated generating function")
    value = math.log(z_hi) / log1p_
    z_lo = _invert(_pgf(law, False), y)
    other = 0.0 if z_lo is None else math.log(z_lo) / log1p_
    if _is_integer(value):
        h_up = int(round(value))
        h_lo = h_up + 1
    else:
        h_up = int(math.ceil(value))
        h_lo = h_up
    return TailAnalysis(value, h_up, h_lo, rate(h_up), (min(other, value), max(other, value)))


def theta_scan(params: ModelParams, n: float, betas, replicates: int, seed: int = 0, threads: int = 1):
    """Giant density |C^(1)|/|V| over a grid of beta values (one row per beta)."""
    rows = []
    for k, beta in enumerate(betas):
        pb = params.replace(beta=float(beta))
        validate(pb)
        recs = run_replicates(lambda i, s: box_replicate(pb, n, s, 1), replicates, seed, threads,
                              offset=k * replicates)
        dens = np.array([r.giant_size / max(r.n_vertices, 1) for r in recs])
        giant = sum(r.giant_size for r in recs)
        total = sum(r.n_vertices for r in recs)
        rows.append({
            "beta": float(beta),
            "theta_hat": float(dens.mean()),
            "theta_std": float(dens.std(ddof=1)) if len(dens) > 1 else 0.0,
            "pooled": giant / total if total else 0.0,
            "ci": wilson_interval(giant, total),
        })
    return rows


def choose_beta(scan_rows, target: float) -> float:
    """Interpolate (in log beta) the beta at which the scanned theta_hat crosses ``target``."""
    b = np.array([r["beta"] for r in scan_rows])
    t = np.array([r["theta_hat"] for r in scan_rows])
    order = np.argsort(b)
    b, t = b[order], t[order]
    above = np.flatnonzero(t >= target)
    if len(above) == 0:
        raise OutOfRangeError(f"no scanned beta reaches theta_hat >= {target}")
    k = above[0]
    if k == 0:
        return float(b[0])
    frac = (target - t[k - 1]) / (t[k] - t[k - 1])
    return float(math.exp(math.log(b[k - 1]) + frac * (math.log(b[k]) - math.log(b[k - 1]))))
