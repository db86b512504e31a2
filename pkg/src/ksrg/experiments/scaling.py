"""Scaling experiments over a grid of box volumes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientEventsError, OutOfRangeError
from ..params import ModelParams, compute_exponents, validate
from ..seeding import run_replicates
from .cluster_law import _census_law, hubs
from .runs import DEFAULT_ELL_MAX, box_replicate, boundary_replicate, palm_replicate
from .stats import ScalingFit, fit_line, mean_interval, median_interval, std_interval, wilson_interval

KINDS = ("lln", "lower_tail", "upper_tail", "second_largest", "cluster_decay", "boundary", "edge_boundary")
MIN_EVENTS = 5
DEFAULT_K_GRID = (8, 11, 16, 22, 32, 45, 64, 90, 128, 181, 256)


@dataclass(frozen=True)
class Row:
    n: float
    statistic: str
    value: float
    ci_low: float
    ci_high: float
    replicates: int


@dataclass
class ExperimentResult:
    kind: str
    rows: list
    fit: ScalingFit | None
    predicted_slope: float | None
    x_label: str
    y_label: str
    x_column: str = "n"
    warnings: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def rows_for(self, statistic):
        return [r for r in self.rows if r.statistic == statistic]


def _check_grid(n_grid, kind):
    n_grid = [float(x) for x in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    need = 1 if kind == "cluster_decay" else 3
    if len(n_grid) < need:
        raise ValueError(f"{kind} needs at least {need} grid values, got {len(n_grid)}")
    return n_grid


def _per_n(task, n_grid, replicates, seed, threads):
    """Records per grid point; replicate indices are disjoint across grid points."""
    out = []
    for k, n in enumerate(n_grid):
        out.append(run_replicates(lambda i, s, n=n: task(n, s), replicates, seed, threads,
                                  offset=k * replicates))
    return out


def _frequency_fit(result, xs, events, trials, transform, label):
    """Fit transform(freq) against xs on bins with enough events; drop the rest with a warning."""
    keep_x, keep_y = [], []
    for x, e, t in zip(xs, events, trials):
        if e < MIN_EVENTS:
            result.warnings.append(f"{label}: bin at x={x:g} dropped ({e} < {MIN_EVENTS} events)")
            continue
        y = transform(e / t)
        if y is None or not math.isfinite(y):
            result.warnings.append(f"{label}: bin at x={x:g} dropped (frequency {e}/{t} not transformable)")
            continue
        keep_x.append(x)
        keep_y.append(y)
    if len(keep_x) < 3:
        raise InsufficientEventsError(
            f"{label}: only {len(keep_x)} bins have at least {MIN_EVENTS} events; a fit needs 3", result)
    return fit_line(keep_x, keep_y)


def _giant_density_rows(rows, n_grid, recs):
    for n, rs in zip(n_grid, recs):
        dens = [r.giant_size / n for r in rs]
        m, lo, hi = mean_interval(dens)
        rows.append(Row(n, "giant_density_mean", m, lo, hi, len(rs)))
        s, slo, shi = std_interval(dens)
        rows.append(Row(n, "giant_density_std", s, slo, shi, len(rs)))


def run_scaling_experiment(kind: str, params: ModelParams, n_grid, replicates: int, extras: dict | None = None,
                           seed: int = 0, threads: int = 1) -> ExperimentResult:
    if kind not in KINDS:
        raise ValueError(f"unknown experiment kind {kind!r}; expected one of {KINDS}")
    validate(params)
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    extras = dict(extras or {})
    n_grid = _check_grid(n_grid, kind)
    rep = compute_exponents(params)
    ell_max = int(extras.get("ell_max", DEFAULT_ELL_MAX))
    warnings = list(rep.warnings)
    if rep.multiplicity >= 2:
        warnings.append(f"multiplicity {rep.multiplicity}: polylogarithmic corrections are not fitted")

    if kind in ("boundary", "edge_boundary"):
        return _boundary(kind, params, rep, n_grid, replicates, extras, seed, threads, warnings)
    if kind == "cluster_decay":
        return _cluster_decay(params, rep, n_grid[-1], replicates, extras, seed, threads, warnings, ell_max)

    recs = _per_n(lambda n, s: box_replicate(params, n, s, ell_max), n_grid, replicates, seed, threads)
    rows = []
    _giant_density_rows(rows, n_grid, recs)
    theta_hat = rows[-2].value  # mean giant density at the largest n
    logn = [math.log(n) for n in n_grid]

    if kind == "lln":
        res = ExperimentResult(kind, rows, None, None, "log n", "log stddev(|C1|/n)", warnings=warnings)
        stds = [r.value for r in res.rows_for("giant_density_std")]
        if all(s > 0 for s in stds):
            res.fit = fit_line(logn, np.log(stds))
        else:
            res.warnings.append("lln: zero stddev at some n; no fit")
        res.extra["theta_hat"] = theta_hat
        return res

    if kind == "lower_tail":
        rho = float(extras.get("rho") or 0.5 * theta_hat)
        res = ExperimentResult(kind, rows, None, rep.zeta_star, "log n", "log(-log P(|C1| < rho n))",
                               warnings=warnings, extra={"rho": rho, "theta_hat": theta_hat})
        events = [sum(r.giant_size < rho * n for r in rs) for n, rs in zip(n_grid, recs)]
        for n, e in zip(n_grid, events):
            lo, hi = wilson_interval(e, replicates)
            rows.append(Row(n, "lower_tail_freq", e / replicates, lo, hi, replicates))

        def tr(f):
            return math.log(-math.log(f)) if 0 < f < 1 else None

        res.fit = _frequency_fit(res, logn, events, [replicates] * len(n_grid), tr, "lower_tail")
        return res

    if kind == "upper_tail":
        rho = float(extras.get("rho") or theta_hat + 0.5 * (1.0 - theta_hat))
        res = ExperimentResult(kind, rows, None, None, "log n", "log P(|C1| > rho n)",
                               warnings=warnings, extra={"rho": rho, "theta_hat": theta_hat})
        if math.isinf(params.tau):
            res.warnings.append("upper_tail: tau = inf gives linear speed; no log-log slope is predicted")
        else:
            law = _census_law(recs[-1], ell_max, full=True)
            try:
                ta = hubs(rho, params.p, law, params.tau)
                res.predicted_slope = -ta.rate_I
                res.extra["tail_analysis"] = ta.to_dict()
            except OutOfRangeError as exc:
                res.warnings.append(f"upper_tail: {exc}")
        events = [sum(r.giant_size > rho * n for r in rs) for n, rs in zip(n_grid, recs)]
        for n, e in zip(n_grid, events):
            lo, hi = wilson_interval(e, replicates)
            rows.append(Row(n, "upper_tail_freq", e / replicates, lo, hi, replicates))
        res.fit = _frequency_fit(res, logn, events, [replicates] * len(n_grid),
                                 lambda f: math.log(f) if f > 0 else None, "upper_tail")
        return res

    # second_largest
    pred = 1.0 / rep.zeta_star if rep.zeta_star > 0 else None
    res = ExperimentResult(kind, rows, None, pred, "log log n", "log median |C2|", warnings=warnings)
    if pred is None:
        res.warnings.append("second_largest: zeta_star = 0, no polylogarithmic slope is predicted")
    meds = []
    for n, rs in zip(n_grid, recs):
        m, lo, hi = median_interval([r.second_size for r in rs])
        rows.append(Row(n, "second_size_median", m, lo, hi, len(rs)))
        meds.append(m)
        gm, glo, ghi = median_interval([r.giant_size for r in rs])
        rows.append(Row(n, "giant_size_median", gm, glo, ghi, len(rs)))
    pts = [(math.log(math.log(n)), math.log(m)) for n, m in zip(n_grid, meds) if m > 0 and n > math.e]
    if len(pts) >= 3:
        res.fit = fit_line(*zip(*pts))
    else:
        raise InsufficientEventsError("second_largest: fewer than 3 grid points with a non-empty second component",
                                      res)
    return res


def _boundary(kind, params, rep, n_grid, replicates, extras, seed, threads, warnings):
    enl = float(extras.get("enlargement", 3.0))
    recs = _per_n(lambda n, s: boundary_replicate(params, n, s, enl), n_grid, replicates, seed, threads)
    rows = []
    if kind == "boundary":
        stats_ = [("downward_boundary_mean", "downward"), ("downward_boundary_core_mean", "downward_core")]
        pred = rep.zeta_star
    else:
        stats_ = [("edge_boundary_mean", "edge_boundary")]
        pred = rep.two_minus_delta_eff
    res = ExperimentResult(kind, rows, None, pred if math.isfinite(pred) else None, "log n",
                           f"log mean {stats_[0][1]}", warnings=warnings, extra={"enlargement": enl})
    for n, rs in zip(n_grid, recs):
        for name, attr in stats_:
            m, lo, hi = mean_interval([getattr(r, attr) for r in rs])
            rows.append(Row(n, name, m, lo, hi, len(rs)))
    logn = [math.log(n) for n in n_grid]
    name, attr = stats_[0]
    events = [sum(getattr(r, attr) > 0 for r in rs) for rs in recs]
    means = [r.value for r in res.rows_for(name)]
    res.fit = _mean_fit(res, logn, means, events, name)
    if kind == "boundary":
        core = [r.value for r in res.rows_for("downward_boundary_core_mean")]
        core_events = [sum(r.downward_core > 0 for r in rs) for rs in recs]
        pts = [(x, math.log(m)) for x, m, e in zip(logn, core, core_events) if e >= MIN_EVENTS and m > 0]
        if len(pts) >= 3:
            f = fit_line(*zip(*pts))
            res.extra["core_fit"] = f.to_dict()
            res.extra["core_predicted_slope"] = rep.zeta_long
    return res


def _mean_fit(res, xs, means, events, label):
    keep = []
    for x, m, e in zip(xs, means, events):
        if e < MIN_EVENTS or m <= 0:
            res.warnings.append(f"{label}: bin at x={x:g} dropped ({e} < {MIN_EVENTS} positive replicates)")
            continue
        keep.append((x, math.log(m)))
    if len(keep) < 3:
        raise InsufficientEventsError(f"{label}: only {len(keep)} bins with enough positive replicates", res)
    return fit_line(*zip(*keep))


def _cluster_decay(params, rep, n, replicates, extras, seed, threads, warnings, ell_max):
    palm = extras.get("palm", "origin")
    k_grid = [int(k) for k in extras.get("k_grid", DEFAULT_K_GRID)]
    if any(b <= a for a, b in zip(k_grid, k_grid[1:])) or not k_grid or k_grid[0] < 1:
        raise ValueError("k_grid must be a strictly increasing list of positive integers")
    enl = float(extras.get("enlargement", 1.0))
    if palm == "origin":
        recs = run_replicates(lambda i, s: palm_replicate(params, n, s, enl, ell_max), replicates, seed, threads)
        sizes = np.array([0 if r.origin_in_giant else r.origin_cluster_size for r in recs])
        trials = len(recs)
        events = [int(np.count_nonzero(sizes > k)) for k in k_grid]
    elif palm == "typical":
        recs = run_replicates(lambda i, s: box_replicate(params, n, s, ell_max), replicates, seed, threads)
        trials = sum(r.n_vertices for r in recs)
        events = []
        for k in k_grid:
            # vertices outside the giant whose component has more than k vertices
            events.append(int(sum(np.sum(r.nongiant_sizes[r.nongiant_sizes > k] * r.nongiant_counts[r.nongiant_sizes > k])
                                  for r in recs)))
        warnings.append("cluster_decay: typical-vertex Palm samples within a replicate are correlated; "
                        "Wilson intervals are too narrow")
    else:
        raise ValueError(f"palm must be 'origin' or 'typical', got {palm!r}")

    z = rep.zeta_star
    res = ExperimentResult("cluster_decay", [], None, None, "k^zeta_star", "log P(|C(0)| > k, 0 not in C1)",
                           x_column="k", warnings=warnings,
                           extra={"n": n, "palm": palm, "samples": trials, "zeta_star": z,
                                  "theta_hat": float(np.mean([r.giant_size / max(r.n_vertices, 1) for r in recs]))})
    for k, e in zip(k_grid, events):
        lo, hi = wilson_interval(e, trials)
        res.rows.append(Row(float(k), "cluster_tail", e / trials, lo, hi, trials))
    if not z > 0:
        res.warnings.append("cluster_decay: zeta_star = 0; fitting against k^0 is degenerate, using log k")
        xs = [math.log(k) for k in k_grid]
        res.x_label = "log k"
    else:
        xs = [k**z for k in k_grid]
    res.fit = _frequency_fit(res, xs, events, [trials] * len(k_grid),
                             lambda f: math.log(f) if f > 0 else None, "cluster_decay")
    # the decay exponent of the upper bound may differ from zeta_star; report each candidate
    cands = {"zeta_star": z, "zeta_long": rep.zeta_long}
    if rep.cluster_decay_alt_exponent is not None:
        cands["alt"] = rep.cluster_decay_alt_exponent
    fits = {}
    for name, ex in cands.items():
        if not ex > 0:
            continue
        pts = [(k**ex, math.log(e / trials)) for k, e in zip(k_grid, events) if e >= MIN_EVENTS]
        if len(pts) >= 3:
            f = fit_line(*zip(*pts))
            fits[name] = {"exponent": ex, "r2": f.r2, "slope": f.slope}
    if fits:
        res.extra["candidate_fits"] = fits
        res.extra["best_candidate"] = max(fits, key=lambda k: fits[k]["r2"])
    return res
