import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksrg import oracles
from ksrg.errors import InsufficientEventsError, OutOfRangeError
from ksrg.experiments import (ClusterLawEstimate, choose_beta, estimate_cluster_law, fit_line, hubs,
                              run_scaling_experiment, theta_scan, wilson_interval)
from ksrg.experiments.stats import median_interval, std_interval
from ksrg.params import ModelParams

INF = math.inf
LRP2 = ModelParams(d=2, alpha=1.5, profile="polynomial", vertex_process="lattice", beta=0.3)


def test_fit_exact_power_law():
    n = np.array([10.0, 100.0, 1000.0, 10000.0])
    f = fit_line(np.log(n), np.log(3.0 * n**2))
    assert f.slope == pytest.approx(2.0, abs=1e-12)
    assert f.r2 == pytest.approx(1.0, abs=1e-12)
    assert len(f.points) == 4


def test_fit_needs_three_points():
    with pytest.raises(InsufficientEventsError):
        fit_line([1, 2], [1, 2])


def test_intervals_contain_point_estimates():
    lo, hi = wilson_interval(3, 10)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 10)[0] == 0.0
    s, slo, shi = std_interval([1.0, 2.0, 3.0, 4.0])
    assert slo < s < shi
    m, mlo, mhi = median_interval(list(range(101)))
    assert mlo <= m == 50 <= mhi


def test_edgeless_limit():
    law = estimate_cluster_law(ModelParams(d=1, alpha=2.0, profile="polynomial", beta=1e-9), 200, 40, seed=1)
    assert law.pmf[1] >= 0.95 and law.theta_hat <= 0.05
    assert law.total() == pytest.approx(1.0, abs=1e-12)


def test_complete_graph_limit():
    law = estimate_cluster_law(ModelParams(d=1, beta=1e6), 100, 20, seed=2)
    assert law.theta_hat == 1.0 and law.theta_is_proxy


@pytest.mark.parametrize("palm", ["origin", "typical"])
def test_cluster_law_sums_to_one(palm):
    law = estimate_cluster_law(LRP2, 400, 30, ell_max=16, seed=3, palm=palm)
    assert law.total() == pytest.approx(1.0, abs=1e-12)
    assert min(law.pmf.values()) >= 0 and law.tail_mass >= 0


def test_origin_law_matches_census_of_same_runs():
    reps = 600
    law = estimate_cluster_law(LRP2, 400, reps, ell_max=8, seed=4)
    for ell in range(1, 6):
        c = law.census_pmf[ell]
        sd = math.sqrt(max(c * (1 - c), 1e-4) / reps)
        assert abs(law.pmf[ell] - c) <= 3 * sd


def test_hubs_p_one():
    law = ClusterLawEstimate.from_pmf({1: 0.2}, theta=0.5)
    for rho in (0.1, 0.6, 0.99):
        t = hubs(rho, 1.0, law, tau=2.5)
        assert (t.hubs_value, t.h_up, t.h_lo) == (1.0, 1, 1)


def test_hubs_point_mass():
    t = hubs(0.5, 0.5, ClusterLawEstimate.from_pmf({1: 1.0}))
    assert t.hubs_value == pytest.approx(1.0, abs=1e-9)
    assert t.h_up == 1 and t.h_lo == 2


def test_hubs_quadratic():
    t = hubs(0.75, 0.5, ClusterLawEstimate.from_pmf({1: 0.5, 2: 0.5}), tau=2.5)
    z = oracles.quadratic_pgf_root(0.5, 0.5, 0.25)
    assert t.hubs_value == pytest.approx(math.log(z) / math.log(0.5), abs=1e-8)
    assert t.hubs_value == pytest.approx(1.4500, abs=1e-4)
    assert t.h_up == 2 and t.rate_I == pytest.approx(1.0)


def test_hubs_out_of_range():
    law = ClusterLawEstimate.from_pmf({1: 0.3}, theta=0.6)
    with pytest.raises(OutOfRangeError):
        hubs(0.5, 0.5, law)
    with pytest.raises(OutOfRangeError):
        hubs(1.0, 0.5, law)


@settings(max_examples=100, deadline=None)
@given(t1=st.floats(0.05, 0.9), frac=st.floats(0.0, 1.0), p=st.floats(0.05, 0.95),
       r1=st.floats(0.0, 1.0), r2=st.floats(0.0, 1.0))
def test_hubs_monotone_and_bounds(t1, frac, p, r1, r2):
    theta = (1 - t1) * frac * 0.9
    law = ClusterLawEstimate.from_pmf({1: t1, 3: (1 - t1 - theta) / 2}, theta=theta)
    a, b = sorted((r1, r2))
    lo_rho = theta + (1 - theta) * (0.001 + 0.998 * a)
    hi_rho = theta + (1 - theta) * (0.001 + 0.998 * b)
    ta, tb = hubs(lo_rho, p, law, 3.0), hubs(hi_rho, p, law, 3.0)
    assert ta.hubs_value <= tb.hubs_value + 1e-12
    assert ta.rate_I <= tb.rate_I
    for t in (ta, tb):
        assert t.h_lo >= t.h_up >= math.ceil(t.hubs_value - 1e-9)
        assert t.hubs_interval[0] <= t.hubs_value <= t.hubs_interval[1] + 1e-12


def test_lln_complete_graph():
    params = ModelParams(d=1, beta=1e6)
    res = run_scaling_experiment("lln", params, [50, 100, 200], 10, seed=5)
    means = [r.value for r in res.rows_for("giant_density_mean")]
    assert all(abs(m - 1) < 0.35 for m in means)
    assert len(res.rows_for("giant_density_std")) == 3


def test_lower_tail_without_events_is_insufficient():
    params = ModelParams(d=1, beta=1e6)
    with pytest.raises(InsufficientEventsError) as info:
        run_scaling_experiment("lower_tail", params, [50, 100, 200], 10, extras={"rho": 0.01}, seed=6)
    assert info.value.result is not None
    assert len(info.value.result.rows_for("lower_tail_freq")) == 3


def test_grid_validation():
    with pytest.raises(ValueError):
        run_scaling_experiment("lln", LRP2, [100, 50, 200], 2)
    with pytest.raises(ValueError):
        run_scaling_experiment("lln", LRP2, [100, 200], 2)
    with pytest.raises(ValueError):
        run_scaling_experiment("nope", LRP2, [100, 200, 300], 2)


def test_upper_tail_reports_prediction():
    params = ModelParams(d=1, tau=2.5, sigma=1.0, beta=0.3, p=0.5)
    try:
        res = run_scaling_experiment("upper_tail", params, [200, 400, 800], 40, seed=7)
    except InsufficientEventsError as exc:
        res = exc.result
    assert "tail_analysis" in res.extra
    assert res.predicted_slope == pytest.approx(-0.5 * res.extra["tail_analysis"]["h_up"])


def test_second_largest_and_cluster_decay_shapes():
    res = run_scaling_experiment("second_largest", LRP2.replace(beta=0.5), [400, 1600, 6400], 6, seed=8)
    assert len(res.rows_for("second_size_median")) == 3
    assert res.predicted_slope == pytest.approx(2.0)
    girg = ModelParams(d=1, tau=2.5, sigma=1.0, beta=0.15)
    res = run_scaling_experiment("cluster_decay", girg, [20000], 3, extras={"palm": "typical"}, seed=9)
    assert res.x_column == "k" and res.fit is not None
    assert "candidate_fits" in res.extra


def test_boundary_slope_close_to_exact_expectation():
    params = ModelParams(d=1, alpha=1.5, profile="polynomial", vertex_process="lattice", beta=0.5)
    grid = [256, 1024, 4096]
    res = run_scaling_experiment("boundary", params, grid, 10, seed=10)
    exact = fit_line(np.log(grid), np.log([oracles.expected_downward_boundary_lrp_1d(n, params) for n in grid]))
    assert abs(res.fit.slope - exact.slope) < 0.1
    assert res.predicted_slope == 0.5


def test_theta_scan_and_choice():
    rows = theta_scan(LRP2, 900, [0.1, 0.3, 1.0], 3, seed=11)
    assert rows[0]["theta_hat"] < rows[-1]["theta_hat"]
    b = choose_beta(rows, 0.5 * (rows[0]["theta_hat"] + rows[-1]["theta_hat"]))
    assert 0.1 <= b <= 1.0
    with pytest.raises(OutOfRangeError):
        choose_beta(rows, 2.0)
