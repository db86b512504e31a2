import math

import numpy as np
import pytest

from ksrg import oracles
from ksrg.errors import CapacityError
from ksrg.graphgen import generate_cellgrid, generate_naive, read_edge_list, write_edge_list
from ksrg.params import ModelParams
from ksrg.pointprocess import BoxSpec, VertexSet, sample_vertices

GENERATORS = [generate_naive, generate_cellgrid]
INF = math.inf


def _vs(pos, marks, d):
    return VertexSet.from_arrays(np.asarray(pos, float).reshape(-1, d), marks, BoxSpec(10, d))


@pytest.mark.parametrize("gen", GENERATORS)
def test_empty_and_single(gen):
    params = ModelParams(d=2, alpha=2.0, profile="polynomial")
    assert gen(_vs(np.empty((0, 2)), [], 2), params, 0).n_edges == 0
    assert gen(_vs([[0, 0]], [1.0], 2), params, 0).n_edges == 0


@pytest.mark.parametrize("gen", GENERATORS)
def test_two_vertex_edge_frequency(gen):
    params = ModelParams(d=1, alpha=2.0, profile="polynomial", p=0.8, beta=1.0)
    vs = _vs([[0.0], [2.0]], [1.0, 1.0], 1)
    reps = 20000
    hits = sum(gen(vs, params, s).n_edges for s in range(reps))
    assert abs(hits / reps - 0.2) <= 3 * math.sqrt(0.2 * 0.8 / reps)


@pytest.mark.parametrize("params", [
    ModelParams(d=2, tau=2.5, alpha=2.0, sigma=1.0, profile="polynomial", p=0.8),
    ModelParams(d=1, tau=2.3, sigma=1.0, beta=2.0),
    ModelParams(d=1, alpha=1.5, profile="polynomial", vertex_process="lattice", beta=0.7),
    ModelParams(d=3, tau=3.0, alpha=3.0, kernel="sum", profile="polynomial", beta=0.3),
    ModelParams(d=2, tau=2.2, sigma=0.0, beta=0.5, p=0.6),
], ids=["2d-girg-poly", "1d-threshold", "1d-lrp", "3d-sum", "2d-threshold-p"])
def test_cellgrid_mean_edge_count_matches_exact(params):
    vs = sample_vertices(BoxSpec(300, params.d), params, 4)
    expect = oracles.expected_edge_count(vs, params)
    reps = 300
    counts = np.array([generate_cellgrid(vs, params, s).n_edges for s in range(reps)])
    # edges are independent Bernoulli: the variance is sum p(1-p) <= expect
    assert abs(counts.mean() - expect) <= 4 * math.sqrt(max(expect, 1e-9) / reps) + 1e-9


@pytest.mark.parametrize("gen", GENERATORS)
def test_graph_invariants(gen):
    params = ModelParams(d=2, tau=2.5, alpha=2.0, sigma=1.0, profile="polynomial", beta=2.0)
    g = gen(sample_vertices(BoxSpec(400, 2), params, 1), params, 2)
    g.check()
    assert g.n_edges > 0


def test_cellgrid_deterministic_per_seed():
    params = ModelParams(d=2, tau=2.5, alpha=2.0, sigma=1.0, profile="polynomial")
    vs = sample_vertices(BoxSpec(2000, 2), params, 1)
    a = generate_cellgrid(vs, params, [5, 1])
    b = generate_cellgrid(vs, params, [5, 1])
    assert np.array_equal(a.edges, b.edges)


def test_naive_capacity():
    params = ModelParams(d=1)
    vs = sample_vertices(BoxSpec(200, 1), params, 0)
    with pytest.raises(CapacityError):
        generate_naive(vs, params, 0, budget=100)


def test_edge_list_round_trip(tmp_path):
    params = ModelParams(d=2, tau=2.5, alpha=2.0, profile="polynomial", beta=2.0)
    g = generate_cellgrid(sample_vertices(BoxSpec(200, 2), params, 3), params, 4)
    write_edge_list(g, tmp_path / "g.txt")
    h = read_edge_list(tmp_path / "g.txt", g.box)
    assert np.array_equal(g.edges, h.edges)
    assert np.array_equal(g.vertices.positions, h.vertices.positions)
    assert np.array_equal(g.vertices.marks, h.vertices.marks)


@pytest.mark.parametrize("beta", [1e-300, 1e-12, 1e-6, 1e6])
def test_cellgrid_extreme_beta(beta):
    params = ModelParams(d=1, alpha=2.0, profile="polynomial", beta=beta)
    vs = sample_vertices(BoxSpec(200, 1), params, 1)
    expect = oracles.expected_edge_count(vs, params)
    counts = np.array([generate_cellgrid(vs, params, s).n_edges for s in range(50)])
    assert abs(counts.mean() - expect) <= 4 * math.sqrt(max(expect, 1e-9) / 50) + 1e-9
