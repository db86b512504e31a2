"""One Monte Carlo replicate: sample a graph and reduce it to a small record."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..components import components, downward_boundary_count, edge_boundary_count, restrict_box
from ..graphgen import generate_cellgrid, generate_naive
from ..params import ModelParams
from ..pointprocess import BoxSpec, palm_insert_origin, sample_vertices
from ..seeding import replicate_streams

DEFAULT_ELL_MAX = 64

_observers = []


def add_graph_observer(fn):
    """Register ``fn(graph, summary)``, called on every graph sampled by a replicate."""
    _observers.append(fn)
    return fn


def remove_graph_observer(fn):
    if fn in _observers:
        _observers.remove(fn)


def _notify(graph, summary):
    for fn in list(_observers):
        fn(graph, summary)


def sample_graph(params: ModelParams, n: float, seed: int, enlargement: float = 1.0,
                 palm: bool = False, generator: str = "cellgrid"):
    vseed, eseed = replicate_streams(seed)
    box = BoxSpec(n, params.d, enlargement)
    vs = sample_vertices(box, params, vseed)
    if palm:
        vs = palm_insert_origin(vs, params, [int(seed), 2])
    gen = generate_cellgrid if generator == "cellgrid" else generate_naive
    return gen(vs, params, eseed)


def check_identities(summary, n_vertices: int):
    assert sum(summary.sizes) == n_vertices, "component sizes do not add up to |V|"
    assert sum(ell * c for ell, c in summary.size_census.items()) == n_vertices, \
        "size census does not add up to |V|"


@dataclass(frozen=True)
class BoxRecord:
    n_vertices: int
    giant_size: int
    second_size: int
    nongiant_mass: np.ndarray  # [ell] -> ell * (number of non-giant components of size ell), ell <= ell_max
    nongiant_tail: int  # vertices in non-giant components larger than ell_max
    nongiant_sizes: np.ndarray  # distinct non-giant component sizes
    nongiant_counts: np.ndarray  # how many components of each size


def _box_record(summary, n_vertices, ell_max) -> BoxRecord:
    sizes = np.array(summary.sizes[1:], dtype=np.int64)
    uniq, cnt = np.unique(sizes, return_counts=True)
    mass = np.zeros(ell_max + 1)
    small = uniq <= ell_max
    mass[uniq[small]] = uniq[small] * cnt[small]
    tail = int(np.sum(uniq[~small] * cnt[~small]))
    rec = BoxRecord(n_vertices, summary.giant_size, summary.second_size, mass, tail, uniq, cnt)
    assert rec.giant_size + int(mass.sum()) + tail == n_vertices, "giant + non-giant mass differs from |V|"
    return rec


def box_replicate(params: ModelParams, n: float, seed: int, ell_max: int = DEFAULT_ELL_MAX,
                  generator: str = "cellgrid") -> BoxRecord:
    """Component statistics of G_n, the graph on the box of volume n."""
    g = sample_graph(params, n, seed, 1.0, False, generator)
    summ = components(g)
    check_identities(summ, g.n_vertices)
    _notify(g, summ)
    return _box_record(summ, g.n_vertices, ell_max)


@dataclass(frozen=True)
class PalmRecord(BoxRecord):
    origin_in_giant: bool = False
    origin_cluster_size: int = 0


def palm_replicate(params: ModelParams, n: float, seed: int, enlargement: float = 1.0,
                   ell_max: int = DEFAULT_ELL_MAX, generator: str = "cellgrid") -> PalmRecord:
    """Origin-cluster classification in the box, with a vertex added at the origin."""
    g = sample_graph(params, n, seed, enlargement, True, generator)
    if enlargement > 1:
        g = restrict_box(g, n)
    summ = components(g)
    check_identities(summ, g.n_vertices)
    _notify(g, summ)
    base = _box_record(summ, g.n_vertices, ell_max)
    return PalmRecord(**base.__dict__, origin_in_giant=bool(summ.origin_in_giant),
                      origin_cluster_size=int(summ.origin_cluster_size))


@dataclass(frozen=True)
class BoundaryRecord:
    n_vertices: int
    downward: int  # inner-box vertices with a downward edge to the exterior
    downward_core: int  # same, sources restricted to the half-volume core
    edge_boundary: int


def boundary_replicate(params: ModelParams, n: float, seed: int, enlargement: float = 3.0,
                       generator: str = "cellgrid") -> BoundaryRecord:
    g = sample_graph(params, n, seed, enlargement, False, generator)
    _notify(g, None)
    return BoundaryRecord(
        g.n_vertices,
        downward_boundary_count(g, n),
        downward_boundary_count(g, n, half=True),
        edge_boundary_count(g, n, params.tau),
    )
