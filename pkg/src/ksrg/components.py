"""Connected components and the boundary counters."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import GeometryError
from .graphgen import SpatialGraph
from .pointprocess import in_box


@njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def union_find_roots(n, eu, ev):
    """Root of every vertex after merging all edges (union by size, path compression)."""
    parent = np.arange(n)
    size = np.ones(n, np.int64)
    for k in range(len(eu)):
        a = _find(parent, eu[k])
        b = _find(parent, ev[k])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    roots = np.empty(n, np.int64)
    for x in range(n):
        roots[x] = _find(parent, x)
    return roots


@dataclass(frozen=True, eq=False)
class ComponentSummary:
    sizes: list
    giant_size: int
    second_size: int
    size_census: dict
    origin_in_giant: bool | None = None
    origin_cluster_size: int | None = None
    # per-vertex component label (a root row index) and the giant's label
    labels: np.ndarray = field(default=None, repr=False)
    giant_label: int = -1

    @property
    def n_vertices(self) -> int:
        return int(sum(self.sizes))

    def component_sizes_per_vertex(self) -> np.ndarray:
        counts = np.bincount(self.labels, minlength=len(self.labels))
        return counts[self.labels]


def components(graph: SpatialGraph) -> ComponentSummary:
    n = graph.n_vertices
    if n == 0:
        return ComponentSummary([], 0, 0, {}, None, None, np.empty(0, np.int64), -1)
    e = graph.edge_indices()
    roots = union_find_roots(n, np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1]))
    counts = np.bincount(roots, minlength=n)
    comp = np.flatnonzero(counts)
    comp_sizes = counts[comp]
    min_id = np.full(n, np.iinfo(np.int64).max)
    np.minimum.at(min_id, roots, graph.vertices.ids)
    # largest first; equal sizes ordered by smallest member id
    order = np.lexsort((min_id[comp], -comp_sizes))
    sizes = [int(s) for s in comp_sizes[order]]
    giant_label = int(comp[order[0]])
    ell, mult = np.unique(comp_sizes, return_counts=True)
    census = {int(a): int(b) for a, b in zip(ell, mult)}

    origin_in, origin_size = None, None
    if graph.origin_id is not None:
        hit = np.flatnonzero(graph.vertices.ids == graph.origin_id)
        if len(hit):
            r = roots[hit[0]]
            origin_in = bool(r == giant_label)
            origin_size = int(counts[r])
    return ComponentSummary(
        sizes=sizes,
        giant_size=sizes[0],
        second_size=sizes[1] if len(sizes) > 1 else 0,
        size_census=census,
        origin_in_giant=origin_in,
        origin_cluster_size=origin_size,
        labels=roots,
        giant_label=giant_label,
    )


def induced_subgraph(graph: SpatialGraph, mask) -> SpatialGraph:
    mask = np.asarray(mask, dtype=bool)
    vs = graph.vertices.subset(mask)
    if len(graph.edges) == 0:
        return SpatialGraph(vs, graph.edges)
    keep_ids = vs.ids
    e = graph.edges
    ok = np.isin(e[:, 0], keep_ids) & np.isin(e[:, 1], keep_ids)
    return SpatialGraph(vs, e[ok])


def restrict_marks(graph: SpatialGraph, wmax: float) -> SpatialGraph:
    """Induced subgraph on vertices with mark in [1, wmax)."""
    if wmax < 1:
        raise ValueError(f"wmax must be >= 1, got {wmax}")
    if math.isinf(wmax):
        return graph
    return induced_subgraph(graph, graph.vertices.marks < wmax)


def restrict_box(graph: SpatialGraph, volume: float) -> SpatialGraph:
    """Induced subgraph on vertices in the centered half-open box of the given volume."""
    return induced_subgraph(graph, in_box(graph.vertices.positions, volume))


def _require_enlarged(graph: SpatialGraph, n: float):
    if not graph.box.region_volume > n:
        raise GeometryError(
            f"sampling region of volume {graph.box.region_volume:g} does not strictly "
            f"contain the inner box of volume {n:g}")


def downward_boundary_count(graph: SpatialGraph, n: float, half: bool = False) -> int:
    """Number of u in the inner box (or its half-volume core) with an edge to some
    v outside the inner box such that mark(u) >= mark(v)."""
    _require_enlarged(graph, n)
    pos = graph.vertices.positions
    w = graph.vertices.marks
    inside = in_box(pos, n)
    source = in_box(pos, n / 2.0) if half else inside
    e = graph.edge_indices()
    if len(e) == 0:
        return 0
    a, b = e[:, 0], e[:, 1]
    hit_a = source[a] & ~inside[b] & (w[a] >= w[b])
    hit_b = source[b] & ~inside[a] & (w[b] >= w[a])
    return int(len(np.unique(np.concatenate([a[hit_a], b[hit_b]]))))


def edge_boundary_count(graph: SpatialGraph, n: float, tau: float) -> int:
    """Edges between the half-volume core with marks <= n^(1/(tau-1)) and the
    exterior of the inner box with marks <= n^(1/(tau-1))."""
    _require_enlarged(graph, n)
    wcap = math.inf if math.isinf(tau) else float(n) ** (1.0 / (tau - 1.0))
    pos = graph.vertices.positions
    w = graph.vertices.marks
    core = in_box(pos, n / 2.0) & (w <= wcap)
    outer = ~in_box(pos, n) & (w <= wcap)
    e = graph.edge_indices()
    if len(e) == 0:
        return 0
    a, b = e[:, 0], e[:, 1]
    return int(np.count_nonzero((core[a] & outer[b]) | (core[b] & outer[a])))
