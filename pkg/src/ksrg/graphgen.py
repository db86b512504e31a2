"""Edge layer: conditionally on the marked vertices, include each pair independently.

``generate_naive`` enumerates all pairs and is the reference.
``generate_cellgrid`` is the accelerated sampler with the same law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _cellgrid
from .errors import CapacityError
from .model import connection_probs
from .params import ModelParams
from .pointprocess import BoxSpec, VertexSet, as_generator

NAIVE_VERTEX_BUDGET = 5 * 10**4
CELLGRID_VERTEX_BUDGET = 10**8


@dataclass(frozen=True, eq=False)
class SpatialGraph:
    vertices: VertexSet
    edges: np.ndarray  # (E, 2) int64 vertex ids, each row (min, max), rows sorted

    @property
    def box(self) -> BoxSpec:
        return self.vertices.box

    @property
    def origin_id(self):
        return self.vertices.origin_id

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_indices(self) -> np.ndarray:
        """Edges expressed as row indices into the vertex arrays."""
        ids = self.vertices.ids
        if len(ids) and np.all(ids == np.arange(len(ids))):
            return self.edges
        order = np.argsort(ids, kind="stable")
        idx = order[np.searchsorted(ids, self.edges, sorter=order)]
        return idx.reshape(-1, 2)

    def check(self):
        """Raise AssertionError unless the graph invariants hold."""
        e = self.edges
        assert e.ndim == 2 and e.shape[1] == 2
        if len(e) == 0:
            return
        assert np.all(e[:, 0] < e[:, 1]), "edges must be stored as (min, max) without loops"
        key = e[:, 0].astype(np.int64) * (int(e.max()) + 1) + e[:, 1]
        assert len(np.unique(key)) == len(e), "duplicate edges"
        assert np.all(np.isin(e, self.vertices.ids)), "edge endpoint is not a vertex"


def canonical_edges(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    e = np.stack([np.minimum(u, v), np.maximum(u, v)], axis=1) if len(u) else np.empty((0, 2), np.int64)
    if len(e):
        e = e[np.lexsort((e[:, 1], e[:, 0]))]
    return e


def _check_params(vertices: VertexSet, params: ModelParams):
    if vertices.d != params.d:
        raise ValueError(f"vertex dimension {vertices.d} differs from model dimension {params.d}")


def generate_naive(vertices: VertexSet, params: ModelParams, rng_seed=None,
                   budget: int = NAIVE_VERTEX_BUDGET) -> SpatialGraph:
    """Bernoulli draw for every unordered pair, pairs in (i, j) order with i < j by id."""
    _check_params(vertices, params)
    n = len(vertices)
    if n > budget:
        raise CapacityError(f"naive generator is limited to {budget} vertices, got {n}")
    rng = as_generator(rng_seed)
    order = np.argsort(vertices.ids, kind="stable")
    pos = vertices.positions[order]
    marks = vertices.marks[order]
    ids = vertices.ids[order]
    us, vs = [], []
    # row blocks keep memory bounded; the uniform stream follows row-major pair order
    block = max(1, 4_000_000 // max(n, 1))
    for start in range(0, max(n - 1, 0), block):
        stop = min(n - 1, start + block)
        rows = np.concatenate([np.full(n - i - 1, i) for i in range(start, stop)]) if stop > start else np.empty(0, int)
        cols = np.concatenate([np.arange(i + 1, n) for i in range(start, stop)]) if stop > start else np.empty(0, int)
        if len(rows) == 0:
            continue
        prob = connection_probs(pos[rows], pos[cols], marks[rows], marks[cols], params)
        hit = rng.random(len(rows)) < prob
        us.append(ids[rows[hit]])
        vs.append(ids[cols[hit]])
    if us:
        return SpatialGraph(vertices, canonical_edges(np.concatenate(us), np.concatenate(vs)))
    return SpatialGraph(vertices, np.empty((0, 2), np.int64))


def _seed32(rng_seed) -> int:
    if isinstance(rng_seed, np.random.Generator):
        return int(rng_seed.integers(0, 2**32))
    return int(np.random.SeedSequence(rng_seed).generate_state(1)[0])


def generate_cellgrid(vertices: VertexSet, params: ModelParams, rng_seed=None,
                      budget: int = CELLGRID_VERTEX_BUDGET) -> SpatialGraph:
    _check_params(vertices, params)
    n = len(vertices)
    if n > budget:
        raise CapacityError(f"cell-grid generator is limited to {budget} vertices, got {n}")
    if n < 2:
        return SpatialGraph(vertices, np.empty((0, 2), np.int64))
    pos = np.ascontiguousarray(vertices.positions, dtype=np.float64)
    lo = float(pos.min())
    hi = float(pos.max())
    side = max(hi - lo, 1e-12) * (1 + 1e-9) + 1e-12
    d = params.d
    levels = int(min(62 // d, max(1, math.ceil(math.log2(n) / d))))
    alpha = 0.0 if params.threshold else float(params.alpha)
    u, v, status = _cellgrid.sample_edges(
        pos,
        np.ascontiguousarray(vertices.marks, dtype=np.float64),
        np.ascontiguousarray(vertices.ids, dtype=np.int64),
        lo, side, levels, alpha, params.threshold, params.effective_sigma,
        params.kernel == "sum", float(params.beta), float(params.p), _seed32(rng_seed),
    )
    if status != _cellgrid.OK:
        raise AssertionError("an exact connection probability exceeded its dominating bound")
    return SpatialGraph(vertices, canonical_edges(u, v))


def write_edge_list(graph: SpatialGraph, path):
    """Write vertices as '# vertex id x1 .. xd w' header lines followed by 'u v' edge lines."""
    vs = graph.vertices
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# ksrg edge list d={vs.d} vertices={len(vs)} edges={graph.n_edges}")
        if vs.origin_id is not None:
            fh.write(f" origin={vs.origin_id}")
        fh.write("\n")
        for i in range(len(vs)):
            coords = " ".join(repr(float(c)) for c in vs.positions[i])
            fh.write(f"# vertex {int(vs.ids[i])} {coords} {float(vs.marks[i])!r}\n")
        for a, b in graph.edges:
            fh.write(f"{int(a)} {int(b)}\n")


def read_edge_list(path, box: BoxSpec | None = None) -> SpatialGraph:
    ids, pos, marks, edges = [], [], [], []
    d = None
    origin = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# vertex"):
                parts = line.split()[2:]
                ids.append(int(parts[0]))
                pos.append([float(x) for x in parts[1:-1]])
                marks.append(float(parts[-1]))
            elif line.startswith("#"):
                for tok in line.split():
                    if tok.startswith("d="):
                        d = int(tok[2:])
                    elif tok.startswith("origin="):
                        origin = int(tok[7:])
            else:
                a, b = line.split()
                edges.append((int(a), int(b)))
    if d is None:
        d = len(pos[0]) if pos else 1
    if box is None:
        box = BoxSpec(n=1.0, d=d)
    vs = VertexSet.from_arrays(np.array(pos).reshape(-1, d), marks, box, ids, origin)
    e = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return SpatialGraph(vs, canonical_edges(e[:, 0], e[:, 1]))
