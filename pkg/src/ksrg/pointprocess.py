"""Vertex layer: Poisson or lattice points in a box, i.i.d. Pareto marks, Palm insertion."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CapacityError
from .model import MarkedVertex
from .params import ModelParams

DEFAULT_VERTEX_BUDGET = 10**8


def as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


@dataclass(frozen=True)
class BoxSpec:
    """Centered box of volume ``n`` inside a sampling region enlarged by ``enlargement`` per side."""

    n: float
    d: int
    enlargement: float = 1.0

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError(f"box volume must be positive, got {self.n}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if not self.enlargement >= 1:
            raise ValueError(f"enlargement must be >= 1, got {self.enlargement}")

    @property
    def side(self) -> float:
        return float(self.n) ** (1.0 / self.d)

    @property
    def region_side(self) -> float:
        return self.side * self.enlargement

    @property
    def region_volume(self) -> float:
        return float(self.n) * self.enlargement**self.d


def in_box(positions, volume: float) -> np.ndarray:
    """Mask of points in the half-open centered box [-s/2, s/2)^d of the given volume."""
    positions = np.asarray(positions, dtype=float)
    d = positions.shape[1] if positions.ndim == 2 else 1
    half = float(volume) ** (1.0 / d) / 2.0
    return np.all((positions >= -half) & (positions < half), axis=-1)


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Array-backed list of marked vertices; iterating yields :class:`MarkedVertex`."""

    positions: np.ndarray
    marks: np.ndarray
    ids: np.ndarray
    box: BoxSpec
    origin_id: int | None = None

    @classmethod
    def from_arrays(cls, positions, marks, box, ids=None, origin_id=None):
        positions = np.asarray(positions, dtype=float).reshape(-1, box.d)
        marks = np.asarray(marks, dtype=float).reshape(-1)
        if ids is None:
            ids = np.arange(len(marks), dtype=np.int64)
        ids = np.asarray(ids, dtype=np.int64)
        if not (len(positions) == len(marks) == len(ids)):
            raise ValueError("positions, marks and ids must have equal length")
        if np.any(marks < 1):
            raise ValueError("marks must be >= 1")
        return cls(positions, marks, ids, box, origin_id)

    @classmethod
    def from_vertices(cls, vertices, box, origin_id=None):
        vertices = list(vertices)
        pos = np.array([v.position for v in vertices], dtype=float).reshape(-1, box.d)
        marks = np.array([v.mark for v in vertices], dtype=float)
        ids = np.array([v.id for v in vertices], dtype=np.int64)
        return cls.from_arrays(pos, marks, box, ids, origin_id)

    def __len__(self):
        return len(self.marks)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i):
        return MarkedVertex(int(self.ids[i]), tuple(float(c) for c in self.positions[i]),
                            float(self.marks[i]))

    @property
    def d(self) -> int:
        return self.box.d

    def index_of(self, vid: int) -> int:
        hit = np.flatnonzero(self.ids == vid)
        if len(hit) == 0:
            raise KeyError(vid)
        return int(hit[0])

    def subset(self, mask) -> "VertexSet":
        mask = np.asarray(mask, dtype=bool)
        origin = self.origin_id
        if origin is not None and not np.any(self.ids[mask] == origin):
            origin = None
        return VertexSet(self.positions[mask], self.marks[mask], self.ids[mask], self.box, origin)


def marks_from_uniforms(u, tau: float) -> np.ndarray:
    """Inverse transform of the Pareto law P(W >= w) = w^-(tau-1); ``u`` must lie in (0, 1]."""
    u = np.asarray(u, dtype=float)
    if math.isinf(tau):
        return np.ones_like(u)
    return u ** (-1.0 / (tau - 1.0))


def sample_marks(params: ModelParams, size, rng_seed=None) -> np.ndarray:
    rng = as_generator(rng_seed)
    if params.marks_constant:
        return np.ones(size)
    return marks_from_uniforms(1.0 - rng.random(size), params.tau)


def lattice_points(box: BoxSpec) -> np.ndarray:
    half = box.region_side / 2.0
    axis = np.arange(math.ceil(-half), math.ceil(half), dtype=float)
    # guard the half-open upper edge against rounding in region_side
    axis = axis[(axis >= -half) & (axis < half)]
    grids = np.meshgrid(*([axis] * box.d), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def sample_vertices(box: BoxSpec, params: ModelParams, rng_seed=None,
                    budget: float = DEFAULT_VERTEX_BUDGET) -> VertexSet:
    """Sample the marked vertex set of the sampling region.

    Positions are drawn first and sorted lexicographically; marks are then drawn
    one uniform per vertex in that order, so ids follow position order.
    """
    if box.d != params.d:
        raise ValueError(f"box dimension {box.d} differs from model dimension {params.d}")
    rng = as_generator(rng_seed)
    if params.vertex_process == "ppp":
        if box.region_volume > budget:
            raise CapacityError(
                f"expected vertex count {box.region_volume:.3g} exceeds budget {budget:.3g}")
        count = int(rng.poisson(box.region_volume))
        half = box.region_side / 2.0
        pos = rng.uniform(-half, half, size=(count, box.d))
        order = np.lexsort(pos.T[::-1])
        pos = pos[order]
    else:
        approx = (math.floor(box.region_side) + 1) ** box.d
        if approx > budget:
            raise CapacityError(f"lattice vertex count ~{approx:.3g} exceeds budget {budget:.3g}")
        pos = lattice_points(box)
    marks = sample_marks(params, len(pos), rng)
    return VertexSet.from_arrays(pos, marks, box)


def palm_insert_origin(vertices: VertexSet, params: ModelParams, rng_seed=None) -> VertexSet:
    """Add a vertex at the origin with a fresh mark and designate it as the origin.

    On the lattice the origin is already a vertex with an i.i.d. mark; it is
    designated instead of duplicated.
    """
    if params.vertex_process == "lattice" and len(vertices):
        hit = np.flatnonzero(np.all(vertices.positions == 0.0, axis=1))
        if len(hit):
            return replace(vertices, origin_id=int(vertices.ids[hit[0]]))
    rng = as_generator(rng_seed)
    mark = sample_marks(params, 1, rng)
    new_id = int(vertices.ids.max()) + 1 if len(vertices) else 0
    pos = np.vstack([vertices.positions, np.zeros((1, vertices.d))])
    return VertexSet(
        pos,
        np.concatenate([vertices.marks, mark]),
        np.concatenate([vertices.ids, np.array([new_id], dtype=np.int64)]),
        vertices.box,
        new_id,
    )
