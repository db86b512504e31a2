"""Brute-force references for the test suite.

Nothing in the sampling or experiment code imports this module.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from .errors import CapacityError
from .model import connection_probs
from .params import ModelParams
from .pointprocess import BoxSpec, in_box, lattice_points


def expected_edge_count(vertices, params: ModelParams, budget: int = 10**4) -> float:
    n = len(vertices)
    if n > budget:
        raise CapacityError(f"expected_edge_count is limited to {budget} vertices")
    if n < 2:
        return 0.0
    iu, ju = np.triu_indices(n, 1)
    pos, w = vertices.positions, vertices.marks
    return float(np.sum(connection_probs(pos[iu], pos[ju], w[iu], w[ju], params)))


def pair_probabilities(vertices, params: ModelParams):
    """(i, j, prob) over unordered pairs of row indices, i < j."""
    n = len(vertices)
    iu, ju = np.triu_indices(n, 1)
    pos, w = vertices.positions, vertices.marks
    return iu, ju, connection_probs(pos[iu], pos[ju], w[iu], w[ju], params)


def bfs_partition(n: int, edges) -> list[frozenset]:
    """Components of a graph on row indices 0..n-1 by breadth-first search."""
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    seen = [False] * n
    parts = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    queue.append(y)
        parts.append(frozenset(comp))
    return parts


def expected_downward_boundary_lattice(n: float, params: ModelParams, enlargement: float = 3.0,
                                       budget: int = 10**4) -> float:
    """Exact E[#u in the inner box with an edge to the exterior] for constant marks on the lattice.

    With constant marks every edge is downward, so each inner vertex contributes
    1 - prod over exterior lattice points of (1 - p(u, v)).
    """
    if not params.marks_constant:
        raise ValueError("the lattice boundary oracle needs constant marks (tau = inf)")
    box = BoxSpec(n, params.d, enlargement)
    pts = lattice_points(box)
    if len(pts) > budget:
        raise CapacityError(f"{len(pts)} lattice points exceed the oracle budget {budget}")
    inside = in_box(pts, n)
    inner, outer = pts[inside], pts[~inside]
    if len(inner) == 0 or len(outer) == 0:
        return 0.0
    ones_i = np.ones(len(outer))
    total = 0.0
    with np.errstate(divide="ignore"):
        for x in inner:
            pr = connection_probs(np.broadcast_to(x, outer.shape), outer, ones_i, ones_i, params)
            total += 1.0 - float(np.exp(np.sum(np.log1p(-pr))))
    return total


def expected_downward_boundary_lrp_1d(n: int, params: ModelParams, enlargement: float = 3.0) -> float:
    """Same quantity as :func:`expected_downward_boundary_lattice` for d = 1, in O(n) via prefix sums."""
    if params.d != 1 or not params.marks_constant:
        raise ValueError("this oracle covers one-dimensional constant-mark models")
    box = BoxSpec(n, 1, enlargement)
    pts = lattice_points(box)[:, 0]
    inside = in_box(pts[:, None], n)
    inner = pts[inside]
    lo_out = pts[(~inside) & (pts < 0)]
    hi_out = pts[(~inside) & (pts > 0)]
    span = int(pts.max() - pts.min()) + 2
    k = np.arange(1, span + 1, dtype=float)
    one = np.ones_like(k)
    pk = connection_probs(k[:, None], np.zeros((len(k), 1)), one, one, params)
    saturated = pk >= 1.0
    logq = np.where(saturated, 0.0, np.log1p(-np.where(saturated, 0.0, pk)))
    cum = np.concatenate([[0.0], np.cumsum(logq)])  # cum[m] = sum over k = 1..m
    csat = np.concatenate([[0], np.cumsum(saturated)])

    ranges = []
    total = 0.0
    for x in inner:
        ranges.clear()
        if len(lo_out):
            ranges.append((int(x - lo_out.max()), int(x - lo_out.min())))
        if len(hi_out):
            ranges.append((int(hi_out.min() - x), int(hi_out.max() - x)))
        s = sum(cum[b] - cum[a - 1] for a, b in ranges)
        sat = sum(csat[b] - csat[a - 1] for a, b in ranges)
        total += 1.0 if sat else 1.0 - math.exp(s)
    return total


def quadratic_pgf_root(theta1: float, theta2: float, y: float) -> float:
    """Positive root z of theta1*z + theta2*z^2 = y."""
    if theta2 == 0:
        return y / theta1
    return (-theta1 + math.sqrt(theta1**2 + 4 * theta2 * y)) / (2 * theta2)
