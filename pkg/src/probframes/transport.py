"""Exact 2-Wasserstein distance between discrete measures.

The optimal coupling is found with the transportation simplex (MODI
potentials, most-negative reduced cost pricing, Bland's rule while the
iteration is stuck on degenerate pivots). A brute-force
permutation search is provided as an independent oracle for uniform
measures of equal cardinality.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import InvalidMeasureError, PreconditionError
from .measures import DiscreteMeasure

CERTIFICATE_TOL = 1e-9
MAX_PERMUTATION_SIZE = 10
# consecutive degenerate pivots before switching to Bland's rule
BLAND_AFTER = 20


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Coupling between two discrete measures and its squared-distance cost.

    ``slackness`` is the complementary slackness residual of the dual
    certificate, ``sum_ij coupling_ij * (C_ij - u_i - v_j)`` together with
    the worst dual infeasibility; it is zero for an exactly optimal plan.
    """

    coupling: np.ndarray
    cost: float
    slackness: float = 0.0
    pivots: int = 0

    @property
    def distance(self) -> float:
        return float(np.sqrt(max(self.cost, 0.0)))


def squared_distances(x, y):
    """Matrix of ``|x_i - y_j|^2``, exactly zero for identical rows."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty((x.shape[0], y.shape[0]))
    step = max(1, 2_000_000 // max(1, y.size))
    for s in range(0, x.shape[0], step):
        diff = x[s:s + step, None, :] - y[None, :, :]
        out[s:s + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _northwest_corner(a, b):
    m, n = len(a), len(b)
    supply, demand = a.copy(), b.copy()
    flow = {}
    i = j = 0
    while True:
        x = min(supply[i], demand[j])
        flow[(i, j)] = x
        supply[i] -= x
        demand[j] -= x
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif supply[i] <= demand[j]:
            i += 1
        else:
            j += 1
    return flow


def _potentials(basis, cost, m, n):
    rows = [[] for _ in range(m)]
    cols = [[] for _ in range(n)]
    for i, j in basis:
        rows[i].append(j)
        cols[j].append(i)
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    queue = deque([("r", 0)])
    while queue:
        kind, k = queue.popleft()
        if kind == "r":
            for j in rows[k]:
                if np.isnan(v[j]):
                    v[j] = cost[k, j] - u[k]
                    queue.append(("c", j))
        else:
            for i in cols[k]:
                if np.isnan(u[i]):
                    u[i] = cost[i, k] - v[k]
                    queue.append(("r", i))
    return u, v, rows, cols


def _tree_path(rows, cols, start_row, end_col):
    """Cells on the basis-tree path from row ``start_row`` to column ``end_col``."""
    parent = {("r", start_row): None}
    queue = deque([("r", start_row)])
    target = ("c", end_col)
    while queue:
        node = queue.popleft()
        if node == target:
            break
        kind, k = node
        nbrs = [("c", j) for j in rows[k]] if kind == "r" else [("r", i) for i in cols[k]]
        for nb in nbrs:
            if nb not in parent:
                parent[nb] = node
                queue.append(nb)
    path = []
    node = target
    while parent[node] is not None:
        prev = parent[node]
        cell = (prev[1], node[1]) if prev[0] == "r" else (node[1], prev[1])
        path.append(cell)
        node = prev
    path.reverse()
    return path


def transportation_simplex(a, b, cost, max_pivots=None):
    """Solve ``min <C, P>`` over couplings of ``a`` (rows) and ``b`` (columns).

    Both marginals must be strictly positive with equal totals. Returns
    ``(plan, u, v, pivots)`` where ``u, v`` are optimal dual potentials.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cost = np.asarray(cost, dtype=float)
    m, n = len(a), len(b)
    b = b * (a.sum() / b.sum())
    flow = _northwest_corner(a, b)
    scale = max(1.0, float(np.abs(cost).max()))
    tol = 1e-12 * scale
    if max_pivots is None:
        max_pivots = 50 * (m + n) ** 2 + 1000
    pivots = 0
    stalled = 0
    while True:
        u, v, rows, cols = _potentials(flow, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        for (i, j) in flow:
            reduced[i, j] = 0.0
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            break
        if pivots >= max_pivots:
            raise RuntimeError("transportation simplex exceeded its pivot budget")
        if stalled >= BLAND_AFTER:
            # Bland: smallest row-major index enters, smallest index leaves
            enter = int(candidates[0])
        else:
            enter = int(np.argmin(reduced))
        ei, ej = divmod(enter, n)
        path = _tree_path(rows, cols, ei, ej)
        minus = path[0::2]
        theta = min(flow[c] for c in minus)
        leaving = min(c for c in minus if flow[c] == theta)
        for k, c in enumerate(path):
            flow[c] = flow[c] - theta if k % 2 == 0 else flow[c] + theta
        del flow[leaving]
        flow[(ei, ej)] = theta
        stalled = stalled + 1 if theta == 0.0 else 0
        pivots += 1
    plan = np.zeros((m, n))
    for (i, j), x in flow.items():
        plan[i, j] = max(x, 0.0)
    return plan, u, v, pivots


def _merge(points, weights):
    """Drop zero weights and merge duplicate points; returns (pts, w, groups)."""
    keep = np.flatnonzero(weights > 0)
    uniq, inverse = np.unique(points[keep], axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    w = np.zeros(len(uniq))
    np.add.at(w, inverse, weights[keep])
    return uniq, w, keep, inverse


def wasserstein2(a: DiscreteMeasure, b: DiscreteMeasure) -> TransportPlan:
    """Optimal squared-Euclidean coupling between two discrete measures.

    Duplicate support points are merged before solving and the merged
    plan is split back proportionally to the original weights. The
    optimum is certified by dual feasibility and complementary slackness.
    """
    if a.dim != b.dim:
        raise InvalidMeasureError(f"dimension mismatch: {a.dim} vs {b.dim}")
    xa, wa, keep_a, inv_a = _merge(a.points, a.weights)
    xb, wb, keep_b, inv_b = _merge(b.points, b.weights)
    cost = squared_distances(xa, xb)
    merged, u, v, pivots = transportation_simplex(wa, wb, cost)

    reduced = cost - u[:, None] - v[None, :]
    slack = float(np.sum(merged * np.abs(reduced)))
    infeas = float(max(0.0, -reduced.min()))
    certificate = max(slack, infeas)
    if certificate > CERTIFICATE_TOL * max(1.0, float(cost.max())):
        raise RuntimeError(f"optimality certificate failed (residual {certificate:g})")

    coupling = np.zeros((a.size, b.size))
    ra = a.weights[keep_a] / wa[inv_a]
    rb = b.weights[keep_b] / wb[inv_b]
    coupling[np.ix_(keep_a, keep_b)] = merged[np.ix_(inv_a, inv_b)] * ra[:, None] * rb[None, :]
    full_cost = squared_distances(a.points, b.points)
    value = float(np.sum(coupling * full_cost))
    return TransportPlan(coupling, value, certificate, pivots)


def plan_cost(plan: np.ndarray, a: DiscreteMeasure, b: DiscreteMeasure) -> float:
    return float(np.sum(plan * squared_distances(a.points, b.points)))


def _require_uniform(m, name):
    if not np.allclose(m.weights, 1.0 / m.size, rtol=0, atol=1e-12):
        raise PreconditionError(f"{name} does not have uniform weights")


def permutation_distance(a: DiscreteMeasure, b: DiscreteMeasure) -> float:
    """``min over permutations p of sum_i |x_i - y_p(i)|^2`` by exhaustive search."""
    if a.dim != b.dim:
        raise InvalidMeasureError(f"dimension mismatch: {a.dim} vs {b.dim}")
    _require_uniform(a, "first measure")
    _require_uniform(b, "second measure")
    if a.size != b.size:
        raise PreconditionError("measures have different cardinalities")
    size = a.size
    if size > MAX_PERMUTATION_SIZE:
        raise PreconditionError(f"exhaustive search limited to {MAX_PERMUTATION_SIZE} points")
    cost = squared_distances(a.points, b.points)
    rows = np.arange(size)
    best = np.inf
    perms = itertools.permutations(range(size))
    chunk = 50_000
    for _ in range(0, factorial(size), chunk):
        block = np.array(list(itertools.islice(perms, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        best = min(best, float(cost[rows, block].sum(axis=1).min()))
    return best


def embed_counting(points) -> DiscreteMeasure:
    """Uniform weights ``1/M`` on the given vectors."""
    p = np.asarray(points, dtype=float)
    if p.size == 0:
        raise InvalidMeasureError("need at least one vector")
    p = np.atleast_2d(p)
    return DiscreteMeasure(p)


def embed_normalized(points) -> DiscreteMeasure:
    """Unit vectors ``x_i/|x_i|`` weighted by ``|x_i|^2 / sum_j |x_j|^2``."""
    p = np.asarray(points, dtype=float)
    if p.size == 0:
        raise InvalidMeasureError("need at least one vector")
    p = np.atleast_2d(p)
    norms = np.linalg.norm(p, axis=1)
    if np.any(norms == 0):
        raise InvalidMeasureError("zero vector cannot be normalized")
    return DiscreteMeasure(p / norms[:, None], norms ** 2 / np.sum(norms ** 2))
