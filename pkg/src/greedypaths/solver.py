"""Exact max-weight self-avoiding paths by branch-and-bound, plus a beam heuristic.

The search realizes the canonical greedy-path selection: depth-first search
explores extensions in lexicographic vertex order and replaces the incumbent
only on strict improvement, so the retained optimizer is the lexicographically
smallest maximizer.  Pruning compares an admissible (never-underestimating)
completion bound against the incumbent, which preserves both exactness and the
tie-break.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .lattice import Path, l1_ball_offsets, origin
from .weights import TruncationLevel, Vertex, as_truncation

# Exact-solve budgets keep full acceptance runs on a laptop; override per call.
DEFAULT_NODE_BUDGET = 10**8
EXACT_N_BUDGET = {1: 64, 2: 16, 3: 10}
DEFAULT_SEED_BEAM_WIDTH = 32


def within_exact_budget(d: int, n: int, n_budget: int | None = None) -> bool:
    limit = n_budget if n_budget is not None else EXACT_N_BUDGET.get(d, 8)
    return n <= limit


@dataclass(frozen=True)
class SolverResult:
    value: float
    path: Path
    nodes_expanded: int
    nodes_pruned: int
    exact: bool


@dataclass(frozen=True)
class GreedyPathStats:
    """Floor-hit count and total overshoot along a truncated-solve path."""

    n_below: int
    defect: float


class _Geometry:
    """Static search geometry for (d, n): the radius-(n-1) ball around the origin,
    vertices indexed in lexicographic order, adjacency as ascending id lists."""

    def __init__(self, d: int, n: int):
        self.d = d
        self.n = n
        self.verts = l1_ball_offsets(d, n - 1)
        index = {v: i for i, v in enumerate(self.verts)}
        self.index = index
        self.origin_id = index[origin(d)]
        adj = []
        for v in self.verts:
            row = []
            for i in range(d):
                for step in (-1, 1):
                    w = list(v)
                    w[i] += step
                    j = index.get(tuple(w))
                    if j is not None:
                        row.append(j)
            row.sort()
            adj.append(tuple(row))
        self.adj = adj
        self._ball_ids: dict[tuple[int, int], tuple[int, ...]] = {}

    def ball_ids(self, center_id: int, radius: int) -> tuple[int, ...]:
        # Valid only while center is reachable with `radius` steps to spare,
        # i.e. |center| + radius <= n - 1; then the ball lies inside the geometry.
        key = (center_id, radius)
        ids = self._ball_ids.get(key)
        if ids is None:
            c = self.verts[center_id]
            index = self.index
            ids = tuple(index[tuple(a + b for a, b in zip(c, off))] for off in l1_ball_offsets(self.d, radius))
            self._ball_ids[key] = ids
        return ids


@lru_cache(maxsize=32)
def _geometry(d: int, n: int) -> _Geometry:
    return _Geometry(d, n)


def _weights_array(field, geo: _Geometry, trunc: TruncationLevel) -> list[float]:
    floor = trunc.floor
    if trunc.is_none:
        return [field.sample(v) for v in geo.verts]
    return [max(field.sample(v), floor) for v in geo.verts]


def admissible_upper_bound(field, partial: Path, remaining: int, trunc=None) -> float:
    """Upper bound on the best weight of any length-(len(partial)+remaining) completion.

    partial weight plus the sum of the `remaining` largest truncated weights in
    the L1 ball of radius `remaining` around the endpoint, excluding vertices
    already on the path.  Returns -inf when no completion exists.
    """
    if remaining < 0:
        raise ValueError("remaining must be nonnegative")
    t = as_truncation(trunc)
    pw = sum(t.apply(field.sample(v)) for v in partial)
    if remaining == 0:
        return pw
    end = partial[-1]
    used = set(partial)
    avail = []
    for off in l1_ball_offsets(len(end), remaining):
        v = tuple(a + b for a, b in zip(end, off))
        if v not in used:
            avail.append(t.apply(field.sample(v)))
    if len(avail) < remaining:
        return -math.inf
    avail.sort(reverse=True)
    return pw + sum(avail[:remaining])


def _raw_beam(geo: _Geometry, w: list[float], n: int, width: int):
    """Fixed-width beam over vertex ids; ties broken by (higher weight, lex path)."""
    adj = geo.adj
    o = geo.origin_id
    beam = [(w[o], (o,), 1 << o)]
    expanded = 0
    dropped = 0
    for _ in range(n - 1):
        cands = []
        for wt, ids, mask in beam:
            expanded += 1
            for c in adj[ids[-1]]:
                if not (mask >> c) & 1:
                    cands.append((wt + w[c], ids + (c,), mask | (1 << c)))
        if not cands:
            return -math.inf, None, expanded, dropped
        cands.sort(key=lambda t: (-t[0], t[1]))
        dropped += max(0, len(cands) - width)
        beam = cands[:width]
    return beam[0][0], beam[0][1], expanded, dropped


def beam_search(field, n: int, width: int, trunc=None) -> SolverResult:
    """Heuristic lower bound via iteratively widened beams.

    Runs fixed-width beams at every width 1..width and keeps the best completed
    path, so the returned value never decreases as `width` grows.  A width
    large enough to hold all partial paths makes the result exact in value
    (exact is still reported as False).
    """
    if width < 1:
        raise ValueError("beam width must be at least 1")
    if n < 1:
        raise ValueError("path length must be at least 1")
    t = as_truncation(trunc)
    geo = _geometry(field.dimension, n)
    w = _weights_array(field, geo, t)
    best = None
    expanded = dropped = 0
    for wd in range(1, width + 1):
        val, ids, ex, dr = _raw_beam(geo, w, n, wd)
        expanded += ex
        dropped += dr
        if ids is not None and (best is None or (-val, ids) < (-best[0], best[1])):
            best = (val, ids)
    verts = geo.verts
    path = tuple(verts[i] for i in best[1])
    return SolverResult(
        value=best[0], path=path, nodes_expanded=expanded, nodes_pruned=dropped, exact=False
    )


def max_weight_path(
    field,
    n: int,
    trunc=None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    seed_beam_width: int = DEFAULT_SEED_BEAM_WIDTH,
) -> SolverResult:
    """Exact maximum weight over all length-n self-avoiding paths from the origin.

    The returned path is the lexicographically smallest maximizer.  If the node
    budget runs out first, the best known feasible value is returned with
    exact=False (a valid lower bound).
    """
    if n < 1:
        raise ValueError("path length must be at least 1")
    t = as_truncation(trunc)
    geo = _geometry(field.dimension, n)
    w = _weights_array(field, geo, t)
    adj = geo.adj
    ball_ids = geo.ball_ids
    verts = geo.verts
    o = geo.origin_id

    if n == 1:
        return SolverResult(w[o], (verts[o],), 1, 0, True)

    seed_value = -math.inf
    seed_ids = None
    if seed_beam_width >= 1:
        seed_value, seed_ids, _, _ = _raw_beam(geo, w, n, seed_beam_width)
        # Guard against float summation-order noise: never pre-prune (or reject)
        # a candidate whose exact value ties the seed.
        seed_value -= 1e-9 * (1.0 + abs(seed_value))

    prefix = list(itertools.accumulate(sorted(w, reverse=True), initial=0.0))

    best_value = -math.inf
    best_ids = None
    expanded = 0
    pruned = 0
    budget_hit = False
    used = bytearray(len(w))
    used[o] = 1
    path = [o]

    def dfs(e: int, depth: int, weight: float):
        nonlocal best_value, best_ids, expanded, pruned, budget_hit
        if expanded >= node_budget:
            budget_hit = True
            return
        expanded += 1
        cdepth = depth + 1
        r = n - cdepth
        for c in adj[e]:
            if used[c]:
                continue
            cw = weight + w[c]
            if r == 0:
                if best_ids is None:
                    if cw >= seed_value:
                        best_value = cw
                        best_ids = (*path, c)
                elif cw > best_value:
                    best_value = cw
                    best_ids = (*path, c)
                continue
            # admissible bound, cheapest first: global top-r, then top-r in the
            # endpoint ball excluding vertices already on the path
            b = cw + prefix[r]
            if (b < seed_value) if best_ids is None else (b <= best_value):
                pruned += 1
                continue
            avail = [w[i] for i in ball_ids(c, r) if not used[i] and i != c]
            if len(avail) < r:
                pruned += 1
                continue
            avail.sort(reverse=True)
            b = cw + sum(avail[:r])
            if (b < seed_value) if best_ids is None else (b <= best_value):
                pruned += 1
                continue
            used[c] = 1
            path.append(c)
            dfs(c, cdepth, cw)
            path.pop()
            used[c] = 0
            if budget_hit:
                return

    dfs(o, 1, w[o])

    if budget_hit:
        if best_ids is None and seed_ids is None:
            _, seed_ids, _, _ = _raw_beam(geo, w, n, 1)
        if best_ids is None or (seed_ids is not None and seed_value > best_value):
            final_ids = seed_ids
            final_value = sum(w[i] for i in seed_ids)
        else:
            final_ids = best_ids
            final_value = best_value
        path_out = tuple(verts[i] for i in final_ids)
        return SolverResult(final_value, path_out, expanded, pruned, False)

    path_out = tuple(verts[i] for i in best_ids)
    return SolverResult(best_value, path_out, expanded, pruned, True)


def greedy_stats(result: SolverResult, field, m) -> GreedyPathStats:
    """Count path vertices whose raw weight is at or below the floor -m, and sum
    their overshoots -m - X_v (a vertex exactly at -m counts with overshoot 0)."""
    t = as_truncation(m)
    if t.is_none:
        return GreedyPathStats(0, 0.0)
    floor = t.floor
    n_below = 0
    defect = 0.0
    for v in result.path:
        x = field.sample(v)
        if x <= floor:
            n_below += 1
            defect += floor - x
    return GreedyPathStats(n_below, defect)
