"""Lattice geometry, self-avoiding paths, and the exhaustive enumeration oracle.

Conventions used throughout the package:

* a vertex of Z^d is a plain tuple of d signed integers;
* the total order on vertices is coordinatewise lexicographic (native tuple
  comparison), and path sequences compare lexicographically vertex by vertex;
* the *length* of a path is its number of vertices, so a single-vertex path
  has length 1.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator

from .weights import Vertex, as_truncation

Path = tuple[Vertex, ...]


class NotAdjacent(ValueError):
    """Extension vertex is not a lattice neighbor of the path endpoint."""


class NotSelfAvoiding(ValueError):
    """Extension vertex already occurs on the path."""


class ResourceBound(RuntimeError):
    """A caller-configured enumeration cap was exceeded."""


def origin(d: int) -> Vertex:
    return (0,) * d


def neighbors(v: Vertex, d: int | None = None) -> tuple[Vertex, ...]:
    """The 2d vertices at L1 distance 1 from v, in lexicographic order."""
    if d is None:
        d = len(v)
    elif len(v) != d:
        raise ValueError(f"vertex {v} does not have dimension {d}")
    out = []
    for i in range(d):
        for step in (-1, 1):
            w = list(v)
            w[i] += step
            out.append(tuple(w))
    out.sort()
    return tuple(out)


def l1_distance(v: Vertex, w: Vertex) -> int:
    return sum(abs(a - b) for a, b in zip(v, w))


def path_extend(p: Path, v: Vertex) -> Path:
    """Append v to p; raises NotAdjacent / NotSelfAvoiding on invalid steps."""
    if p and l1_distance(p[-1], v) != 1:
        raise NotAdjacent(f"{v} is not adjacent to path endpoint {p[-1]}")
    if v in p:
        raise NotSelfAvoiding(f"{v} already occurs on the path")
    return p + (v,)


def is_self_avoiding_path(p: Path) -> bool:
    """Structural check: pairwise-distinct vertices, consecutive steps at L1 distance 1."""
    if len(set(p)) != len(p):
        return False
    return all(l1_distance(a, b) == 1 for a, b in zip(p, p[1:]))


def path_weight(p: Path, field, trunc=None) -> float:
    """Sum of (optionally truncated) sampled weights over the path's vertices."""
    t = as_truncation(trunc)
    return sum(t.apply(field.sample(v)) for v in p)


def enumerate_saws(n: int, d: int, max_paths: int | None = None) -> Iterator[Path]:
    """Yield every self-avoiding path of exactly n vertices starting at the origin.

    Paths come out in strictly increasing lexicographic order, each exactly
    once.  Intended as a brute-force oracle for small n (the count grows
    exponentially); raises ResourceBound when max_paths is exceeded.
    """
    if n < 1:
        raise ValueError("path length must be at least 1")
    start = origin(d)
    used = {start}
    count = 0

    def extend(path: Path) -> Iterator[Path]:
        nonlocal count
        if len(path) == n:
            count += 1
            if max_paths is not None and count > max_paths:
                raise ResourceBound(f"more than {max_paths} paths of length {n}")
            yield path
            return
        for w in neighbors(path[-1], d):
            if w not in used:
                used.add(w)
                yield from extend(path + (w,))
                used.remove(w)

    yield from extend((start,))


@lru_cache(maxsize=None)
def l1_ball_offsets(d: int, radius: int) -> tuple[Vertex, ...]:
    """All integer offsets with L1 norm <= radius, in lexicographic order."""
    if radius < 0:
        return ()
    return tuple(
        v
        for v in itertools.product(range(-radius, radius + 1), repeat=d)
        if sum(abs(c) for c in v) <= radius
    )
