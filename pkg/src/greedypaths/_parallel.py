"""Deterministic replica-level parallelism.

Replicas are embarrassingly parallel; results are always folded in replica
index order, so aggregates are bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence


def ordered_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Map fn over items, preserving order; worker count never changes the result."""
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))
