"""Order-preserving map over independent chunks, optionally in worker processes."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable


def chunk_sizes(n: int, chunk: int) -> list[int]:
    """Split ``n`` items into consecutive chunks of at most ``chunk``."""
    if n <= 0:
        return []
    k = (n + chunk - 1) // chunk
    return [min(chunk, n - i * chunk) for i in range(k)]


def pmap(fn: Callable[[Any], Any], items: Iterable[Any], jobs: int = 1) -> list[Any]:
    """``list(map(fn, items))``, distributed over ``jobs`` processes when ``jobs > 1``.

    Results come back in input order, so reductions over them are
    independent of the degree of parallelism.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as ex:
        return list(ex.map(fn, items))
