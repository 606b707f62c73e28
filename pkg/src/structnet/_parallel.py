from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

# below this many scalar operations a thread pool costs more than it saves
_MIN_PARALLEL_WORK = 5e7


def max_workers() -> int:
    """Worker cap from ``STRUCTNET_THREADS`` (0 or unset means all CPUs)."""
    raw = os.environ.get("STRUCTNET_THREADS", "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(fn: Callable[[T], R], items: Iterable[T], work: float = float("inf")) -> list[R]:
    """``list(map(fn, items))``, threaded when the job is big enough.

    Results always come back in input order.
    """
    items = list(items)
    if work < _MIN_PARALLEL_WORK:
        return [fn(x) for x in items]
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
