from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Iterable, List, Optional, TypeVar

from taillab.core.env_loader import get_env_int

T = TypeVar("T")
R = TypeVar("R")


def resolve_worker_count(n_items: int, configured: Optional[int] = None) -> int:
    """Worker count for a fan-out over n_items.

    TAILLAB_THREADS caps the pool; unset or <= 0 means one worker per item,
    bounded by the CPU count.
    """
    if n_items <= 0:
        return 1
    if configured is None:
        configured = get_env_int("TAILLAB_THREADS", 0)
    if configured <= 0:
        max_workers = min(n_items, os.cpu_count() or 1)
    else:
        max_workers = configured
    return max(1, min(max_workers, n_items))


def map_ordered(fn: Callable[[T], R], items: Iterable[T], *, max_workers: Optional[int] = None) -> List[R]:
    """Apply fn to every item on a thread pool and return results in input order."""
    work = list(items)
    if not work:
        return []
    workers = resolve_worker_count(len(work), max_workers)
    if workers == 1:
        return [fn(item) for item in work]

    results: List[Optional[R]] = [None] * len(work)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, item): idx for idx, item in enumerate(work)}
        for fut in as_completed(futures):
            results[futures[fut]] = fut.result()
    return results  # type: ignore[return-value]
