"""Optional thread parallelism for independent expansion cells.

BBGKY_LAB_THREADS caps the worker count (default 1 = sequential). Results
are always reduced in submission order, so parallel runs stay deterministic.
"""

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "parallel_map"]


def thread_count():
    raw = os.environ.get("BBGKY_LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"BBGKY_LAB_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def parallel_map(fn, items):
    """Map preserving order; threads only when configured and worthwhile."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
