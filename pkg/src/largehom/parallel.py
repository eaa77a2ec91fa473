"""A bounded, order-preserving thread pool for independent slices."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_threads = max(1, os.cpu_count() or 1)


def set_threads(n: int | None) -> None:
    global _threads
    _threads = max(1, int(n)) if n else max(1, os.cpu_count() or 1)


def get_threads() -> int:
    return _threads


def pmap(fn, items) -> list:
    """``[fn(x) for x in items]``, possibly concurrent; order is kept."""
    items = list(items)
    if _threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(_threads, len(items))) as ex:
        return list(ex.map(fn, items))
