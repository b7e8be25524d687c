"""Parallelism cap and a deterministic ordered map helper."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker cap from OLIVE_THREADS; falls back to the CPU count."""
    raw = os.environ.get("OLIVE_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"OLIVE_THREADS must be an integer, got {raw!r}")
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply fn to every item; results keep input order regardless of the
    worker count, so downstream reports are schedule-independent."""
    workers = min(thread_count(), max(1, len(items)))
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
