"""Deterministic parallel mapping over replicate chunks.

Work items carry their own indices, results are reassembled in submission
order, and every random stream is keyed by replicate index, so the output
is identical for any worker count.  Workers are separate processes; with
``threads <= 1`` everything runs inline.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

__all__ = ["parallel_map"]


def parallel_map(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
