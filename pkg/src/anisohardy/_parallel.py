"""Worker-count control and order-stable reductions."""

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def worker_count():
    env = os.environ.get("ANISOHARDY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pairwise_sum(values):
    """Sum along the first axis with a fixed binary tree.

    The tree shape depends only on the length of `values`, so the result is
    bit-identical however the entries were produced.
    """
    a = np.asarray(values, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(a.shape[1:])
    while n > 1:
        half = n // 2
        head = a[: 2 * half : 2] + a[1 : 2 * half : 2]
        a = np.concatenate([head, a[2 * half :]]) if n % 2 else head
        n = a.shape[0]
    return a[0]


def map_chunks(func, n, chunk):
    """Apply ``func(start, stop)`` over ``range(n)`` in chunks; results keep chunk order."""
    bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    workers = min(worker_count(), len(bounds))
    if workers <= 1:
        return [func(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: func(*ab), bounds))


def chunk_size(n_total, per_item, budget=2_000_000):
    """Number of items per chunk so one chunk holds about `budget` scalars."""
    return max(1, min(n_total, int(math.ceil(budget / max(per_item, 1)))))
