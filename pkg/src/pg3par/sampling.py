"""Counter-based random streams and chunked parallel evaluation.

Sample ``k`` always comes from the same stream no matter how many workers
run, because streams are keyed by ``(seed, chunk index)`` through the
Philox counter and chunks have a fixed size.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_CHUNK = 256


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    # the high counter words select the stream, the low word counts within it
    counter = np.array([0, 0, chunk_index, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=int(seed) % 2**64, counter=counter))


def worker_count(workers=None) -> int:
    if workers is None:
        env = os.environ.get("PG3_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def map_chunks(fn, n: int, seed: int, chunk: int = DEFAULT_CHUNK, workers=None) -> list:
    """Run ``fn(rng, start, count)`` over fixed-size chunks of ``range(n)``.

    Results come back in chunk order.
    """
    starts = list(range(0, n, chunk))
    jobs = [(chunk_rng(seed, k), s, min(chunk, n - s)) for k, s in enumerate(starts)]
    workers = min(worker_count(workers), max(1, len(jobs)))
    if workers == 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
