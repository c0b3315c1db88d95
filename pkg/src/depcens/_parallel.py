"""Process-pool helper for embarrassingly parallel replicate work.

Jobs carry their own derived seeds, so results are identical for any
worker count; ordering of the returned list always matches the input.
"""

from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor


def map_parallel(fn, jobs, threads: int):
    jobs = list(jobs)
    if threads <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    ctx = mp.get_context("fork")
    chunk = max(1, len(jobs) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
        return list(pool.map(fn, jobs, chunksize=chunk))
