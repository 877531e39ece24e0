"""
Ordered map over independent work chunks.

Results come back in input order whatever the worker count, and every caller
merges them with order-insensitive reductions, so outputs do not depend on
the number of workers.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

import structlog

logger = structlog.get_logger("crnmix.parallel")

T = TypeVar("T")
R = TypeVar("R")


def run_chunks(fn: Callable[[T], R], chunks: Sequence[T], threads: int = 1) -> List[R]:
    """Apply fn to each chunk, inline for threads == 1, else in a process pool."""
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]

    workers = min(threads, len(chunks))
    logger.debug("worker_pool_started", workers=workers, chunks=len(chunks))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def split_range(total: int, parts: int) -> List[range]:
    """Contiguous blocks covering range(total); block boundaries depend only on parts."""
    parts = max(1, min(parts, total)) if total else 1
    size, extra = divmod(total, parts)
    blocks, start = [], 0
    for k in range(parts):
        stop = start + size + (1 if k < extra else 0)
        blocks.append(range(start, stop))
        start = stop
    return blocks
