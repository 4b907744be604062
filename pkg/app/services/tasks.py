"""Fixed-size worker pool for prefix-partitioned enumeration tasks.

Tasks are independent and return their own partial results. Partial results
are folded into a running total in ascending task order, whatever the thread
count, so the caller gets the same reduction as a sequential run. At most a
small window of unmerged results is alive at any time.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")

WINDOW_PER_THREAD = 4


def fold_ordered(
    task_fn: Callable[[int], T],
    task_count: int,
    merge: Callable[[T, T], T],
    threads: int = 1,
) -> T:
    """Run ``task_fn(i)`` for every task index and left-fold the results.

    Args:
        task_fn: Callable taking the task index.
        task_count: Number of tasks.
        merge: Binary merge applied as ``merge(total, result)`` in task order.
        threads: Worker threads; 1 runs inline on the calling thread.

    Returns:
        The folded result.

    Raises:
        ValueError: If there are no tasks.
    """
    if task_count < 1:
        raise ValueError("No tasks to fold")

    if threads <= 1 or task_count == 1:
        total = task_fn(0)
        for index in range(1, task_count):
            total = merge(total, task_fn(index))
        return total

    window = threads * WINDOW_PER_THREAD
    logger.debug(
        "Dispatching %d tasks to %d workers, %d at a time", task_count, threads, window
    )
    total = None
    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="modcorr") as pool:
        for start in range(0, task_count, window):
            stop = min(start + window, task_count)
            for result in pool.map(task_fn, range(start, stop)):
                total = result if total is None else merge(total, result)
    return total
