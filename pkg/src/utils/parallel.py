from typing import Any, Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from config import Config
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="PARALLEL")

T = TypeVar("T")


def worker_count(n_jobs: Optional[int] = None) -> int:
    """Explicit worker count, else the configured thread count; at least 1."""
    return max(1, n_jobs if n_jobs is not None else Config.get().threads)


def map_blocks(
    func: Callable[..., T],
    tasks: Iterable[Any],
    n_jobs: Optional[int] = None,
    label: str = "tasks",
) -> List[T]:
    """Evaluates ``func(task)`` for every task, in parallel when configured.

    Results come back in task order whatever the schedule, so reductions over
    them are independent of the worker count.

    Args:
        func (Callable[..., T]): Module-level function; must be picklable.
        tasks (Iterable[Any]): One argument tuple (or single argument) per call.
        n_jobs (Optional[int]): Worker count. Defaults to ``Config.get().threads``.
        label (str): Name used in the log line.

    Returns:
        List[T]: Results in task order.
    """
    task_list = list(tasks)
    workers = min(worker_count(n_jobs), len(task_list) or 1)
    logger.debug(f"Running {len(task_list)} {label} on {workers} worker(s)")
    if workers == 1:
        return [func(*task) if isinstance(task, tuple) else func(task) for task in task_list]
    return Parallel(n_jobs=workers)(
        delayed(func)(*task) if isinstance(task, tuple) else delayed(func)(task) for task in task_list
    )
