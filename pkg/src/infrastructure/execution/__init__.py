from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

from ..logger import get_logger


logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ShardExecutor:
    """Ordered map over independent tasks, in-process or across worker processes"""

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError("Worker count must be at least 1")
        self.workers = workers

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> List[R]:
        tasks = list(tasks)
        if self.workers == 1 or len(tasks) <= 1:
            logger.debug("Running %d tasks in-process", len(tasks))
            return [fn(task) for task in tasks]
        logger.debug("Running %d tasks on %d workers", len(tasks), self.workers)
        with ProcessPoolExecutor(max_workers=min(self.workers, len(tasks))) as pool:
            # results come back in submission order regardless of completion order
            return list(pool.map(fn, tasks))
