"""Map jobs onto workers with order-preserving results.

Tasks passed to ``map`` must be picklable (module-level functions) when a
``ProcessController`` is used. Results always come back in input order, so
the reduction step sees the same sequence whatever the worker count.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from config import DEFAULT_WORKERS, SHOW_PROGRESS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ParallelController:
    """Maps a task over items; subclasses choose how."""

    def __init__(self, progress: Optional[bool] = None, desc: str = "") -> None:
        self.progress = SHOW_PROGRESS if progress is None else progress
        self.desc = desc

    def setup(self) -> None:
        pass

    def map(self, task: Callable[[T], R], items: Sequence[T]) -> List[R]:
        raise NotImplementedError()

    def reduce(self, reduce_task: Callable[[List[R]], object], outs: List[R]):
        return reduce_task(outs)

    def map_reduce(self, task: Callable[[T], R], reduce_task: Callable[[List[R]], object], items: Sequence[T]):
        return self.reduce(reduce_task, self.map(task, items))

    def teardown(self) -> None:
        pass

    def _bar(self, iterable: Iterable, total: int):
        return tqdm(iterable, total=total, desc=self.desc or type(self).__name__, disable=not self.progress)


class SerialController(ParallelController):
    def map(self, task: Callable[[T], R], items: Sequence[T]) -> List[R]:
        return [task(x) for x in self._bar(items, len(items))]


class ProcessController(ParallelController):
    """Process pool; ``Executor.map`` keeps input order."""

    def __init__(self, workers: int, progress: Optional[bool] = None, desc: str = "", chunksize: int = 16) -> None:
        super().__init__(progress, desc)
        if workers < 1:
            raise ValueError(f"worker count must be positive, got {workers}")
        self.workers = workers
        self.chunksize = chunksize
        self._pool: Optional[ProcessPoolExecutor] = None

    def setup(self) -> None:
        if self._pool is None:
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
            logger.debug("started process pool with %d workers", self.workers)

    def map(self, task: Callable[[T], R], items: Sequence[T]) -> List[R]:
        self.setup()
        results = self._pool.map(task, items, chunksize=self.chunksize)
        return list(self._bar(results, len(items)))

    def teardown(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


def controller_for(workers: Optional[int] = None, desc: str = "", progress: Optional[bool] = None) -> ParallelController:
    """Serial for one worker, a process pool otherwise."""
    workers = DEFAULT_WORKERS if workers is None else workers
    if workers <= 1:
        return SerialController(progress, desc)
    return ProcessController(workers, progress, desc)


def map_reduce(task: Callable[[T], R], reduce_function: Callable[[List[R]], object], items: Sequence[T], controller: ParallelController):
    controller.setup()
    try:
        return controller.map_reduce(task, reduce_function, items)
    finally:
        controller.teardown()


def parallel_map(task: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None, desc: str = "") -> List[R]:
    """Ordered map through ``controller_for``."""
    items = list(items)
    return map_reduce(task, list, items, controller_for(workers, desc))


__all__ = [
    "ParallelController",
    "ProcessController",
    "SerialController",
    "controller_for",
    "map_reduce",
    "parallel_map",
]
