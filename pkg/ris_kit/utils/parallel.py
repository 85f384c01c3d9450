from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar
import logging
import threading

from ris_kit.config import get_worker_count

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_worker = threading.local()


def on_worker() -> bool:
    """True while running inside an ordered_map pool thread"""
    return getattr(_worker, "active", False)


def _flagged(fn: Callable[[T], R]) -> Callable[[T], R]:
    def call(item: T) -> R:
        _worker.active = True
        try:
            return fn(item)
        finally:
            _worker.active = False

    return call


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply fn to every item, possibly on a thread pool, and return the
    results in input order. Callers reduce the list sequentially, so the
    outcome does not depend on the worker count.

    Only the outermost call opens a pool; calls made from a pool thread run
    inline, so at most RIS_KIT_THREADS workers are alive at once.
    """
    items = list(items)
    workers = get_worker_count() if workers is None else max(1, workers)
    workers = min(workers, len(items)) if items else 1

    if workers <= 1 or on_worker():
        return [fn(item) for item in items]

    logger.debug(f"Dispatching {len(items)} tasks to {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_flagged(fn), items))
