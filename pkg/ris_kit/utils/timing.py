from contextlib import contextmanager
import logging
import time

logger = logging.getLogger(__name__)


class Stopwatch:
    elapsed: float = 0.0


@contextmanager
def timed(label: str):
    """
    Context manager measuring wall time of a block.
    The elapsed seconds are logged and exposed on the yielded Stopwatch.
    """
    watch = Stopwatch()
    start = time.perf_counter()
    try:
        yield watch
    except Exception as e:
        logger.error(f"{label} failed after {time.perf_counter() - start:.3f}s: {str(e)}")
        raise
    finally:
        watch.elapsed = time.perf_counter() - start
    logger.debug(f"{label} took {watch.elapsed:.3f}s")
