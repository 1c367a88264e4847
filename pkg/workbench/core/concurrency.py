from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import structlog

from workbench.core.config import settings

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """Apply fn to every item; results keep the input order"""
    items = list(items)
    workers = threads or settings.THREADS
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug("dispatching cells", cells=len(items), workers=workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
