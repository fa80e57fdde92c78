"""Ordered parallel map over independent tasks."""

import logging
import os
from typing import Callable, Iterable, Optional, TypeVar

from joblib import Parallel, delayed

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    """Hardware parallelism, at least one."""
    return max(1, os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> list[R]:
    """Apply ``fn`` to every item and return the results in input order.

    Tasks run on joblib threads (numpy releases the GIL inside BLAS/LAPACK).
    Result order never depends on scheduling, so any reduction over the
    returned list is reproducible.
    """
    items = list(items)
    n_jobs = default_workers() if workers is None else workers
    if n_jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug("running %d tasks on %d workers", len(items), n_jobs)
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(fn)(item) for item in items)
