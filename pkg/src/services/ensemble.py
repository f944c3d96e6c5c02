"""
Parallel Monte Carlo runner over independent replicas.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Tuple

import numpy as np
import psutil
from loguru import logger

from src.config import settings


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else CASCADE_THREADS, else one per physical core."""
    if threads is None:
        threads = settings.threads
    if threads and threads > 0:
        return threads
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def pairwise_sum(values: np.ndarray) -> np.ndarray:
    """Sum over the replica axis (axis 0) in numpy's pairwise order."""
    values = np.asarray(values)
    return np.ascontiguousarray(np.moveaxis(values, 0, -1)).sum(axis=-1)


def replica_mean(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over replicas; complex values get separate
    standard errors for the real and imaginary parts (stderr = re + i im)."""
    values = np.asarray(values)
    count = values.shape[0]
    mean = pairwise_sum(values) / count
    if count < 2:
        return mean, np.zeros_like(mean)

    def _stderr(part: np.ndarray, centre: np.ndarray) -> np.ndarray:
        return np.sqrt(pairwise_sum((part - centre) ** 2) / (count - 1) / count)

    if np.iscomplexobj(values):
        stderr = _stderr(values.real, mean.real) + 1j * _stderr(values.imag, mean.imag)
    else:
        stderr = _stderr(values, mean)
    return mean, stderr


class EnsembleRunner:
    """Evaluates a per-replica function on a thread pool.

    Results are collected by replica index, so the reduction never depends
    on scheduling.
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = resolve_threads(threads)

    def configure(self, threads: Optional[int]) -> None:
        self.threads = resolve_threads(threads)
        logger.debug(f"Ensemble runner uses {self.threads} threads")

    def map(self, func: Callable[[int], np.ndarray], replicas: int) -> np.ndarray:
        """Stack of func(0), ..., func(replicas - 1)."""
        if replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {replicas}")
        if self.threads == 1 or replicas == 1:
            results = [func(r) for r in range(replicas)]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(func, range(replicas)))
        return np.stack([np.asarray(result) for result in results])

    def mean(self, func: Callable[[int], np.ndarray], replicas: int) -> Tuple[np.ndarray, np.ndarray]:
        return replica_mean(self.map(func, replicas))


# Global ensemble runner
ensemble_runner = EnsembleRunner()
