"""
Base cascade class with the functionality shared by all three families.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from src.config import settings
from src.exceptions import CoverageError


class BaseCascade(ABC):
    """One realization omega of a cascade model.

    Level n holds the randomness behind P_n. Levels are sampled lazily from
    their own (seed, replica, n) stream and cached, so the realization can
    be deepened without touching what was already drawn.
    """

    family: str = ""

    def __init__(self, model, seed: int, replica: int = 0, depth: Optional[int] = None):
        self.model = model
        self.b = model.b
        self.seed = seed
        self.replica = replica
        self.depth = depth if depth is not None else settings.n_max
        self._levels: Dict[int, Any] = {}

    def _check_level(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"level must be >= 1, got {n}")
        if n > self.depth:
            raise CoverageError(f"level {n} exceeds realization depth {self.depth}")

    def level(self, n: int) -> Any:
        """Sampled randomness of level n."""
        self._check_level(n)
        if n not in self._levels:
            self._levels[n] = self._sample_level(n)
            logger.debug(f"{self.family} replica {self.replica}: sampled level {n}")
        return self._levels[n]

    @abstractmethod
    def _sample_level(self, n: int) -> Any:
        """Draw the randomness of level n from its own stream."""
        pass

    @abstractmethod
    def eval_P(self, t: float, n: int) -> complex:
        """P_n(t)."""
        pass

    @abstractmethod
    def P_on_grid(self, ts: np.ndarray, n: int) -> np.ndarray:
        """P_n on a sorted array of points of [0, 1]."""
        pass

    def eval_Q(self, t: float, n: int) -> complex:
        """Q_n(t) = P_1(t) ... P_n(t), multiplied in level order."""
        q = complex(1.0, 0.0)
        for k in range(1, n + 1):
            q = q * self.eval_P(t, k)
        return q

    def Q_on_grid(self, ts: np.ndarray, n: int) -> np.ndarray:
        q = np.ones(len(ts), dtype=complex)
        for k in range(1, n + 1):
            q = q * self.P_on_grid(ts, k)
        return q
