"""
b-adic independent cascades.
"""

from typing import Dict, Optional, Sequence

import numpy as np

from src.badic import locate
from src.cascades.base_cascade import BaseCascade
from src.cascades.streams import StreamPurpose, derive_stream
from src.models.cascade import BadicIndependentModel
from src.weights import sample_vectors


class BadicCascade(BaseCascade):
    """P_n(t) = W^(n-1)_{t_n}(t|n-1).

    Level n stores the weight vectors of the b^(n-1) nodes of generation n-1
    as an array of shape (b^(n-1), b); row = node index, column = digit.
    """

    family = "badic"

    def __init__(self, model: BadicIndependentModel, seed: int, replica: int = 0, depth: Optional[int] = None):
        super().__init__(model, seed, replica, depth)
        self._q_levels: Dict[int, np.ndarray] = {0: np.ones(1, dtype=complex)}

    @classmethod
    def from_weights(cls, model: BadicIndependentModel, weights: Sequence[np.ndarray]) -> "BadicCascade":
        """Realization with prescribed weight vectors; weights[k] has shape (b^k, b)."""
        cascade = cls(model, seed=0, depth=len(weights))
        for k, level in enumerate(weights):
            array = np.asarray(level, dtype=complex).reshape(model.b ** k, model.b)
            cascade._levels[k + 1] = array
        return cascade

    def _sample_level(self, n: int) -> np.ndarray:
        rng = derive_stream(self.seed, StreamPurpose.BADIC_WEIGHTS, self.replica, n)
        return sample_vectors(self.model.vector_law(n - 1), self.b, rng, self.b ** (n - 1))

    def weights(self, n: int) -> np.ndarray:
        """Weight vectors W^(n-1)(w), w in A^(n-1)."""
        return self.level(n)

    def factor(self, n: int) -> np.ndarray:
        """P_n on A^n, indexed by word rank."""
        return self.level(n).reshape(-1)

    def Q_level(self, n: int) -> np.ndarray:
        """Q_n on A^n, indexed by word rank."""
        if n not in self._q_levels:
            self._q_levels[n] = np.repeat(self.Q_level(n - 1), self.b) * self.factor(n)
        return self._q_levels[n]

    def eval_P(self, t: float, n: int) -> complex:
        return complex(self.factor(n)[locate(t, n, self.b).index])

    def eval_Q(self, t: float, n: int) -> complex:
        if n == 0:
            return complex(1.0, 0.0)
        return complex(self.Q_level(n)[locate(t, n, self.b).index])

    def _indices(self, ts: np.ndarray, n: int) -> np.ndarray:
        size = self.b ** n
        return np.minimum(np.floor(np.asarray(ts) * size).astype(np.int64), size - 1)

    def P_on_grid(self, ts: np.ndarray, n: int) -> np.ndarray:
        return self.factor(n)[self._indices(ts, n)]

    def Q_on_grid(self, ts: np.ndarray, n: int) -> np.ndarray:
        return self.Q_level(n)[self._indices(ts, n)]
