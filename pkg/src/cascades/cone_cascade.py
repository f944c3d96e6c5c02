"""
Truncated cones in the time-scale half plane and the base class of the
cone-driven families (compound Poisson and log-infinitely divisible).
"""

import math
from abc import abstractmethod
from typing import Dict, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.cascades.base_cascade import BaseCascade
from src.cascades.intensity import band_first_moment
from src.exceptions import CoverageError
from src.models.cascade import CompoundPoissonModel, LogInfDivisibleModel

ConeModel = Union[CompoundPoissonModel, LogInfDivisibleModel]


class Cone(BaseModel):
    """DeltaC_n(t) = {(t', r): b^-n < r <= b^(1-n), t - beta r/2 <= t' < t + beta r/2}."""

    model_config = ConfigDict(frozen=True)

    t: float
    n: int = Field(..., ge=1)
    beta: float = Field(..., gt=0.0)
    b: int = Field(..., ge=2)

    @property
    def r_low(self) -> float:
        return float(self.b) ** (-self.n)

    @property
    def r_high(self) -> float:
        return float(self.b) ** (1 - self.n)

    def contains(self, t_prime: float, r: float) -> bool:
        if not self.r_low < r <= self.r_high:
            return False
        half = self.beta * r / 2.0
        return self.t - half <= t_prime < self.t + half

    def contains_points(self, t_prime: np.ndarray, r: np.ndarray) -> np.ndarray:
        half = self.beta * r / 2.0
        return (r > self.r_low) & (r <= self.r_high) & (t_prime >= self.t - half) & (t_prime < self.t + half)


def cone(t: float, n: int, beta: float, b: int) -> Cone:
    return Cone(t=t, n=n, beta=beta, b=b)


def band(n: int, b: int) -> Tuple[float, float]:
    """Scale band (b^-n, b^(1-n)] of level n."""
    return float(b) ** (-n), float(b) ** (1 - n)


def cone_measure(model: ConeModel, t: float, n: int) -> float:
    """Lambda(DeltaC_n(t)) = beta * integral of r nu(dr) over the level-n band.

    The value does not depend on t; the strip covers every cone with t in [0, 1].
    """
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    lo, hi = band(n, model.b)
    return model.beta * band_first_moment(model.intensity, lo, hi)


class ConeCascade(BaseCascade):
    """Cascade driven by a random measure on the strip [-beta/2, 1 + beta/2] x (0, 1]."""

    def __init__(self, model: ConeModel, seed: int, replica: int = 0, depth=None):
        super().__init__(model, seed, replica, depth)
        self.beta = model.beta
        self.strip = (-self.beta / 2.0, 1.0 + self.beta / 2.0)
        self._measures: Dict[int, float] = {}

    @property
    def strip_length(self) -> float:
        return self.strip[1] - self.strip[0]

    def level_measure(self, n: int) -> float:
        """Lambda_n = Lambda(DeltaC_n(t)), the same for every t."""
        if n not in self._measures:
            self._measures[n] = cone_measure(self.model, 0.5, n)
        return self._measures[n]

    def _check_location(self, ts) -> None:
        values = np.atleast_1d(np.asarray(ts, dtype=float))
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise CoverageError("cones of points outside [0, 1] leave the sampled strip")

    def cone(self, t: float, n: int) -> Cone:
        return cone(t, n, self.beta, self.b)

    @abstractmethod
    def log_moment_rate(self, p: float) -> float:
        """kappa(p) with E|P_n(t)|^p = exp(Lambda_n kappa(p))."""
        pass

    def log_moment(self, n: int, p: float) -> float:
        """log E|Q_n(t)|^p, exact from the independence of the level bands."""
        kappa = self.log_moment_rate(p)
        return math.fsum(self.level_measure(k) * kappa for k in range(1, n + 1))
