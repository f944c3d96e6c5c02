"""
Compound Poisson cascades.
"""

from typing import NamedTuple

import numpy as np

from src.cascades.cone_cascade import ConeCascade, band
from src.cascades.intensity import sample_band
from src.cascades.streams import StreamPurpose, derive_stream
from src.models.cascade import CompoundPoissonModel
from src.weights import abs_moment, mean, sample


class PoissonLevel(NamedTuple):
    t_prime: np.ndarray
    r: np.ndarray
    marks: np.ndarray


class PoissonCascade(ConeCascade):
    """P_n(t) = exp(-Lambda_n (E W - 1)) * product of the marks W_M over M in DeltaC_n(t)."""

    family = "compound_poisson"

    def __init__(self, model: CompoundPoissonModel, seed: int, replica: int = 0, depth=None):
        super().__init__(model, seed, replica, depth)
        self.weight_mean = mean(model.weight)

    def _sample_level(self, n: int) -> PoissonLevel:
        rng = derive_stream(self.seed, StreamPurpose.POISSON_POINTS, self.replica, n)
        lo, hi = band(n, self.b)
        r = sample_band(self.model.intensity, lo, hi, self.strip_length, rng)
        t_prime = rng.uniform(self.strip[0], self.strip[1], len(r))
        marks = sample(self.model.weight, rng, len(r))
        return PoissonLevel(t_prime=t_prime, r=r, marks=marks)

    def normalizer(self, n: int) -> complex:
        return complex(np.exp(-self.level_measure(n) * (self.weight_mean - 1.0)))

    def points_in_cone(self, t: float, n: int) -> np.ndarray:
        """Mask of the level-n points lying in DeltaC_n(t)."""
        self._check_location(t)
        level = self.level(n)
        return self.cone(t, n).contains_points(level.t_prime, level.r)

    def point_count(self, t: float, n: int) -> int:
        return int(self.points_in_cone(t, n).sum())

    def eval_P(self, t: float, n: int) -> complex:
        mask = self.points_in_cone(t, n)
        return self.normalizer(n) * complex(np.prod(self.level(n).marks[mask]))

    def P_on_grid(self, ts: np.ndarray, n: int) -> np.ndarray:
        """Point (t', r) covers t iff t' - beta r/2 < t <= t' + beta r/2; per-point
        coverage becomes an index range on the sorted grid, accumulated as
        difference arrays of zero counts, log-moduli and phases."""
        ts = np.asarray(ts, dtype=float)
        self._check_location(ts)
        level = self.level(n)
        half = self.beta * level.r / 2.0
        start = np.searchsorted(ts, level.t_prime - half, side="right")
        end = np.searchsorted(ts, level.t_prime + half, side="right")

        size = len(ts) + 1
        is_zero = level.marks == 0
        moduli = np.abs(level.marks)
        log_moduli = np.log(np.where(is_zero, 1.0, moduli))
        phases = np.angle(level.marks)

        zeros = np.bincount(start, weights=is_zero, minlength=size) - np.bincount(end, weights=is_zero, minlength=size)
        logs = np.bincount(start, weights=log_moduli, minlength=size) - np.bincount(end, weights=log_moduli, minlength=size)
        angles = np.bincount(start, weights=phases, minlength=size) - np.bincount(end, weights=phases, minlength=size)

        zero_count = np.cumsum(zeros)[:-1]
        product = np.exp(np.cumsum(logs)[:-1] + 1j * np.cumsum(angles)[:-1])
        product[zero_count > 0.5] = 0.0
        return self.normalizer(n) * product

    def log_moment_rate(self, p: float) -> float:
        """E|W|^p - 1 - p Re(E W - 1)."""
        return abs_moment(self.model.weight, p) - 1.0 - p * (self.weight_mean.real - 1.0)
