"""
Coupled sample paths F_n(t) = integral of Q_n over [0, t] against lambda,
and the path statistics built on them.
"""

from typing import List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.badic.measures import interval_masses, is_lebesgue
from src.cascades import build_cascade
from src.cascades.badic_cascade import BadicCascade
from src.cascades.streams import StreamPurpose, derive_subseed
from src.config import settings
from src.exceptions import UnsupportedCombinationError
from src.models.cascade import BadicIndependentModel, LebesgueMeasure
from src.models.reports import MartingalePoint, MartingaleReport
from src.services.ensemble import ensemble_runner


class PathSample(BaseModel):
    """Generations of one realization on the uniform grid of M + 1 points.

    M = b^N for b-adic models and m_sub * b^N for cone models; row i of
    `values` holds F_n for n = kept[i].
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str = "cascade"
    family: str
    config_hash: str = ""
    seed: int
    replica: int = 0
    b: int
    n_max: int
    m_sub: int
    measure: str = "lebesgue"
    kept: List[int] = Field(..., description="Generations held in `values`, increasing")
    ts: np.ndarray = Field(..., description="Grid points j/M, j = 0..M")
    values: np.ndarray = Field(..., description="Complex array of shape (len(kept), M + 1)")

    @property
    def resolution(self) -> int:
        return len(self.ts) - 1

    @property
    def generations(self) -> List[int]:
        return list(self.kept)

    def generation(self, n: int) -> np.ndarray:
        """F_n on the full grid."""
        if n not in self.kept:
            raise ValueError(f"generation {n} not held (kept: {self.kept})")
        return self.values[self.kept.index(n)]

    def stride(self, n: int) -> int:
        """Grid points per generation-n interval."""
        return self.resolution // self.b ** n

    def restrict(self, n: int, generation: Optional[int] = None) -> np.ndarray:
        """F_generation (default F_n) on T_n."""
        generation = n if generation is None else generation
        return self.generation(generation)[:: self.stride(n)]


def _badic_paths(cascade: BadicCascade, measure, n_max: int, kept: List[int]) -> np.ndarray:
    b = cascade.b
    size = b ** n_max
    fine_masses = interval_masses(measure, n_max, b)
    cumulative = np.concatenate([[0.0], np.cumsum(fine_masses)])
    values = np.empty((len(kept), size + 1), dtype=complex)
    j = np.arange(size)

    for row, n in enumerate(kept):
        increments = interval_masses(measure, n, b) * cascade.Q_level(n)
        coarse = np.concatenate([[0.0], np.cumsum(increments)])
        block = b ** (n_max - n)
        w = j // block
        # F_n(t_j) = F_n(t_w) + Q_n(w) lambda([t_w, t_j)); exact on T_n
        values[row, :size] = coarse[w] + cascade.Q_level(n)[w] * (cumulative[j] - cumulative[w * block])
        values[row, size] = coarse[-1]
    return values


def _cone_paths(cascade, n_max: int, m_sub: int, kept: List[int]) -> np.ndarray:
    size = m_sub * cascade.b ** n_max
    left = np.arange(size) / float(size)
    values = np.empty((len(kept), size + 1), dtype=complex)
    # only the running product Q_n is held between generations
    q = np.ones(size, dtype=complex)
    for n in range(1, n_max + 1):
        q *= cascade.P_on_grid(left, n)
        if n in kept:
            row = kept.index(n)
            values[row, 0] = 0.0
            values[row, 1:] = np.cumsum(q) / size
    return values


def build_paths(model, measure=None, seed: Optional[int] = None, n_max: Optional[int] = None,
                m_sub: Optional[int] = None, replica: int = 0, name: str = "cascade",
                config_hash: str = "", keep: Optional[Sequence[int]] = None) -> PathSample:
    """F_1..F_{n_max} on one realization, or only the generations in `keep`.

    b-adic increments are exact, Delta F_n(I_w) = lambda(I_w) Q_n(I_w), and the
    grid is T_{n_max} (m_sub is not used). Cone families use left Riemann sums
    on m_sub points per generation-n_max interval and need Lebesgue measure.
    """
    measure = measure or LebesgueMeasure()
    seed = settings.default_seed if seed is None else seed
    n_max = n_max or settings.n_max
    m_sub = m_sub or settings.m_sub
    kept = sorted(set(keep)) if keep is not None else list(range(1, n_max + 1))
    if not kept or kept[0] < 1 or kept[-1] > n_max:
        raise ValueError(f"generations to keep must lie in [1, {n_max}], got {kept}")
    cascade = build_cascade(model, seed, replica=replica, depth=n_max)

    if isinstance(model, BadicIndependentModel):
        values = _badic_paths(cascade, measure, n_max, kept)
        m_sub = 1
    else:
        if not is_lebesgue(measure):
            raise UnsupportedCombinationError(f"{model.family} cascades need Lebesgue reference measure")
        values = _cone_paths(cascade, n_max, m_sub, kept)

    resolution = values.shape[1] - 1
    logger.debug(f"Built {model.family} paths: replica {replica}, n_max={n_max}, {resolution + 1} grid points")
    return PathSample(
        name=name,
        family=model.family,
        config_hash=config_hash,
        seed=seed,
        replica=replica,
        b=model.b,
        n_max=n_max,
        m_sub=m_sub,
        measure=measure.kind,
        kept=kept,
        ts=np.arange(resolution + 1) / float(resolution),
        values=values,
    )


def cauchy_increment(paths: PathSample, n: int) -> float:
    """max over T_n of |F_n(t) - F_{n-1}(t)|."""
    if n < 2:
        raise ValueError(f"cauchy increment needs n >= 2, got {n}")
    return float(np.max(np.abs(paths.restrict(n) - paths.restrict(n, generation=n - 1))))


def sup_norm_trajectory(paths: PathSample) -> np.ndarray:
    """Grid sup of |F_n| over the held generations."""
    return np.max(np.abs(paths.values), axis=1)


def total_variation(paths: PathSample, n: int) -> float:
    """Length of the polygon through F_n's grid values."""
    return float(np.sum(np.abs(np.diff(paths.generation(n)))))


def martingale_check(model, t_list: Sequence[float], n: int, replicas: int,
                     seed: Optional[int] = None) -> MartingaleReport:
    """Monte Carlo E Q_n(t) per t, flagged when it leaves the 1 + 0i band."""
    seed = settings.default_seed if seed is None else seed
    run_seed = derive_subseed(seed, StreamPurpose.MOMENT_CHECK, 1000 + n)
    sigmas = settings.confidence_sigmas

    def one_replica(replica: int) -> np.ndarray:
        cascade = build_cascade(model, run_seed, replica, depth=n)
        return np.array([cascade.eval_Q(t, n) for t in t_list], dtype=complex)

    means, stderrs = ensemble_runner.mean(one_replica, replicas)
    points = []
    for t, m, se in zip(t_list, means, stderrs):
        flagged = (abs(m.real - 1.0) > sigmas * se.real + 1e-12) or (abs(m.imag) > sigmas * se.imag + 1e-12)
        points.append(MartingalePoint(t=t, mean_re=m.real, mean_im=m.imag,
                                      stderr_re=se.real, stderr_im=se.imag, flagged=bool(flagged)))
        if flagged:
            logger.warning(f"E Q_{n}({t}) = {m:.6f} lies outside 1 +/- {sigmas} SE")
    return MartingaleReport(n=n, replicas=replicas, points=points)
