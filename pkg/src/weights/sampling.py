"""
Samplers and moment oracles for complex weight laws.
"""

import json
import math
from typing import Dict, Optional, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel
from scipy import integrate

from src.config import settings
from src.exceptions import InfiniteMomentError
from src.models.laws import (
    Atom,
    DeterministicLaw,
    FiniteAtomicLaw,
    GaussianPerturbedLaw,
    LogNormalPhaseLaw,
    UnitMeanScaledLaw,
    WeightLaw,
    WeightVectorLaw,
)

Size = Union[None, int, Tuple[int, ...]]


class MomentEstimate(BaseModel):
    """E|W|^p with its standard error and the method that produced it."""
    value: float
    stderr: float = 0.0
    method: str = "closed-form"


def reduce_law(law: WeightLaw) -> WeightLaw:
    """Rewrites a unit-mean wrapper into an equivalent plain law where one exists."""
    if not isinstance(law, UnitMeanScaledLaw):
        return law

    base = reduce_law(law.base)
    if isinstance(base, GaussianPerturbedLaw):
        return base

    m = mean(base)
    if isinstance(base, DeterministicLaw):
        return DeterministicLaw(value=1.0)
    if isinstance(base, FiniteAtomicLaw):
        if law.mode == "divide":
            _check_nonzero_mean(m)
            values = [atom.value / m for atom in base.atoms]
        else:
            values = [atom.value - m + 1.0 for atom in base.atoms]
        return FiniteAtomicLaw(atoms=[Atom(value=v, probability=atom.probability)
                                      for v, atom in zip(values, base.atoms)])
    if isinstance(base, LogNormalPhaseLaw) and law.mode == "divide":
        return LogNormalPhaseLaw(sigma=base.sigma, tau=base.tau)

    return UnitMeanScaledLaw(base=base, mode=law.mode)


def _check_nonzero_mean(m: complex) -> None:
    if m == 0:
        raise ValueError("cannot rescale a law with zero mean to unit mean")


def mean(law: WeightLaw) -> complex:
    """E(W), analytic for every law of the catalog."""
    if isinstance(law, DeterministicLaw):
        return complex(law.value)
    if isinstance(law, FiniteAtomicLaw):
        return complex(math.fsum(a.probability * a.value.real for a in law.atoms),
                       math.fsum(a.probability * a.value.imag for a in law.atoms))
    if isinstance(law, GaussianPerturbedLaw):
        return complex(1.0, 0.0)
    if isinstance(law, LogNormalPhaseLaw):
        return complex(math.exp(law.location + law.sigma ** 2 / 2.0 - law.tau ** 2 / 2.0), 0.0)
    if isinstance(law, UnitMeanScaledLaw):
        if law.mode == "divide":
            _check_nonzero_mean(mean(law.base))
        return complex(1.0, 0.0)
    raise TypeError(f"unknown weight law {type(law).__name__}")


def mean_real_part(law: WeightLaw) -> float:
    """E(Re W)."""
    return mean(law).real


def is_unit_mean(law: WeightLaw, tolerance: float = 1e-9) -> bool:
    return abs(mean(law) - 1.0) <= tolerance


def sample(law: WeightLaw, rng: np.random.Generator, size: Size = None):
    """Draws from `law`; a complex scalar when size is None, else a complex array."""
    if size is None:
        return complex(sample(law, rng, 1)[0])

    if isinstance(law, DeterministicLaw):
        return np.full(size, complex(law.value), dtype=complex)

    if isinstance(law, FiniteAtomicLaw):
        values = np.array([atom.value for atom in law.atoms], dtype=complex)
        probabilities = np.array([atom.probability for atom in law.atoms])
        return values[rng.choice(len(values), size=size, p=probabilities / probabilities.sum())]

    if isinstance(law, GaussianPerturbedLaw):
        return 1.0 + 1j * law.sigma * rng.standard_normal(size)

    if isinstance(law, LogNormalPhaseLaw):
        modulus = rng.standard_normal(size)
        phase = rng.standard_normal(size)
        return np.exp(law.location + law.sigma * modulus + 1j * law.tau * phase)

    if isinstance(law, UnitMeanScaledLaw):
        draws = sample(law.base, rng, size)
        m = mean(law.base)
        if law.mode == "divide":
            _check_nonzero_mean(m)
            return draws / m
        return draws - m + 1.0

    raise TypeError(f"unknown weight law {type(law).__name__}")


class MomentOracle:
    """Absolute moments E|W|^p, cached per (law, p)."""

    def __init__(self, mc_samples: Optional[int] = None, mc_seed: Optional[int] = None):
        self.mc_samples = mc_samples or settings.moment_mc_samples
        self.mc_seed = settings.moment_mc_seed if mc_seed is None else mc_seed
        self._cache: Dict[Tuple[str, float], MomentEstimate] = {}

    def estimate(self, law: WeightLaw, p: float) -> MomentEstimate:
        if p < 0:
            raise ValueError(f"moment order must be >= 0, got {p}")
        if p == 0:
            return MomentEstimate(value=1.0)

        key = (json.dumps(law.model_dump(mode="json"), sort_keys=True), float(p))
        if key not in self._cache:
            result = self._compute(reduce_law(law), p)
            if not math.isfinite(result.value):
                raise InfiniteMomentError(law.kind, p)
            self._cache[key] = result
        return self._cache[key]

    def _compute(self, law: WeightLaw, p: float) -> MomentEstimate:
        if isinstance(law, DeterministicLaw):
            return MomentEstimate(value=abs(complex(law.value)) ** p)

        if isinstance(law, FiniteAtomicLaw):
            value = math.fsum(atom.probability * abs(atom.value) ** p for atom in law.atoms)
            return MomentEstimate(value=value)

        if isinstance(law, LogNormalPhaseLaw):
            return MomentEstimate(value=math.exp(p * law.location + p * p * law.sigma ** 2 / 2.0))

        if isinstance(law, GaussianPerturbedLaw):
            return self._gaussian_perturbed(law.sigma, p)

        return self._monte_carlo(law, p)

    @staticmethod
    def _gaussian_perturbed(sigma: float, p: float) -> MomentEstimate:
        if sigma == 0.0:
            return MomentEstimate(value=1.0)
        if p == 2.0:
            return MomentEstimate(value=1.0 + sigma ** 2)

        def integrand(x: float) -> float:
            return (1.0 + sigma * sigma * x * x) ** (p / 2.0) * math.exp(-x * x / 2.0)

        value, error = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
        norm = math.sqrt(2.0 * math.pi)
        return MomentEstimate(value=value / norm, stderr=error / norm, method="quadrature")

    def _monte_carlo(self, law: WeightLaw, p: float) -> MomentEstimate:
        logger.warning(f"No closed form for E|W|^{p} under '{law.kind}', "
                       f"using {self.mc_samples} Monte Carlo draws")
        rng = np.random.default_rng(np.random.SeedSequence(self.mc_seed))
        values = np.abs(sample(law, rng, self.mc_samples)) ** p
        return MomentEstimate(
            value=float(values.mean()),
            stderr=float(values.std(ddof=1) / math.sqrt(len(values))),
            method="monte-carlo",
        )


# Global moment oracle
moment_oracle = MomentOracle()


def abs_moment(law: WeightLaw, p: float) -> float:
    """E|W|^p."""
    return moment_oracle.estimate(law, p).value


def moment_estimate(law: WeightLaw, p: float) -> MomentEstimate:
    return moment_oracle.estimate(law, p)


def sample_vectors(vector_law: WeightVectorLaw, b: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` independent weight vectors, shape (count, b)."""
    if vector_law.law is not None:
        return sample(vector_law.law, rng, (count, b))
    if vector_law.components is not None:
        return np.stack([sample(law, rng, count) for law in vector_law.components], axis=1)
    table = np.array([atom.values for atom in vector_law.atoms], dtype=complex)
    probabilities = np.array([atom.probability for atom in vector_law.atoms])
    return table[rng.choice(len(table), size=count, p=probabilities / probabilities.sum())]


def vector_abs_moments(vector_law: WeightVectorLaw, b: int, p: float) -> np.ndarray:
    """(E|W_0|^p, ..., E|W_{b-1}|^p)."""
    return np.array([abs_moment(vector_law.marginal(i), p) for i in range(b)])


def vector_means(vector_law: WeightVectorLaw, b: int) -> np.ndarray:
    return np.array([mean(vector_law.marginal(i)) for i in range(b)], dtype=complex)
