"""
Data models for cascade families, reference measures and run configurations.
"""

import math
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import DEFAULT_Q_LIST, EPSILON_SCHEDULE, TRACE_GENERATIONS, settings
from src.models.laws import (
    IntensitySpec,
    JumpAtom,
    ScaleInvariantIntensity,
    WeightLaw,
    WeightVectorLaw,
)

PSD_TOLERANCE = 1e-12


class _Strict(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class BadicIndependentModel(_Strict):
    """b-adic independent cascade; level k uses levels[k % len(levels)]."""
    family: Literal["badic"] = "badic"
    b: int = Field(default=2, ge=2)
    levels: List[WeightVectorLaw] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_sizes(self) -> "BadicIndependentModel":
        for k, vector_law in enumerate(self.levels):
            size = vector_law.size()
            if size is not None and size != self.b:
                raise ValueError(f"level {k}: weight vector has {size} components, expected b={self.b}")
        return self

    @property
    def homogeneous(self) -> bool:
        return len(self.levels) == 1

    def vector_law(self, k: int) -> WeightVectorLaw:
        """Law of W^(k), the vectors attached to nodes of generation k."""
        return self.levels[k % len(self.levels)]


class CompoundPoissonModel(_Strict):
    """Compound Poisson cascade with cones of aperture beta."""
    family: Literal["compound_poisson"] = "compound_poisson"
    b: int = Field(default=2, ge=2)
    beta: float = Field(default=1.0, gt=0.0)
    intensity: IntensitySpec = Field(default_factory=ScaleInvariantIntensity)
    weight: WeightLaw

    @property
    def scale_invariant(self) -> bool:
        return isinstance(self.intensity, ScaleInvariantIntensity)


class LogInfDivisibleModel(_Strict):
    """Log-infinitely divisible cascade (beta = delta = 1, nu(dr) = dr/r^2).

    The Levy exponent is given by a drift a, a Gaussian form Q and a finite
    atomic jump measure pi.
    """
    family: Literal["log_infinitely_divisible"] = "log_infinitely_divisible"
    b: int = Field(default=2, ge=2)
    drift: Tuple[float, float] = (0.0, 0.0)
    gaussian: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0))
    jumps: List[JumpAtom] = Field(default_factory=list)
    m_cells: int = Field(default_factory=lambda: settings.m_cells, ge=1)

    @field_validator("gaussian")
    @classmethod
    def _check_psd(cls, value):
        matrix = np.asarray(value, dtype=float)
        if not np.allclose(matrix, matrix.T, atol=PSD_TOLERANCE):
            raise ValueError("Gaussian form Q must be symmetric")
        if np.linalg.eigvalsh(matrix).min() < -PSD_TOLERANCE:
            raise ValueError("Gaussian form Q must be positive semidefinite")
        return value

    @property
    def beta(self) -> float:
        return 1.0

    @property
    def intensity(self) -> ScaleInvariantIntensity:
        return ScaleInvariantIntensity(delta=1.0)

    @property
    def scale_invariant(self) -> bool:
        return True


CascadeModel = Annotated[
    Union[BadicIndependentModel, CompoundPoissonModel, LogInfDivisibleModel],
    Field(discriminator="family"),
]


class LebesgueMeasure(_Strict):
    kind: Literal["lebesgue"] = "lebesgue"

    def vector(self, k: int, b: int) -> List[float]:
        return [1.0 / b] * b


class InhomogeneousBernoulliMeasure(_Strict):
    """lambda(I_w) = prod_k lambda^(k)_{w_{k+1}}, vectors used cyclically."""
    kind: Literal["bernoulli"] = "bernoulli"
    vectors: List[List[float]] = Field(..., min_length=1)

    @field_validator("vectors")
    @classmethod
    def _check_probability_vectors(cls, value):
        for k, vector in enumerate(value):
            if any(x < 0.0 for x in vector):
                raise ValueError(f"lambda^({k}) has negative entries")
            total = math.fsum(vector)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"lambda^({k}) sums to {total}, expected 1")
        if len({len(vector) for vector in value}) != 1:
            raise ValueError("all probability vectors must have the same length")
        return value

    def vector(self, k: int, b: int) -> List[float]:
        vector = self.vectors[k % len(self.vectors)]
        if len(vector) != b:
            raise ValueError(f"probability vectors have length {len(vector)}, expected b={b}")
        return vector


ReferenceMeasure = Annotated[
    Union[LebesgueMeasure, InhomogeneousBernoulliMeasure],
    Field(discriminator="kind"),
]


class SimulateOptions(_Strict):
    generations: List[int] = Field(default_factory=lambda: list(TRACE_GENERATIONS), min_length=1)


class PhiOptions(_Strict):
    empirical: bool = True
    empirical_p: List[float] = Field(default_factory=lambda: [0.5, 1.5, 2.0])
    n_range: Tuple[int, int] = (2, 8)
    replicas: Optional[int] = Field(default=None, ge=100)


class SpectrumOptions(_Strict):
    n_range: Optional[Tuple[int, int]] = None
    epsilons: List[float] = Field(default_factory=lambda: list(EPSILON_SCHEDULE), min_length=1)
    h_min: float = 0.0
    h_max: float = 2.0
    h_step: float = Field(default=0.025, gt=0.0)
    q_list: List[float] = Field(default_factory=lambda: list(DEFAULT_Q_LIST))
    holder_points: List[float] = Field(default_factory=list, description="Locations t for pointwise Holder exponents")

    @field_validator("q_list")
    @classmethod
    def _check_q_list(cls, value):
        if any(not 0.0 <= q <= 2.0 for q in value):
            raise ValueError("structure exponent orders must lie in [0, 2]")
        return value

    @field_validator("holder_points")
    @classmethod
    def _check_holder_points(cls, value):
        if any(not 0.0 <= t < 1.0 for t in value):
            raise ValueError("Holder points must lie in [0, 1)")
        return value


class VerifyOptions(_Strict):
    t_list: List[float] = Field(default_factory=lambda: [1.0 / 3.0, 0.7])
    n_values: List[int] = Field(default_factory=lambda: [2, 4])
    trend_range: Tuple[int, int] = (4, 8)
    ratio_range: Tuple[int, int] = (2, 8)
    replicas: Optional[int] = Field(default=None, ge=100)


class RunConfig(_Strict):
    """One run: a model, a reference measure, a seed and per-command options."""
    name: str = "cascade"
    model: CascadeModel
    measure: ReferenceMeasure = Field(default_factory=LebesgueMeasure)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0, lt=2**64)
    n_max: int = Field(default_factory=lambda: settings.n_max, ge=1)
    m_sub: int = Field(default_factory=lambda: settings.m_sub, ge=1)
    replicas: int = Field(default_factory=lambda: settings.replicas, ge=1)
    p_grid: Optional[List[float]] = None
    simulate: SimulateOptions = Field(default_factory=SimulateOptions)
    phi: PhiOptions = Field(default_factory=PhiOptions)
    spectrum: SpectrumOptions = Field(default_factory=SpectrumOptions)
    verify: VerifyOptions = Field(default_factory=VerifyOptions)
    output_dir: Optional[str] = None

    @field_validator("p_grid")
    @classmethod
    def _check_p_grid(cls, value):
        if value is not None:
            if any(p <= 0.0 or p > 2.0 for p in value):
                raise ValueError("p-grid points must lie in (0, 2]")
            if list(value) != sorted(set(value)):
                raise ValueError("p-grid must be strictly increasing")
        return value

    @model_validator(mode="after")
    def _check_generations(self) -> "RunConfig":
        for n in self.simulate.generations:
            if not 1 <= n <= self.n_max:
                raise ValueError(f"generation {n} outside [1, n_max={self.n_max}]")
        return self
