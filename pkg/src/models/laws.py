"""
Data models for complex weight laws, weight vectors and intensity measures.
"""

import math
from typing import Annotated, Any, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    WithJsonSchema,
    model_validator,
)

PROBABILITY_TOLERANCE = 1e-12


def _parse_complex(value: Any) -> complex:
    if isinstance(value, bool):
        raise ValueError("booleans are not complex numbers")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    raise ValueError(f"cannot read {value!r} as a complex number")


Complex = Annotated[
    Any,
    BeforeValidator(_parse_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
    WithJsonSchema({
        "anyOf": [
            {"type": "number"},
            {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            {"type": "string"},
        ],
        "description": "Complex number as [re, im], a real number, or a string like '1+0.5j'",
    }),
]


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DeterministicLaw(_Frozen):
    """W is the constant `value`."""
    kind: Literal["deterministic"] = "deterministic"
    value: Complex = Field(default=1.0, validate_default=True)


class Atom(_Frozen):
    value: Complex
    probability: float = Field(..., ge=0.0, le=1.0)


class FiniteAtomicLaw(_Frozen):
    """W takes finitely many complex values."""
    kind: Literal["atomic"] = "atomic"
    atoms: List[Atom] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_probabilities(self) -> "FiniteAtomicLaw":
        total = math.fsum(atom.probability for atom in self.atoms)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"atom probabilities sum to {total}, expected 1")
        return self


class GaussianPerturbedLaw(_Frozen):
    """W = 1 + i sigma N with N standard normal."""
    kind: Literal["gaussian_perturbed"] = "gaussian_perturbed"
    sigma: float = Field(..., ge=0.0)


class LogNormalPhaseLaw(_Frozen):
    """W = exp(mu + sigma N + i tau N'); mu defaults to the unit-mean value."""
    kind: Literal["lognormal_phase"] = "lognormal_phase"
    sigma: float = Field(default=0.0, ge=0.0)
    tau: float = 0.0
    mu: Optional[float] = Field(default=None, description="None selects -sigma^2/2 + tau^2/2")

    @property
    def location(self) -> float:
        if self.mu is not None:
            return self.mu
        return -self.sigma ** 2 / 2.0 + self.tau ** 2 / 2.0


class UnitMeanScaledLaw(_Frozen):
    """Wraps a base law B and corrects it to unit mean.

    mode="divide": W = B / E(B); mode="shift": W = B - E(B) + 1.
    """
    kind: Literal["unit_mean_scaled"] = "unit_mean_scaled"
    base: "WeightLaw"
    mode: Literal["divide", "shift"] = "divide"


WeightLaw = Annotated[
    Union[DeterministicLaw, FiniteAtomicLaw, GaussianPerturbedLaw, LogNormalPhaseLaw, UnitMeanScaledLaw],
    Field(discriminator="kind"),
]

UnitMeanScaledLaw.model_rebuild()


class VectorAtom(_Frozen):
    values: List[Complex] = Field(..., min_length=2)
    probability: float = Field(..., ge=0.0, le=1.0)


class WeightVectorLaw(_Frozen):
    """Law of a weight vector (W_0, ..., W_{b-1}).

    Exactly one of three forms:
      - `law`: i.i.d. components with this law;
      - `components`: independent components, one law each;
      - `atoms`: a finite joint law over whole vectors (components may depend on each other).
    """
    law: Optional[WeightLaw] = None
    components: Optional[List[WeightLaw]] = None
    atoms: Optional[List[VectorAtom]] = None

    @model_validator(mode="after")
    def _check_form(self) -> "WeightVectorLaw":
        forms = [self.law is not None, self.components is not None, self.atoms is not None]
        if sum(forms) != 1:
            raise ValueError("give exactly one of 'law', 'components' or 'atoms'")
        if self.atoms is not None:
            sizes = {len(atom.values) for atom in self.atoms}
            if len(sizes) != 1:
                raise ValueError("all vector atoms must have the same length")
            total = math.fsum(atom.probability for atom in self.atoms)
            if abs(total - 1.0) > PROBABILITY_TOLERANCE:
                raise ValueError(f"vector atom probabilities sum to {total}, expected 1")
        return self

    @property
    def independent(self) -> bool:
        return self.atoms is None

    def size(self) -> Optional[int]:
        """Vector length fixed by the law, or None when any b fits (i.i.d. form)."""
        if self.components is not None:
            return len(self.components)
        if self.atoms is not None:
            return len(self.atoms[0].values)
        return None

    def marginal(self, i: int) -> WeightLaw:
        """Law of component i."""
        if self.law is not None:
            return self.law
        if self.components is not None:
            return self.components[i]
        merged = {}
        for atom in self.atoms:
            value = atom.values[i]
            merged[value] = merged.get(value, 0.0) + atom.probability
        return FiniteAtomicLaw(atoms=[Atom(value=v, probability=p) for v, p in merged.items()])


class ScaleInvariantIntensity(_Frozen):
    """nu(dr) = delta dr / r^2 on (0, 1]."""
    kind: Literal["scale_invariant"] = "scale_invariant"
    delta: float = Field(default=1.0, gt=0.0)


class PowerLawIntensity(_Frozen):
    """nu(dr) = delta r^(-exponent) dr on (0, 1]."""
    kind: Literal["power_law"] = "power_law"
    delta: float = Field(default=1.0, gt=0.0)
    exponent: float = Field(default=2.0)


class AtomicIntensity(_Frozen):
    """nu = sum_j mass_j * Dirac(scale_j), scales in (0, 1]."""
    kind: Literal["atomic"] = "atomic"
    scales: List[float] = Field(..., min_length=1)
    masses: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_atoms(self) -> "AtomicIntensity":
        if len(self.scales) != len(self.masses):
            raise ValueError("scales and masses must have the same length")
        if any(not 0.0 < r <= 1.0 for r in self.scales):
            raise ValueError("atomic intensity scales must lie in (0, 1]")
        if any(m < 0.0 for m in self.masses):
            raise ValueError("atomic intensity masses must be >= 0")
        return self


IntensitySpec = Annotated[
    Union[ScaleInvariantIntensity, PowerLawIntensity, AtomicIntensity],
    Field(discriminator="kind"),
]


class JumpAtom(_Frozen):
    """Atom of the Levy jump measure pi: mass at point x in R^2 \\ {0}."""
    x: Tuple[float, float]
    mass: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _check_nonzero(self) -> "JumpAtom":
        if self.x[0] == 0.0 and self.x[1] == 0.0:
            raise ValueError("jump atoms must avoid the origin")
        return self
