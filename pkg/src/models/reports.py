"""
Report models written by the command line runs.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class PhiMethod(str, Enum):
    """How a phi value was obtained."""
    CLOSED_FORM = "closed-form"
    EMPIRICAL_SLOPE = "empirical-slope"


class VerdictKind(str, Enum):
    """Outcome of the convergence criterion."""
    CONVERGES_UNIFORMLY = "ConvergesUniformly"
    DEGENERATES_TO_ZERO = "DegeneratesToZero"
    INCONCLUSIVE = "Inconclusive"


class PhiPoint(BaseModel):
    p: float
    value: Optional[float] = Field(None, description="None when a required moment is infinite")
    stderr: float = 0.0
    method: PhiMethod = PhiMethod.CLOSED_FORM


class EmpiricalPhi(BaseModel):
    p: float
    slope: float
    stderr: float
    band: Tuple[float, float]
    n_range: Tuple[int, int]
    replicas: int
    method: PhiMethod = PhiMethod.EMPIRICAL_SLOPE


class DistortionCheck(BaseModel):
    """Growth of E sup_{I_w}|Q_n|^p / E|Q_n(t)|^p over generations."""
    p: float
    n_values: List[int]
    log_ratios: List[float]
    rate: float
    stderr: float
    threshold: float
    supported: bool
    method: str = "monte-carlo"


class Verdict(BaseModel):
    kind: VerdictKind
    p_star: Optional[float] = None
    gamma_star: Optional[float] = None
    distortion: Optional[str] = Field(None, description="structural, numerically supported, or not established")
    distortion_check: Optional[DistortionCheck] = None


class PhiReport(BaseModel):
    config_hash: str = ""
    seed: int = 0
    family: str
    p_grid: List[float]
    closed_form: List[PhiPoint]
    empirical: List[EmpiricalPhi] = Field(default_factory=list)
    verdict: Verdict
    beta_critical: Optional[float] = None
    beta_tilde: Optional[float] = None
    warnings: List[str] = Field(default_factory=list)


class ExponentHistogram(BaseModel):
    n: int
    h_bins: List[float]
    counts: List[int]
    infinite_count: int = Field(0, description="Intervals with zero oscillation")

    @property
    def total(self) -> int:
        return sum(self.counts) + self.infinite_count


class SpectrumLevel(BaseModel):
    epsilon: float
    n: int
    values: List[Optional[float]] = Field(..., description="None stands for -inf (empty count)")


class SpectrumRow(BaseModel):
    epsilon: float
    values: List[Optional[float]]


class StructurePoint(BaseModel):
    q: float
    tau: float
    stderr: float


class HolderPoint(BaseModel):
    t: float
    exponent: Optional[float] = Field(None, description="None when F is constant near t")


class SpectrumReport(BaseModel):
    config_hash: str = ""
    seed: int = 0
    resolution: int = Field(..., description="Grid intervals M of the analysed path")
    h_grid: List[float]
    n_range: Tuple[int, int]
    epsilons: List[float]
    levels: List[SpectrumLevel]
    by_epsilon: List[SpectrumRow]
    headline_epsilon: float
    headline: List[Optional[float]]
    histograms: List[ExponentHistogram]
    structure: List[StructurePoint] = Field(default_factory=list)
    pointwise: List[HolderPoint] = Field(default_factory=list)
    gamma_regularity: Optional[float] = None


class MartingalePoint(BaseModel):
    t: float
    mean_re: float
    mean_im: float
    stderr_re: float
    stderr_im: float
    flagged: bool


class MartingaleReport(BaseModel):
    n: int
    replicas: int
    points: List[MartingalePoint]

    @property
    def passed(self) -> bool:
        return not any(point.flagged for point in self.points)


class CheckResult(BaseModel):
    name: str
    passed: bool
    skipped: bool = False
    details: Dict[str, Any] = Field(default_factory=dict)


class VerifyReport(BaseModel):
    config_hash: str
    seed: int
    family: str
    checks: List[CheckResult]
    passed: bool


class RunManifest(BaseModel):
    config_hash: str
    seed: int
    command: str
    files: List[str]
    versions: Dict[str, str]
    config: Dict[str, Any]
