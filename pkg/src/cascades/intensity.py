"""
Intensity measures nu on the scale axis (0, 1].
"""

import math

import numpy as np
from scipy import integrate

from src.models.laws import AtomicIntensity, IntensitySpec, ScaleInvariantIntensity


def _exponent(intensity: IntensitySpec) -> float:
    return 2.0 if isinstance(intensity, ScaleInvariantIntensity) else intensity.exponent


def _atoms_in_band(intensity: AtomicIntensity, lo: float, hi: float):
    return [(r, m) for r, m in zip(intensity.scales, intensity.masses) if lo < r <= hi]


def band_mass(intensity: IntensitySpec, lo: float, hi: float) -> float:
    """nu((lo, hi])."""
    if isinstance(intensity, AtomicIntensity):
        return math.fsum(m for _, m in _atoms_in_band(intensity, lo, hi))
    a = _exponent(intensity)
    if a == 1.0:
        return intensity.delta * math.log(hi / lo)
    return intensity.delta * (hi ** (1.0 - a) - lo ** (1.0 - a)) / (1.0 - a)


def band_first_moment(intensity: IntensitySpec, lo: float, hi: float) -> float:
    """Integral of r nu(dr) over (lo, hi]."""
    if isinstance(intensity, AtomicIntensity):
        return math.fsum(r * m for r, m in _atoms_in_band(intensity, lo, hi))
    if isinstance(intensity, ScaleInvariantIntensity):
        return intensity.delta * math.log(hi / lo)
    value, _ = integrate.quad(lambda r: r * intensity.delta * r ** (-intensity.exponent), lo, hi,
                              epsabs=1e-14, epsrel=1e-12)
    return value


def sample_band(intensity: IntensitySpec, lo: float, hi: float, length: float,
                rng: np.random.Generator) -> np.ndarray:
    """Scales r of a Poisson process of intensity Leb x nu on a strip of `length` times (lo, hi]."""
    if isinstance(intensity, AtomicIntensity):
        scales = [np.full(rng.poisson(length * m), r) for r, m in _atoms_in_band(intensity, lo, hi)]
        return np.concatenate(scales) if scales else np.empty(0)

    count = rng.poisson(length * band_mass(intensity, lo, hi))
    # 1 - U lies in (0, 1], so the scales land in (lo, hi]
    u = 1.0 - rng.random(count)
    a = _exponent(intensity)
    if a == 1.0:
        return lo * (hi / lo) ** u
    lo_pow, hi_pow = lo ** (1.0 - a), hi ** (1.0 - a)
    return (lo_pow + u * (hi_pow - lo_pow)) ** (1.0 / (1.0 - a))
