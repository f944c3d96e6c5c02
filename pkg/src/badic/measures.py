"""
Masses lambda(I_w) of the reference measure on generation-n intervals.
"""

import numpy as np

from src.models.cascade import InhomogeneousBernoulliMeasure, LebesgueMeasure


def interval_masses(measure, n: int, b: int) -> np.ndarray:
    """lambda(I_w) for w in A^n, indexed by word rank."""
    if isinstance(measure, LebesgueMeasure):
        return np.full(b ** n, float(b) ** (-n))
    if isinstance(measure, InhomogeneousBernoulliMeasure):
        masses = np.ones(1)
        for k in range(n):
            masses = np.outer(masses, np.asarray(measure.vector(k, b), dtype=float)).reshape(-1)
        return masses
    raise TypeError(f"unknown reference measure {type(measure).__name__}")


def is_lebesgue(measure) -> bool:
    return isinstance(measure, LebesgueMeasure)
