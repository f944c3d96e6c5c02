"""
Shared model fixtures.
"""

import sys
from pathlib import Path

import pytest

# Add the repository root to path for testing
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.models.cascade import (
    BadicIndependentModel,
    CompoundPoissonModel,
    LogInfDivisibleModel,
)
from src.models.laws import (
    Atom,
    DeterministicLaw,
    FiniteAtomicLaw,
    LogNormalPhaseLaw,
    WeightVectorLaw,
)


def iid(law) -> WeightVectorLaw:
    return WeightVectorLaw(law=law)


CANONICAL_LAW = FiniteAtomicLaw(atoms=[Atom(value=0.5, probability=0.5), Atom(value=1.5, probability=0.5)])
ATOM_LAW = FiniteAtomicLaw(atoms=[Atom(value=0.0, probability=0.75), Atom(value=4.0, probability=0.25)])


@pytest.fixture
def unit_model():
    """b-adic cascade with W = 1."""
    return BadicIndependentModel(b=2, levels=[iid(DeterministicLaw())])


@pytest.fixture
def canonical_model():
    """b = 2, i.i.d. real weights in {1/2, 3/2}."""
    return BadicIndependentModel(b=2, levels=[iid(CANONICAL_LAW)])


@pytest.fixture
def atom_model():
    """b = 2, W in {0 w.p. 3/4, 4 w.p. 1/4}; degenerates to zero."""
    return BadicIndependentModel(b=2, levels=[iid(ATOM_LAW)])


@pytest.fixture
def unit_poisson_model():
    return CompoundPoissonModel(b=2, beta=1.0, weight=DeterministicLaw())


@pytest.fixture
def lognormal_poisson_model():
    return CompoundPoissonModel(b=2, beta=1.0, weight=LogNormalPhaseLaw(sigma=0.3, tau=0.4))


@pytest.fixture
def gaussian_logid_model():
    """Pure Gaussian log-layer, sigma_1^2 = 0.5, a_1 = -0.25."""
    return LogInfDivisibleModel(b=2, drift=(-0.25, 0.0), gaussian=((0.5, 0.0), (0.0, 0.0)))
