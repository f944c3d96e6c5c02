"""
Builds the cascade kernel matching a model's family.
"""

from typing import List, Optional

import numpy as np
from loguru import logger

from src.cascades.badic_cascade import BadicCascade
from src.cascades.base_cascade import BaseCascade
from src.cascades.logid_cascade import LogIDCascade
from src.cascades.poisson_cascade import PoissonCascade
from src.exceptions import UnsupportedModelError
from src.models.cascade import BadicIndependentModel, CompoundPoissonModel, LogInfDivisibleModel
from src.weights import is_unit_mean, mean, vector_means

UNIT_MEAN_TOLERANCE = 1e-9

CASCADE_CLASSES = {
    BadicIndependentModel: BadicCascade,
    CompoundPoissonModel: PoissonCascade,
    LogInfDivisibleModel: LogIDCascade,
}


def build_cascade(model, seed: int, replica: int = 0, depth: Optional[int] = None) -> BaseCascade:
    """Realization `replica` of `model` under master seed `seed`."""
    cascade_class = CASCADE_CLASSES.get(type(model))
    if cascade_class is None:
        raise UnsupportedModelError(f"no cascade kernel for {type(model).__name__}")
    return cascade_class(model, seed, replica=replica, depth=depth)


def unit_mean_warnings(model) -> List[str]:
    """Weights whose mean differs from 1; such models break the martingale property."""
    messages = []
    if isinstance(model, BadicIndependentModel):
        for k, vector_law in enumerate(model.levels):
            means = vector_means(vector_law, model.b)
            if np.max(np.abs(means - 1.0)) > UNIT_MEAN_TOLERANCE:
                messages.append(f"level {k}: weight means {np.round(means, 6).tolist()} differ from 1")
    elif isinstance(model, CompoundPoissonModel):
        if not is_unit_mean(model.weight, UNIT_MEAN_TOLERANCE):
            messages.append(f"weight mean {mean(model.weight)} differs from 1")
    for message in messages:
        logger.warning(f"Mis-normalized model: {message}")
    return messages
