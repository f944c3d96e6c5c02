from src.cascades.badic_cascade import BadicCascade
from src.cascades.base_cascade import BaseCascade
from src.cascades.cone_cascade import Cone, ConeCascade, cone, cone_measure
from src.cascades.factory import build_cascade
from src.cascades.logid_cascade import LogIDCascade, levy_exponent, moment_exponent, normalized_levy_exponent
from src.cascades.poisson_cascade import PoissonCascade

__all__ = [
    "BadicCascade",
    "BaseCascade",
    "Cone",
    "ConeCascade",
    "LogIDCascade",
    "PoissonCascade",
    "build_cascade",
    "cone",
    "cone_measure",
    "levy_exponent",
    "moment_exponent",
    "normalized_levy_exponent",
]
