"""
Statistical checks of the martingale construction: unit mean, decorrelation,
self-similarity, the Cauchy-increment moment bound, sup-norm boundedness and
the Holder modulus of the paths.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.analysis.convergence import S_np_closed, S_np_cone
from src.cascades import build_cascade
from src.cascades.streams import StreamPurpose, derive_subseed
from src.config import settings
from src.models.cascade import BadicIndependentModel
from src.models.reports import CheckResult
from src.services.ensemble import ensemble_runner, replica_mean
from src.services.simulation import (
    PathSample,
    build_paths,
    cauchy_increment,
    martingale_check,
    sup_norm_trajectory,
)

MOMENT_RATIO_MAX = 10.0
TREND_FACTOR = 1.2
HOLDER_QUANTILE = 0.99
HOLDER_STABILITY = 2.0
STRUCTURAL_TOLERANCE = 1e-12


def decorrelation_distance(model) -> int:
    """N of the decorrelation property: 1 for b-adic, ceil(beta b) + 1 for cone families."""
    if isinstance(model, BadicIndependentModel):
        return 1
    return int(math.ceil(model.beta * model.b)) + 1


def self_similar(model) -> bool:
    if isinstance(model, BadicIndependentModel):
        return model.homogeneous
    return model.scale_invariant


def _within_band(value: complex, stderr: complex) -> bool:
    sigmas = settings.confidence_sigmas
    return (abs(value.real) <= sigmas * stderr.real + STRUCTURAL_TOLERANCE
            and abs(value.imag) <= sigmas * stderr.imag + STRUCTURAL_TOLERANCE)


def check_martingale(model, t_list: Sequence[float], n_values: Sequence[int], replicas: int,
                     seed: int) -> CheckResult:
    reports = [martingale_check(model, t_list, n, replicas, seed=seed) for n in n_values]
    return CheckResult(
        name="martingale",
        passed=all(report.passed for report in reports),
        details={"reports": [report.model_dump() for report in reports]},
    )


def check_decorrelation(model, n_values: Sequence[int], replicas: int, seed: int) -> CheckResult:
    """Covariance of P_n at two interval centres at least N b^-n apart.

    For b-adic models the second point sits in the next parent interval, so
    dependent components of one weight vector are never paired.
    """
    distance = decorrelation_distance(model)
    b = model.b
    details: Dict[str, object] = {"N": distance, "levels": []}
    passed = True
    for n in n_values:
        width = float(b) ** (-n)
        offset = b if isinstance(model, BadicIndependentModel) else distance
        s = width / 2.0
        t = s + offset * width
        if t >= 1.0:
            details["levels"].append({"n": n, "skipped": True})
            continue
        run_seed = derive_subseed(seed, StreamPurpose.MOMENT_CHECK, 2000 + n)

        def one_replica(replica: int) -> np.ndarray:
            cascade = build_cascade(model, run_seed, replica, depth=n)
            return np.array([cascade.eval_P(s, n), cascade.eval_P(t, n)])

        draws = ensemble_runner.map(one_replica, replicas)
        centred = draws - draws.mean(axis=0)
        covariance, stderr = replica_mean(centred[:, 0] * np.conj(centred[:, 1]))
        ok = _within_band(complex(covariance), complex(stderr))
        passed = passed and ok
        details["levels"].append({
            "n": n, "s": s, "t": t,
            "covariance": [float(covariance.real), float(covariance.imag)],
            "stderr": [float(stderr.real), float(stderr.imag)],
            "passed": ok,
        })
    return CheckResult(name="decorrelation", passed=passed, details=details)


def check_self_similarity(model, n_values: Sequence[int], replicas: int, seed: int,
                          u: float = 0.3) -> CheckResult:
    """First and second absolute moments of P_{n+1}(u/b) against those of P_n(u)."""
    if not self_similar(model):
        return CheckResult(name="self_similarity", passed=True, skipped=True,
                           details={"reason": "model is not homogeneous / scale invariant"})

    levels = []
    passed = True
    for n in n_values:
        run_seed = derive_subseed(seed, StreamPurpose.MOMENT_CHECK, 3000 + n)

        def one_replica(replica: int) -> np.ndarray:
            cascade = build_cascade(model, run_seed, replica, depth=n + 1)
            inner = abs(cascade.eval_P(u / model.b, n + 1))
            outer = abs(cascade.eval_P(u, n))
            return np.array([inner, inner ** 2, outer, outer ** 2])

        means, stderrs = ensemble_runner.mean(one_replica, replicas)
        level = {"n": n, "moments": means.tolist(), "stderr": stderrs.tolist()}
        for order in (0, 1):
            difference = means[order] - means[order + 2]
            band = math.hypot(stderrs[order], stderrs[order + 2])
            ok = abs(difference) <= settings.confidence_sigmas * band + STRUCTURAL_TOLERANCE
            level[f"order_{order + 1}_passed"] = bool(ok)
            passed = passed and ok
        levels.append(level)
    return CheckResult(name="self_similarity", passed=passed, details={"u": u, "levels": levels})


def reference_S(model, measure, n: int, p: float) -> float:
    if isinstance(model, BadicIndependentModel):
        return S_np_closed(model, measure, n, p)
    return S_np_cone(model, n, p)


def path_ensemble(model, measure, n_max: int, replicas: int, seed: int,
                  m_sub: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Per-replica sup norms ||F_n|| (n = 1..n_max) and Cauchy increments (n = 2..n_max)."""
    run_seed = derive_subseed(seed, StreamPurpose.MOMENT_CHECK, 4000)

    def one_replica(replica: int) -> np.ndarray:
        paths = build_paths(model, measure, run_seed, n_max=n_max, m_sub=m_sub, replica=replica)
        increments = [cauchy_increment(paths, n) for n in range(2, n_max + 1)]
        return np.concatenate([sup_norm_trajectory(paths), increments])

    table = ensemble_runner.map(one_replica, replicas)
    return table[:, :n_max], table[:, n_max:]


def check_moment_ratio(model, measure, increments: np.ndarray, n_range: Tuple[int, int]) -> CheckResult:
    """E max_{T_n}|F_n - F_{n-1}|^2 / S(n, 2) must stay within a factor MOMENT_RATIO_MAX over n."""
    ns = list(range(max(2, n_range[0]), n_range[1] + 1))
    moments, _ = replica_mean(increments[:, [n - 2 for n in ns]] ** 2)
    references = np.array([reference_S(model, measure, n, 2.0) for n in ns])
    ratios = moments / references
    positive = ratios[ratios > 0.0]
    if positive.size == 0:
        spread, passed = 0.0, True
    else:
        spread = float(positive.max() / positive.min())
        passed = spread <= MOMENT_RATIO_MAX and positive.size == ratios.size
    return CheckResult(name="moment_ratio", passed=passed,
                       details={"n": ns, "ratios": ratios.tolist(), "max_over_min": spread})


def check_sup_norm_trend(sup_norms: np.ndarray, n_range: Tuple[int, int]) -> CheckResult:
    """Second moment of ||F_n|| over n_range: the last value at most TREND_FACTOR x the earlier maximum."""
    ns = list(range(n_range[0], n_range[1] + 1))
    moments, stderrs = replica_mean(sup_norms[:, [n - 1 for n in ns]] ** 2)
    earlier = float(np.max(moments[:-1])) if len(ns) > 1 else float(moments[0])
    passed = float(moments[-1]) <= TREND_FACTOR * earlier + STRUCTURAL_TOLERANCE
    return CheckResult(name="sup_norm_trend", passed=passed,
                       details={"n": ns, "second_moments": moments.tolist(), "stderr": stderrs.tolist()})


def holder_quantile(paths: PathSample, gamma: float, min_level: int = 4,
                    quantile: float = HOLDER_QUANTILE) -> Dict[str, float]:
    """Quantile of sup_n |F_n(t) - F_n(s)| / |t - s|^gamma over grid pairs with |t - s| <= b^-min_level.

    Pairs are grid-aligned with gaps b^-j, j = min_level..n_max. The quantile
    over all gaps is compared with the one over gaps up to n_max - 1, which
    uses about half as many pairs.
    """
    resolution = paths.resolution
    ratios_by_level = []
    for j in range(min_level, paths.n_max + 1):
        step = resolution // paths.b ** j
        gap = step / float(resolution)
        differences = np.abs(paths.values[:, step:] - paths.values[:, :-step]).max(axis=0)
        ratios_by_level.append(differences / gap ** gamma)
    if not ratios_by_level:
        raise ValueError(f"min_level {min_level} exceeds path generation {paths.n_max}")

    full = float(np.quantile(np.concatenate(ratios_by_level), quantile))
    half = float(np.quantile(np.concatenate(ratios_by_level[:-1]), quantile)) if len(ratios_by_level) > 1 else full
    stable = math.isfinite(full) and full <= HOLDER_STABILITY * max(half, STRUCTURAL_TOLERANCE)
    return {"gamma": gamma, "quantile": full, "quantile_half": half, "stable": bool(stable)}


def check_holder_quantile(paths: PathSample, gamma_star: Optional[float], min_level: int = 4) -> CheckResult:
    if gamma_star is None or gamma_star <= 0.0 or paths.n_max <= min_level:
        return CheckResult(name="holder_quantile", passed=True, skipped=True,
                           details={"reason": "no positive Holder bound or paths too shallow"})
    result = holder_quantile(paths, 0.5 * gamma_star, min_level=min_level)
    return CheckResult(name="holder_quantile", passed=result["stable"], details=result)


def run_checks(model, measure, replicas: int, seed: int, t_list: Sequence[float], n_values: Sequence[int],
               trend_range: Tuple[int, int], ratio_range: Tuple[int, int], m_sub: Optional[int] = None,
               gamma_star: Optional[float] = None, convergent: bool = True) -> List[CheckResult]:
    """All checks, in a fixed order.

    The moment-bound and boundedness checks only apply to convergent models
    and are skipped otherwise.
    """
    logger.info(f"Running verification checks for {model.family} with {replicas} replicas")
    checks = [
        check_martingale(model, t_list, n_values, replicas, seed),
        check_decorrelation(model, n_values, replicas, seed),
        check_self_similarity(model, n_values, replicas, seed),
    ]

    n_max = max(trend_range[1], ratio_range[1])
    if convergent:
        sup_norms, increments = path_ensemble(model, measure, n_max, replicas, seed, m_sub=m_sub)
        checks.append(check_moment_ratio(model, measure, increments, ratio_range))
        checks.append(check_sup_norm_trend(sup_norms, trend_range))
        paths = build_paths(model, measure, seed, n_max=n_max, m_sub=m_sub)
        checks.append(check_holder_quantile(paths, gamma_star))
    else:
        for name in ("moment_ratio", "sup_norm_trend", "holder_quantile"):
            checks.append(CheckResult(name=name, passed=True, skipped=True,
                                      details={"reason": "verdict is not ConvergesUniformly"}))

    for check in checks:
        status = "skipped" if check.skipped else ("passed" if check.passed else "FAILED")
        logger.info(f"Check {check.name}: {status}")
    return checks
