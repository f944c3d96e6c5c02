"""
Convergence criterion: the moment functional S(n, p), the decay rate phi(p),
the verdict on uniform convergence, the Holder bound and the critical
exponent.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import bisect, minimize_scalar

from src.badic.measures import interval_masses, is_lebesgue
from src.cascades import build_cascade
from src.cascades.badic_cascade import BadicCascade
from src.cascades.cone_cascade import ConeCascade, cone_measure
from src.cascades.logid_cascade import moment_exponent
from src.cascades.streams import StreamPurpose, derive_subseed
from src.config import settings
from src.exceptions import (
    InfiniteMomentError,
    InsufficientDataError,
    UnsupportedCombinationError,
    UnsupportedModelError,
)
from src.models.cascade import (
    BadicIndependentModel,
    CompoundPoissonModel,
    LebesgueMeasure,
    LogInfDivisibleModel,
)
from src.models.reports import (
    DistortionCheck,
    EmpiricalPhi,
    PhiPoint,
    PhiReport,
    Verdict,
    VerdictKind,
)
from src.services.ensemble import ensemble_runner
from src.weights import abs_moment, mean, vector_abs_moments

HOLDER_SCAN_POINTS = 64
BETA_SCAN_POINTS = 256
REFINE_POINTS = 3
MIN_EMPIRICAL_GENERATIONS = 4

_beta_tilde_cache: Dict[Tuple[str, int], float] = {}


def _require_badic(model) -> None:
    if not isinstance(model, BadicIndependentModel):
        raise UnsupportedModelError(f"{model.family} cascades have no b-adic closed form for S(n, p); use S_np_mc")


def _require_lebesgue_for_cones(model, measure) -> None:
    if not isinstance(model, BadicIndependentModel) and not is_lebesgue(measure):
        raise UnsupportedCombinationError(
            f"{model.family} cascades are only defined against Lebesgue measure")


def level_term(model: BadicIndependentModel, measure, k: int, p: float) -> float:
    """sum_i (lambda^(k)_i)^p E|W^(k)_i|^p, the level-k factor of S(n, p)."""
    lam = np.asarray(measure.vector(k, model.b), dtype=float)
    moments = vector_abs_moments(model.vector_law(k), model.b, p)
    return math.fsum(lam ** p * moments)


def S_np_closed(model, measure, n: int, p: float) -> float:
    """S(n, p) = prod_{k<n} sum_i (lambda^(k)_i)^p E|W^(k)_i|^p for b-adic models."""
    _require_badic(model)
    if n < 0:
        raise ValueError(f"generation must be >= 0, got {n}")
    return math.prod(level_term(model, measure, k, p) for k in range(n))


def S_np_cone(model, n: int, p: float) -> float:
    """S(n, p) = b^(-n(p-1)) exp(sum_k Lambda_k kappa(p)) for cone families under Lebesgue measure."""
    if isinstance(model, BadicIndependentModel):
        raise UnsupportedModelError("S_np_cone applies to compound Poisson and log-ID cascades")
    kernel = build_cascade(model, seed=0, depth=max(n, 1))
    return float(model.b) ** (-n * (p - 1.0)) * math.exp(kernel.log_moment(n, p))


def S_np_mc(model, measure, n: int, p: float, replicas: int, seed: Optional[int] = None,
            m_sub: Optional[int] = None, key: int = 0) -> Tuple[float, float]:
    """Monte Carlo S(n, p) with its standard error.

    b-adic replicas are exact given omega; cone replicas integrate |Q_n|^p with
    a left Riemann sum on m_sub points per generation-n interval, which keeps
    the estimate unbiased since E|Q_n(t)|^p does not depend on t.
    """
    _require_lebesgue_for_cones(model, measure)
    seed = settings.default_seed if seed is None else seed
    m_sub = m_sub or settings.m_sub
    run_seed = derive_subseed(seed, StreamPurpose.MOMENT_CHECK, key)
    b = model.b

    if isinstance(model, BadicIndependentModel):
        weights = interval_masses(measure, n, b) ** p

        def one_replica(replica: int) -> float:
            cascade = BadicCascade(model, run_seed, replica, depth=max(n, 1))
            q = cascade.Q_level(n)
            return math.fsum(weights * np.abs(q) ** p)
    else:
        ts = np.arange(m_sub * b ** n) / float(m_sub * b ** n)
        scale = float(b) ** (-n * (p - 1.0))

        def one_replica(replica: int) -> float:
            cascade = build_cascade(model, run_seed, replica, depth=max(n, 1))
            return scale * float(np.mean(np.abs(cascade.Q_on_grid(ts, n)) ** p))

    estimate, stderr = ensemble_runner.mean(one_replica, replicas)
    logger.debug(f"S({n}, {p}) ~ {float(estimate):.6g} +/- {float(stderr):.2g} over {replicas} replicas")
    return float(estimate), float(stderr)


def beta_tilde(model, n_max: Optional[int] = None) -> float:
    """limsup_n Lambda(U_{k<=n} DeltaC_k(t)) / (n ln b).

    Exact (beta delta) for scale-invariant nu; otherwise the maximum over the
    top half of 1..n_max.
    """
    if isinstance(model, BadicIndependentModel):
        raise UnsupportedModelError("beta~ is defined for cone families only")
    if model.scale_invariant:
        return model.beta * model.intensity.delta

    n_max = n_max or settings.n_max
    key = (model.model_dump_json(), n_max)
    if key not in _beta_tilde_cache:
        log_b = math.log(model.b)
        measures = np.cumsum([cone_measure(model, 0.5, k) for k in range(1, n_max + 1)])
        ratios = measures / (np.arange(1, n_max + 1) * log_b)
        _beta_tilde_cache[key] = float(ratios[n_max // 2:].max())
        logger.warning(f"beta~ = {_beta_tilde_cache[key]:.6g} is a finite-n surrogate over n <= {n_max} "
                       f"(nu is not scale invariant)")
    return _beta_tilde_cache[key]


def _common_period(model: BadicIndependentModel, measure) -> int:
    vectors = len(measure.vectors) if hasattr(measure, "vectors") else 1
    return math.lcm(len(model.levels), vectors)


def phi_closed(model, measure, p: float) -> float:
    """phi(p) from the closed forms of each family.

    Periodic b-adic sequences give the liminf exactly as the average over a
    common period.
    """
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    _require_lebesgue_for_cones(model, measure)

    if isinstance(model, BadicIndependentModel):
        period = _common_period(model, measure)
        terms = [level_term(model, measure, k, p) for k in range(period)]
        if min(terms) <= 0.0:
            return math.inf
        return -math.fsum(math.log(term, model.b) for term in terms) / period

    if isinstance(model, CompoundPoissonModel):
        correction = p * (mean(model.weight).real - 1.0) - (abs_moment(model.weight, p) - 1.0)
        return p - 1.0 + beta_tilde(model) * correction

    if isinstance(model, LogInfDivisibleModel):
        return p - 1.0 - beta_tilde(model) * moment_exponent(model, p)

    raise UnsupportedModelError(f"unknown cascade family {type(model).__name__}")


def _phi_or_none(model, measure, p: float) -> Optional[float]:
    try:
        return phi_closed(model, measure, p)
    except InfiniteMomentError as e:
        logger.warning(f"phi({p}) unavailable: {e}")
        return None


def default_p_grid(size: Optional[int] = None) -> List[float]:
    """`size` evenly spaced points on (0, 2]."""
    size = size or settings.p_grid_size
    return [2.0 * (k + 1) / size for k in range(size)]


def refine_grid(grid: Sequence[float], values: Sequence[Optional[float]]) -> List[float]:
    """Adds REFINE_POINTS points inside every grid cell where phi changes sign."""
    refined = set(grid)
    for (p0, v0), (p1, v1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if v0 is None or v1 is None:
            continue
        if (v0 > 0.0) != (v1 > 0.0):
            refined.update(p0 + (p1 - p0) * j / (REFINE_POINTS + 1) for j in range(1, REFINE_POINTS + 1))
    return sorted(refined)


def phi_curve(model, measure, p_grid: Optional[Sequence[float]] = None) -> List[PhiPoint]:
    """Closed-form phi on the p-grid, refined near sign changes."""
    grid = list(p_grid) if p_grid is not None else default_p_grid()
    values = [_phi_or_none(model, measure, p) for p in grid]
    if p_grid is None:
        refined = refine_grid(grid, values)
        if len(refined) > len(grid):
            known = dict(zip(grid, values))
            grid = refined
            values = [known[p] if p in known else _phi_or_none(model, measure, p) for p in grid]
    return [PhiPoint(p=p, value=v) for p, v in zip(grid, values)]


def phi_empirical(model, measure, p: float, n_range: Tuple[int, int], replicas: int,
                  seed: Optional[int] = None, m_sub: Optional[int] = None) -> EmpiricalPhi:
    """Least-squares slope of -log_b S_np_mc(n, p) against n.

    Each n uses its own streams, so the per-n errors are independent and
    propagate linearly into the slope.
    """
    ns = np.arange(n_range[0], n_range[1] + 1)
    if len(ns) < MIN_EMPIRICAL_GENERATIONS:
        raise InsufficientDataError(f"need at least {MIN_EMPIRICAL_GENERATIONS} generations, got {len(ns)}")

    log_b = math.log(model.b)
    ys, sigmas = [], []
    for n in ns:
        estimate, stderr = S_np_mc(model, measure, int(n), p, replicas, seed=seed, m_sub=m_sub, key=int(n))
        if estimate <= 0.0:
            raise InsufficientDataError(f"S({n}, {p}) estimated as {estimate}; cannot take logarithms")
        ys.append(-math.log(estimate) / log_b)
        sigmas.append(stderr / (estimate * log_b))

    slope = float(np.polyfit(ns, ys, 1)[0])
    centred = ns - ns.mean()
    coefficients = centred / np.sum(centred ** 2)
    stderr = float(np.sqrt(np.sum((coefficients * np.asarray(sigmas)) ** 2)))
    half_width = settings.confidence_sigmas * stderr
    logger.info(f"Empirical phi({p}) = {slope:.4f} +/- {stderr:.4f} over n in {tuple(n_range)}")
    return EmpiricalPhi(p=p, slope=slope, stderr=stderr, band=(slope - half_width, slope + half_width),
                        n_range=(int(ns[0]), int(ns[-1])), replicas=replicas)


def holder_bound(model, measure, p: float) -> float:
    """gamma* = max_{q in (1, p]} phi(q)/q, by a grid scan followed by golden-section search."""
    if p <= 1.0:
        raise ValueError(f"holder bound needs p > 1, got {p}")

    def ratio(q: float) -> float:
        return phi_closed(model, measure, q) / q

    qs = 1.0 + (p - 1.0) * np.arange(1, HOLDER_SCAN_POINTS + 1) / HOLDER_SCAN_POINTS
    values = np.array([ratio(q) for q in qs])
    best = int(np.argmax(values))
    if 0 < best < len(qs) - 1:
        try:
            result = minimize_scalar(lambda q: -ratio(q), bracket=(qs[best - 1], qs[best], qs[best + 1]),
                                     method="golden")
        except ValueError as e:
            logger.debug(f"Golden-section search skipped: {e}")
        else:
            if qs[best - 1] <= result.x <= qs[best + 1]:
                return float(max(values[best], -result.fun))
    return float(values[best])


def beta_critical(model, measure) -> Optional[float]:
    """Smallest root of phi in [1, 2).

    Sign changes inside (1, 2) come first; without one, phi(1) = 0 gives 1.
    """
    def phi(q: float) -> float:
        return phi_closed(model, measure, q)

    qs = 1.0 + np.arange(1, BETA_SCAN_POINTS) / BETA_SCAN_POINTS
    values = [phi(q) for q in qs]
    for q0, v0, q1, v1 in zip(qs, values, qs[1:], values[1:]):
        if abs(v0) <= settings.root_tolerance:
            return float(q0)
        if (v0 > 0.0) != (v1 > 0.0):
            return float(bisect(phi, q0, q1, xtol=settings.bracket_tolerance))
    if abs(phi(1.0)) <= settings.root_tolerance:
        return 1.0
    return None


def distortion_check(model, measure, p: float, n_range: Tuple[int, int], replicas: int,
                     seed: Optional[int] = None, m_sub: Optional[int] = None) -> DistortionCheck:
    """Growth rate of log(E sup_{t in I_w}|Q_n(t)|^p / E|Q_n(t)|^p) in n.

    b-adic cascades are constant on each I_w, so the ratio is 1. For cone
    families the supremum runs over m_sub points per interval and the rate
    must stay below phi(p) ln b for the degeneracy argument to apply.
    """
    ns = list(range(n_range[0], n_range[1] + 1))
    threshold = _phi_or_none(model, measure, p)
    threshold = (threshold or 0.0) * math.log(model.b)
    if isinstance(model, BadicIndependentModel):
        return DistortionCheck(p=p, n_values=ns, log_ratios=[0.0] * len(ns), rate=0.0, stderr=0.0,
                               threshold=threshold, supported=True, method="structural")
    if len(ns) < 2:
        raise InsufficientDataError("distortion check needs at least two generations")
    _require_lebesgue_for_cones(model, measure)

    seed = settings.default_seed if seed is None else seed
    m_sub = m_sub or settings.m_sub
    log_ratios, sigmas = [], []
    for n in ns:
        run_seed = derive_subseed(seed, StreamPurpose.DISTORTION_GRID, n)
        size = model.b ** n
        ts = np.arange(m_sub * size) / float(m_sub * size)

        def one_replica(replica: int) -> float:
            cascade: ConeCascade = build_cascade(model, run_seed, replica, depth=n)
            powers = np.abs(cascade.Q_on_grid(ts, n)) ** p
            return float(powers.reshape(size, m_sub).max(axis=1).mean())

        estimate, stderr = ensemble_runner.mean(one_replica, replicas)
        pointwise = math.exp(build_cascade(model, 0, depth=n).log_moment(n, p))
        if float(estimate) <= 0.0:
            raise InsufficientDataError(f"E sup|Q_{n}|^{p} estimated as 0")
        log_ratios.append(math.log(float(estimate) / pointwise))
        sigmas.append(float(stderr) / float(estimate))

    x = np.asarray(ns, dtype=float)
    rate = float(np.polyfit(x, log_ratios, 1)[0])
    centred = x - x.mean()
    stderr = float(np.sqrt(np.sum((centred / np.sum(centred ** 2) * np.asarray(sigmas)) ** 2)))
    supported = rate + settings.confidence_sigmas * stderr < threshold
    logger.info(f"Distortion rate {rate:.4f} +/- {stderr:.4f} (threshold {threshold:.4f}), supported={supported}")
    return DistortionCheck(p=p, n_values=ns, log_ratios=log_ratios, rate=rate, stderr=stderr,
                           threshold=threshold, supported=supported)


def verdict(model, measure=None, p_grid: Optional[Sequence[float]] = None,
            distortion: Optional[Callable[[float], DistortionCheck]] = None) -> PhiReport:
    """Applies the convergence criterion on the closed-form phi curve.

    ConvergesUniformly when phi > 0 somewhere on (1, 2]; DegeneratesToZero when
    phi > 0 somewhere on (0, 1) and the distortion hypothesis holds
    (structurally for b-adic models, through `distortion` for cone models);
    Inconclusive otherwise.
    """
    measure = measure or LebesgueMeasure()
    points = phi_curve(model, measure, p_grid)
    warnings = [f"phi({point.p}) unavailable: infinite moment" for point in points if point.value is None]

    above_one = [pt.p for pt in points if 1.0 < pt.p <= 2.0 and pt.value is not None and pt.value > 0.0]
    below_one = [pt.p for pt in points if 0.0 < pt.p < 1.0 and pt.value is not None and pt.value > 0.0]

    if above_one:
        p_star = max(above_one)
        result = Verdict(kind=VerdictKind.CONVERGES_UNIFORMLY, p_star=p_star,
                         gamma_star=holder_bound(model, measure, p_star))
    elif below_one:
        p_star = min(below_one, key=lambda q: (abs(q - 0.5), q))
        if isinstance(model, BadicIndependentModel):
            result = Verdict(kind=VerdictKind.DEGENERATES_TO_ZERO, p_star=p_star, distortion="structural")
        elif distortion is not None:
            check = distortion(p_star)
            if check.supported:
                result = Verdict(kind=VerdictKind.DEGENERATES_TO_ZERO, p_star=p_star,
                                 distortion="numerically supported", distortion_check=check)
            else:
                result = Verdict(kind=VerdictKind.INCONCLUSIVE, distortion="not established",
                                 distortion_check=check)
        else:
            result = Verdict(kind=VerdictKind.INCONCLUSIVE, distortion="not established")
            warnings.append("phi > 0 on (0, 1) but no distortion check was run for this cone model")
    else:
        result = Verdict(kind=VerdictKind.INCONCLUSIVE)

    tilde = None if isinstance(model, BadicIndependentModel) else beta_tilde(model)
    if tilde is not None and not model.scale_invariant:
        warnings.append(f"beta~ = {tilde:.6g} is a finite-n surrogate")

    report = PhiReport(
        family=model.family,
        p_grid=[pt.p for pt in points],
        closed_form=points,
        verdict=result,
        beta_critical=beta_critical(model, measure),
        beta_tilde=tilde,
        warnings=warnings,
    )
    logger.info(f"Verdict for {model.family}: {result.kind.value} (p*={result.p_star}, gamma*={result.gamma_star})")
    return report
