"""
Multifractal analysis of complex paths sampled on a uniform grid:
oscillations, coarse Holder exponents, the large deviation spectrum,
structure exponents and pointwise Holder estimates.

A path is a complex array of F on j/M, j = 0..M, with M divisible by b^n
for every generation n analysed.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.lib.stride_tricks import sliding_window_view
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from src.badic import locate
from src.exceptions import InsufficientDataError
from src.models.reports import (
    ExponentHistogram,
    SpectrumLevel,
    SpectrumReport,
    SpectrumRow,
    StructurePoint,
)

ALL_PAIRS_LIMIT = 64
BROADCAST_LIMIT = 4_000_000


def _as_plane(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return np.column_stack([values.real, values.imag])


def _farthest_point_diameter(points: np.ndarray) -> float:
    """Double farthest-point sweep; exact for collinear point sets."""
    first = np.argmax(np.sum((points - points[0]) ** 2, axis=1))
    distances = np.sum((points - points[first]) ** 2, axis=1)
    return float(math.sqrt(distances.max()))


def planar_diameter(values: np.ndarray) -> float:
    """max |z_i - z_j| over a set of complex numbers."""
    points = _as_plane(values)
    if len(points) < 2:
        return 0.0
    if len(points) <= ALL_PAIRS_LIMIT:
        return float(pdist(points).max())
    try:
        hull = ConvexHull(points)
    except QhullError:
        return _farthest_point_diameter(points)
    vertices = points[hull.vertices]
    return float(pdist(vertices).max()) if len(vertices) > 1 else 0.0


def oscillation(ts: np.ndarray, values: np.ndarray, left: float, right: float) -> float:
    """Osc_F(J) for J = [left, right], from the grid points inside J."""
    ts = np.asarray(ts, dtype=float)
    inside = (ts >= left) & (ts <= right)
    if inside.sum() < 2:
        raise InsufficientDataError(f"interval [{left}, {right}] holds fewer than two grid points")
    return planar_diameter(np.asarray(values)[inside])


def _stride(values: np.ndarray, b: int, n: int) -> int:
    resolution = len(values) - 1
    if n < 0 or resolution % b ** n != 0:
        raise InsufficientDataError(f"path with {resolution} grid intervals does not resolve generation {n}")
    return resolution // b ** n


def interval_oscillations(values: np.ndarray, b: int, n: int) -> np.ndarray:
    """Osc_F(I_w) for every w in A^n, indexed by word rank."""
    values = np.asarray(values, dtype=complex)
    step = _stride(values, b, n)
    blocks = sliding_window_view(values, step + 1)[::step]
    if blocks.size * (step + 1) <= BROADCAST_LIMIT:
        distances = np.abs(blocks[:, :, None] - blocks[:, None, :])
        return distances.reshape(len(blocks), -1).max(axis=1)
    return np.array([planar_diameter(block) for block in blocks])


def coarse_exponents(values: np.ndarray, b: int, n: int) -> np.ndarray:
    """alpha_w = log_b Osc_F(I_w) / (-n); zero oscillation maps to +inf."""
    if n < 1:
        raise ValueError(f"generation must be >= 1, got {n}")
    osc = interval_oscillations(values, b, n)
    exponents = np.full(len(osc), np.inf)
    positive = osc > 0.0
    exponents[positive] = np.log(osc[positive]) / (-n * math.log(b))
    return exponents


def exponent_histogram(exponents: np.ndarray, n: int, h_grid: Sequence[float]) -> ExponentHistogram:
    """Counts per nearest h-grid value; the outer bins reach to -inf and +inf
    (finite values), zero oscillations go to their own bucket."""
    h_grid = np.asarray(h_grid, dtype=float)
    finite = exponents[np.isfinite(exponents)]
    edges = (h_grid[:-1] + h_grid[1:]) / 2.0
    bins = np.searchsorted(edges, finite, side="right")
    counts = np.bincount(bins, minlength=len(h_grid))
    return ExponentHistogram(n=n, h_bins=h_grid.tolist(), counts=counts.tolist(),
                             infinite_count=int(len(exponents) - len(finite)))


def h_grid_from(h_min: float, h_max: float, h_step: float) -> List[float]:
    count = int(round((h_max - h_min) / h_step)) + 1
    return [round(h_min + k * h_step, 12) for k in range(count)]


def _spectrum_values(exponents: np.ndarray, n: int, b: int, h_grid: np.ndarray,
                     epsilon: float) -> List[Optional[float]]:
    finite = np.sort(exponents[np.isfinite(exponents)])
    low = np.searchsorted(finite, h_grid - epsilon, side="left")
    high = np.searchsorted(finite, h_grid + epsilon, side="right")
    counts = high - low
    return [math.log(int(c), b) / n if c > 0 else None for c in counts]


def _top_half(n_range: Tuple[int, int]) -> List[int]:
    ns = list(range(n_range[0], n_range[1] + 1))
    return ns[len(ns) // 2:]


def large_deviation_spectrum(values: np.ndarray, b: int, n_range: Tuple[int, int],
                             epsilons: Sequence[float], h_grid: Sequence[float]) -> SpectrumReport:
    """L_F(h) per (epsilon, n): log_b #{w in A^n : |alpha_w - h| <= epsilon} / n.

    Each epsilon row takes the maximum over the top half of n_range; the
    smallest epsilon gives the headline estimate. Empty counts are None.
    """
    if n_range[0] < 1 or n_range[1] < n_range[0]:
        raise ValueError(f"invalid generation range {n_range}")
    h_array = np.asarray(h_grid, dtype=float)
    exponents = {n: coarse_exponents(values, b, n) for n in range(n_range[0], n_range[1] + 1)}

    levels = []
    rows = []
    for epsilon in epsilons:
        per_n = {}
        for n, alpha in exponents.items():
            per_n[n] = _spectrum_values(alpha, n, b, h_array, epsilon)
            levels.append(SpectrumLevel(epsilon=epsilon, n=n, values=per_n[n]))
        row = []
        for i in range(len(h_array)):
            candidates = [per_n[n][i] for n in _top_half(n_range) if per_n[n][i] is not None]
            row.append(max(candidates) if candidates else None)
        rows.append(SpectrumRow(epsilon=epsilon, values=row))

    headline = min(rows, key=lambda row: row.epsilon)
    top = n_range[1]
    finite_top = exponents[top][np.isfinite(exponents[top])]
    report = SpectrumReport(
        resolution=len(values) - 1,
        h_grid=h_array.tolist(),
        n_range=n_range,
        epsilons=list(epsilons),
        levels=levels,
        by_epsilon=rows,
        headline_epsilon=headline.epsilon,
        headline=headline.values,
        histograms=[exponent_histogram(alpha, n, h_array) for n, alpha in exponents.items()],
        gamma_regularity=float(finite_top.min()) if finite_top.size else None,
    )
    logger.debug(f"Spectrum over n in {n_range}: support {spectrum_support(report)}")
    return report


def spectrum_support(report: SpectrumReport) -> Optional[Tuple[float, float]]:
    """Smallest and largest h with a finite headline value."""
    hs = [h for h, value in zip(report.h_grid, report.headline) if value is not None]
    return (min(hs), max(hs)) if hs else None


def _slope_with_stderr(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    if len(x) <= 2:
        return float(slope), 0.0
    residuals = y - (slope * x + intercept)
    variance = np.sum(residuals ** 2) / (len(x) - 2)
    return float(slope), float(math.sqrt(variance / np.sum((x - x.mean()) ** 2)))


def structure_exponents(values: np.ndarray, b: int, q_list: Sequence[float],
                        n_range: Tuple[int, int]) -> List[StructurePoint]:
    """tau(q): least-squares slope of log_b sum_w Osc_F(I_w)^q against -n."""
    ns = np.arange(n_range[0], n_range[1] + 1)
    if len(ns) < 2:
        raise InsufficientDataError("structure exponents need at least two generations")
    oscillations = {int(n): interval_oscillations(values, b, int(n)) for n in ns}
    if all(not np.any(osc > 0.0) for osc in oscillations.values()):
        raise InsufficientDataError("all oscillations vanish")

    points = []
    for q in q_list:
        sums = []
        for n in ns:
            osc = oscillations[int(n)]
            # 0^0 = 1 keeps tau(0) = -1
            total = float(np.sum(osc ** q)) if q == 0 else float(np.sum(osc[osc > 0.0] ** q))
            if total <= 0.0:
                raise InsufficientDataError(f"sum of Osc^{q} vanishes at generation {n}")
            sums.append(math.log(total, b))
        tau, stderr = _slope_with_stderr(-ns.astype(float), np.asarray(sums))
        points.append(StructurePoint(q=q, tau=tau, stderr=stderr))
    return points


def pointwise_holder(values: np.ndarray, b: int, t: float, n_range: Tuple[int, int]) -> float:
    """Min over the top half of n_range of the coarse exponent of I_{t|n}."""
    estimates = []
    for n in _top_half(n_range):
        step = _stride(values, b, n)
        index = locate(t, n, b).index
        osc = planar_diameter(np.asarray(values)[index * step:(index + 1) * step + 1])
        estimates.append(math.inf if osc == 0.0 else math.log(osc) / (-n * math.log(b)))
    return float(min(estimates))
