"""
Tests for oscillations, coarse exponents, the large deviation spectrum and
structure exponents.
"""

import math

import numpy as np
import pytest

from src.analysis.multifractal import (
    coarse_exponents,
    exponent_histogram,
    h_grid_from,
    interval_oscillations,
    large_deviation_spectrum,
    oscillation,
    planar_diameter,
    pointwise_holder,
    spectrum_support,
    structure_exponents,
)
from src.analysis.reference_paths import (
    constant_path,
    identity_path,
    self_affine_path,
    self_affine_ratios,
)
from src.exceptions import InsufficientDataError
from src.services.simulation import build_paths

H_GRID = h_grid_from(0.0, 2.0, 0.05)
EPSILONS = (0.2, 0.1, 0.05)


def grid(generation: int, b: int = 2) -> np.ndarray:
    size = b ** generation
    return np.arange(size + 1) / float(size)


class TestOscillation:
    """Test Osc_F(J) on grid samples."""

    def test_identity(self):
        """Test Osc of F = t over [1/4, 1/2] is 1/4."""
        ts = grid(6)
        assert oscillation(ts, identity_path(2, 6), 0.25, 0.5) == pytest.approx(0.25)

    def test_circle(self):
        """Test a full turn of the unit circle has oscillation 2."""
        ts = grid(8)
        values = np.exp(2j * math.pi * ts)
        assert oscillation(ts, values, 0.0, 1.0) == pytest.approx(2.0)

    def test_constant(self):
        """Test a constant path has zero oscillation."""
        ts = grid(6)
        assert oscillation(ts, constant_path(2, 6, 1 + 1j), 0.0, 1.0) == 0.0

    def test_too_few_points(self):
        """Test an interval holding fewer than two grid points is refused."""
        ts = grid(2)
        with pytest.raises(InsufficientDataError):
            oscillation(ts, identity_path(2, 2), 0.3, 0.45)

    def test_collinear_diameter(self):
        """Test collinear point sets beyond the all-pairs limit."""
        assert planar_diameter(identity_path(2, 8)) == pytest.approx(1.0)
        assert planar_diameter(1j * identity_path(2, 8)) == pytest.approx(1.0)

    def test_monotone_and_subadditive(self):
        """Test Osc grows with J and Osc(J u J') <= Osc(J) + Osc(J') for adjacent J, J'."""
        ts = grid(10)
        values = self_affine_path(2, 10)
        left = oscillation(ts, values, 0.0, 0.5)
        right = oscillation(ts, values, 0.5, 1.0)
        whole = oscillation(ts, values, 0.0, 1.0)
        assert oscillation(ts, values, 0.0, 0.25) <= left + 1e-12
        assert whole <= left + right + 1e-12

    def test_interval_oscillations_match_direct(self):
        """Test the vectorized per-interval oscillations agree with the direct computation."""
        ts = grid(8)
        values = self_affine_path(2, 8)
        batch = interval_oscillations(values, 2, 3)
        direct = [oscillation(ts, values, k / 8, (k + 1) / 8) for k in range(8)]
        assert np.allclose(batch, direct)

    def test_unresolved_generation(self):
        """Test generations finer than the grid are refused."""
        with pytest.raises(InsufficientDataError):
            interval_oscillations(identity_path(2, 3), 2, 4)


class TestCoarseExponents:
    """Test alpha_w = log_b Osc_F(I_w) / (-n)."""

    def test_identity(self):
        """Test F = t has every exponent equal to 1."""
        assert np.allclose(coarse_exponents(identity_path(3, 5), 3, 4), 1.0)

    def test_constant(self):
        """Test zero oscillations map to +inf."""
        assert np.all(np.isinf(coarse_exponents(constant_path(2, 5), 2, 3)))

    def test_square_root(self):
        """Test F = sqrt(t) has exponent 1/2 on the first interval."""
        values = np.sqrt(grid(10)).astype(complex)
        assert coarse_exponents(values, 2, 8)[0] == pytest.approx(0.5)

    def test_generation_zero(self):
        """Test n = 0 is refused."""
        with pytest.raises(ValueError):
            coarse_exponents(identity_path(2, 3), 2, 0)

    def test_histogram_counts_every_word(self):
        """Test histogram counts plus the infinite bucket add up to b^n."""
        values = self_affine_path(2, 10)
        histogram = exponent_histogram(coarse_exponents(values, 2, 6), 6, H_GRID)
        assert histogram.total == 64
        assert sum(histogram.counts) + histogram.infinite_count == 64

    def test_histogram_infinite_bucket(self):
        """Test zero oscillations land in the infinite bucket."""
        histogram = exponent_histogram(coarse_exponents(constant_path(2, 4), 2, 2), 2, H_GRID)
        assert histogram.infinite_count == 4
        assert sum(histogram.counts) == 0


class TestSpectrum:
    """Test the large deviation spectrum."""

    def test_identity(self):
        """Test F = t gives L(1) = 1 and gamma = 1."""
        report = large_deviation_spectrum(identity_path(2, 10), 2, (4, 8), EPSILONS, H_GRID)
        assert report.headline_epsilon == 0.05
        assert report.headline[H_GRID.index(1.0)] == pytest.approx(1.0)
        assert report.gamma_regularity == pytest.approx(1.0)
        low, high = spectrum_support(report)
        assert 0.9 <= low <= 1.0 <= high <= 1.1

    def test_constant(self):
        """Test a constant path has an empty spectrum."""
        report = large_deviation_spectrum(constant_path(2, 8), 2, (2, 6), EPSILONS, H_GRID)
        assert all(value is None for value in report.headline)
        assert report.gamma_regularity is None
        assert spectrum_support(report) is None

    def test_values_bounded_by_one(self):
        """Test L_F(h) <= 1 since at most b^n words are counted."""
        report = large_deviation_spectrum(self_affine_path(2, 12), 2, (4, 10), EPSILONS, H_GRID)
        for level in report.levels:
            assert all(value is None or value <= 1.0 + 1e-12 for value in level.values)

    def test_levels_cover_range(self):
        """Test one level per (epsilon, n) and one histogram per n."""
        report = large_deviation_spectrum(identity_path(2, 8), 2, (3, 6), EPSILONS, H_GRID)
        assert len(report.levels) == len(EPSILONS) * 4
        assert [h.n for h in report.histograms] == [3, 4, 5, 6]
        assert report.resolution == 256

    def test_invalid_range(self):
        """Test an empty generation range is refused."""
        with pytest.raises(ValueError):
            large_deviation_spectrum(identity_path(2, 6), 2, (5, 3), EPSILONS, H_GRID)

    def test_self_affine_path(self):
        """Test the self-affine curve concentrates near h = 1/2."""
        report = large_deviation_spectrum(self_affine_path(2, 14), 2, (8, 12), EPSILONS, H_GRID)
        low, high = spectrum_support(report)
        assert 0.35 <= low and high <= 0.6
        assert report.gamma_regularity == pytest.approx(0.5, abs=0.1)

    def test_canonical_cascade_is_multifractal(self, canonical_model):
        """Test the {1/2, 3/2} cascade spreads its exponents over a wide range."""
        paths = build_paths(canonical_model, seed=7, n_max=12)
        h_grid = h_grid_from(0.0, 3.0, 0.05)
        report = large_deviation_spectrum(paths.generation(12), 2, (6, 10), EPSILONS, h_grid)
        low, high = spectrum_support(report)
        assert high - low > 0.1


class TestReferencePaths:
    """Test the synthetic reference curves."""

    @pytest.mark.parametrize("b", [2, 3, 4, 5])
    def test_ratios(self, b):
        """Test the ratios sum to 1 with modulus b^-1/2."""
        ratios = self_affine_ratios(b)
        assert len(ratios) == b
        assert complex(ratios.sum()) == pytest.approx(1.0)
        assert np.allclose(np.abs(ratios), b ** -0.5)

    def test_self_affine_endpoints(self):
        """Test the curve runs from 0 to 1."""
        values = self_affine_path(3, 5)
        assert len(values) == 3 ** 5 + 1
        assert values[0] == 0
        assert values[-1] == pytest.approx(1.0)


class TestStructureExponents:
    """Test tau(q)."""

    def test_identity(self):
        """Test F = t gives tau(q) = q - 1, including tau(0) = -1."""
        points = structure_exponents(identity_path(2, 10), 2, [0.0, 1.0, 2.0], (3, 8))
        assert [p.tau for p in points] == pytest.approx([-1.0, 0.0, 1.0], abs=1e-9)

    def test_self_affine(self):
        """Test the self-affine curve gives tau(q) close to q/2 - 1."""
        points = structure_exponents(self_affine_path(2, 16), 2, [1.0, 2.0], (2, 6))
        assert points[0].tau == pytest.approx(-0.5, abs=0.05)
        assert points[1].tau == pytest.approx(0.0, abs=0.05)

    def test_constant(self):
        """Test a constant path has no structure exponents."""
        with pytest.raises(InsufficientDataError):
            structure_exponents(constant_path(2, 8), 2, [1.0], (2, 6))

    def test_single_generation(self):
        """Test a fit needs two generations."""
        with pytest.raises(InsufficientDataError):
            structure_exponents(identity_path(2, 8), 2, [1.0], (4, 4))


class TestPointwiseHolder:
    """Test pointwise exponents along a digit path."""

    def test_identity(self):
        """Test F = t has exponent 1 everywhere."""
        assert pointwise_holder(identity_path(2, 10), 2, 0.3, (4, 8)) == pytest.approx(1.0)

    def test_square_root_at_zero(self):
        """Test sqrt(t) has exponent 1/2 at t = 0."""
        values = np.sqrt(grid(12)).astype(complex)
        assert pointwise_holder(values, 2, 0.0, (4, 10)) == pytest.approx(0.5)
