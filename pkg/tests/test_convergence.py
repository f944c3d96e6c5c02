"""
Tests for S(n, p), phi(p), the verdict, the Holder bound and beta_critical.
"""

import math

import pytest

from src.analysis.convergence import (
    S_np_closed,
    S_np_cone,
    S_np_mc,
    beta_critical,
    beta_tilde,
    default_p_grid,
    distortion_check,
    holder_bound,
    phi_closed,
    phi_curve,
    phi_empirical,
    refine_grid,
    verdict,
)
from src.exceptions import InsufficientDataError, UnsupportedCombinationError, UnsupportedModelError
from src.models.cascade import (
    BadicIndependentModel,
    CompoundPoissonModel,
    InhomogeneousBernoulliMeasure,
    LebesgueMeasure,
    LogInfDivisibleModel,
)
from src.models.laws import DeterministicLaw, PowerLawIntensity, WeightVectorLaw
from src.models.reports import VerdictKind
from tests.conftest import ATOM_LAW

LEB = LebesgueMeasure()
PHI_CANONICAL_2 = -math.log2(0.625)


class TestMomentFunctional:
    """Test S(n, p)."""

    def test_unit_weights(self, unit_model):
        """Test W = 1 gives b^(-n(p-1))."""
        assert S_np_closed(unit_model, LEB, 3, 2.0) == pytest.approx(0.125)

    def test_canonical(self, canonical_model):
        """Test the {1/2, 3/2} model: 0.625 at n = 1 and 0.390625 at n = 2."""
        assert S_np_closed(canonical_model, LEB, 1, 2.0) == pytest.approx(0.625)
        assert S_np_closed(canonical_model, LEB, 2, 2.0) == pytest.approx(0.390625)

    def test_closed_form_is_badic_only(self, unit_poisson_model):
        """Test cone families have no b-adic closed form."""
        with pytest.raises(UnsupportedModelError):
            S_np_closed(unit_poisson_model, LEB, 2, 2.0)

    def test_cone_identity(self, unit_poisson_model, gaussian_logid_model):
        """Test S(n, p) for cone families from E|P_k|^p = exp(Lambda_k kappa(p))."""
        assert S_np_cone(unit_poisson_model, 3, 2.0) == pytest.approx(0.125)
        assert S_np_cone(gaussian_logid_model, 2, 2.0) == pytest.approx(0.25 * math.exp(2 * math.log(2) * 0.5))

    def test_monte_carlo_unit(self, unit_model):
        """Test W = 1 gives the exact value with zero variance."""
        estimate, stderr = S_np_mc(unit_model, LEB, 3, 2.0, replicas=20)
        assert estimate == pytest.approx(0.125)
        assert stderr == pytest.approx(0.0, abs=1e-15)

    def test_monte_carlo_canonical(self, canonical_model):
        """Test the Monte Carlo estimate matches 0.390625 within 4 standard errors."""
        estimate, stderr = S_np_mc(canonical_model, LEB, 2, 2.0, replicas=4000, seed=11)
        assert abs(estimate - 0.390625) <= 4.0 * stderr

    def test_monte_carlo_cone_unit(self, unit_poisson_model):
        """Test a compound Poisson cascade with W = 1 gives b^(-n(p-1))."""
        estimate, _ = S_np_mc(unit_poisson_model, LEB, 2, 2.0, replicas=10, m_sub=4)
        assert estimate == pytest.approx(0.25)

    def test_cone_needs_lebesgue(self, unit_poisson_model):
        """Test cone families refuse other reference measures."""
        measure = InhomogeneousBernoulliMeasure(vectors=[[0.25, 0.75]])
        with pytest.raises(UnsupportedCombinationError):
            S_np_mc(unit_poisson_model, measure, 2, 2.0, replicas=10)


class TestPhi:
    """Test the decay rate phi(p)."""

    def test_canonical(self, canonical_model):
        """Test phi(2) = -log2(0.625) = 0.678072."""
        assert phi_closed(canonical_model, LEB, 2.0) == pytest.approx(0.678072, abs=1e-6)

    def test_atom_model(self, atom_model):
        """Test phi(1/2) = 1/2 for W in {0, 4}."""
        assert phi_closed(atom_model, LEB, 0.5) == pytest.approx(0.5)

    def test_zero_order(self, canonical_model):
        """Test phi(0) = -1."""
        assert phi_closed(canonical_model, LEB, 0.0) == pytest.approx(-1.0)

    def test_unit_poisson(self, unit_poisson_model):
        """Test W = 1 compound Poisson cascades have phi(p) = p - 1."""
        for p in (0.5, 1.0, 1.7):
            assert phi_closed(unit_poisson_model, LEB, p) == pytest.approx(p - 1.0)

    def test_gaussian_logid(self, gaussian_logid_model):
        """Test phi(2) = 1 - sigma_1^2 = 0.5."""
        assert phi_closed(gaussian_logid_model, LEB, 2.0) == pytest.approx(0.5)

    def test_periodic_levels(self, canonical_model):
        """Test periodic sequences average the level terms over a period."""
        model = BadicIndependentModel(b=2, levels=[canonical_model.levels[0], WeightVectorLaw(law=DeterministicLaw())])
        assert phi_closed(model, LEB, 2.0) == pytest.approx((PHI_CANONICAL_2 + 1.0) / 2.0)

    def test_bernoulli_measure(self, unit_model):
        """Test W = 1 against lambda = (1/4, 3/4): phi(2) = -log2(1/16 + 9/16)."""
        measure = InhomogeneousBernoulliMeasure(vectors=[[0.25, 0.75]])
        assert phi_closed(unit_model, measure, 2.0) == pytest.approx(PHI_CANONICAL_2)

    def test_power_law_surrogate(self):
        """Test beta~ for a non scale-invariant intensity is a finite positive surrogate."""
        model = CompoundPoissonModel(b=2, beta=1.0, intensity=PowerLawIntensity(delta=1.0, exponent=1.8),
                                     weight=DeterministicLaw())
        assert 0.0 < beta_tilde(model, n_max=10) < math.inf

    def test_beta_tilde_scale_invariant(self, lognormal_poisson_model):
        """Test beta~ = beta delta for dr/r^2 intensities."""
        assert beta_tilde(lognormal_poisson_model) == pytest.approx(1.0)


class TestPGrid:
    """Test the p-grid and its refinement."""

    def test_default_grid(self):
        """Test 64 points k/32 on (0, 2]."""
        grid = default_p_grid()
        assert len(grid) == 64
        assert grid[0] == pytest.approx(1.0 / 32.0)
        assert grid[-1] == 2.0
        assert 0.5 in grid

    def test_refinement(self):
        """Test three points are added inside a sign-change cell."""
        refined = refine_grid([0.5, 1.0, 1.5], [-1.0, -0.5, 0.5])
        assert refined == [0.5, 1.0, 1.125, 1.25, 1.375, 1.5]

    def test_unit_curve(self, unit_model):
        """Test phi(p) = p - 1 row by row on a given grid."""
        points = phi_curve(unit_model, LEB, [0.25, 0.5, 1.0, 2.0])
        assert [pt.value for pt in points] == pytest.approx([-0.75, -0.5, 0.0, 1.0])


class TestEmpiricalPhi:
    """Test empirical slopes of -log_b S(n, p)."""

    def test_unit_slope(self, unit_model):
        """Test W = 1 gives slope 1 at p = 2."""
        estimate = phi_empirical(unit_model, LEB, 2.0, (2, 6), replicas=10)
        assert estimate.slope == pytest.approx(1.0)
        assert estimate.stderr == pytest.approx(0.0, abs=1e-12)

    def test_canonical_slope(self, canonical_model):
        """Test the canonical slope at p = 2 is 0.678 +/- 0.05."""
        estimate = phi_empirical(canonical_model, LEB, 2.0, (2, 7), replicas=2000, seed=5)
        assert estimate.slope == pytest.approx(PHI_CANONICAL_2, abs=0.05)

    def test_too_few_generations(self, unit_model):
        """Test fewer than four generations are refused."""
        with pytest.raises(InsufficientDataError):
            phi_empirical(unit_model, LEB, 2.0, (2, 4), replicas=10)


class TestVerdict:
    """Test the convergence criterion."""

    def test_canonical_converges(self, canonical_model):
        """Test the canonical model converges with p* = 2 and gamma* > 0."""
        report = verdict(canonical_model)
        assert report.verdict.kind == VerdictKind.CONVERGES_UNIFORMLY
        assert report.verdict.p_star == 2.0
        assert report.verdict.gamma_star > 0.0

    def test_atom_degenerates(self, atom_model):
        """Test the atom model degenerates with p* = 1/2 and structural distortion."""
        report = verdict(atom_model)
        assert report.verdict.kind == VerdictKind.DEGENERATES_TO_ZERO
        assert report.verdict.p_star == 0.5
        assert report.verdict.distortion == "structural"

    def test_unit_converges(self, unit_model):
        """Test W = 1 converges and reports phi(2) = 1."""
        report = verdict(unit_model)
        assert report.verdict.kind == VerdictKind.CONVERGES_UNIFORMLY
        phi_2 = [pt.value for pt in report.closed_form if pt.p == 2.0][0]
        assert phi_2 == pytest.approx(1.0)

    def test_cone_without_distortion_is_inconclusive(self):
        """Test phi(p) = p - 4^(p-1) is positive only on (1/2, 1), so a cone model needs the distortion check."""
        model = CompoundPoissonModel(b=2, beta=1.0, weight=ATOM_LAW)
        report = verdict(model)
        assert report.verdict.kind == VerdictKind.INCONCLUSIVE
        assert report.verdict.distortion == "not established"
        assert any("distortion" in warning for warning in report.warnings)

    def test_badic_distortion_is_structural(self, atom_model):
        """Test b-adic cascades are constant on intervals."""
        check = distortion_check(atom_model, LEB, 0.5, (2, 4), replicas=10)
        assert check.supported
        assert check.log_ratios == [0.0, 0.0, 0.0]


class TestHolderAndCritical:
    """Test gamma* and beta_critical."""

    def test_holder_canonical(self, canonical_model):
        """Test gamma* >= phi(2)/2."""
        assert holder_bound(canonical_model, LEB, 2.0) >= PHI_CANONICAL_2 / 2.0 - 1e-12

    def test_holder_gaussian(self, gaussian_logid_model):
        """Test max (q-1)(1-q/4)/q over (1, 2] is 0.25."""
        assert holder_bound(gaussian_logid_model, LEB, 2.0) == pytest.approx(0.25, abs=1e-9)

    def test_holder_needs_p_above_one(self, canonical_model):
        """Test p must exceed 1."""
        with pytest.raises(ValueError):
            holder_bound(canonical_model, LEB, 1.0)

    def test_beta_unit(self, unit_model):
        """Test phi(p) = p - 1 gives beta = 1."""
        assert beta_critical(unit_model, LEB) == 1.0

    def test_beta_canonical(self, canonical_model):
        """Test the canonical model has beta = 1."""
        assert beta_critical(canonical_model, LEB) == 1.0

    def test_beta_gaussian(self):
        """Test phi(p) = (p-1)(1-0.75p) has its root at 4/3."""
        model = LogInfDivisibleModel(b=2, drift=(-0.75, 0.0), gaussian=((1.5, 0.0), (0.0, 0.0)))
        assert beta_critical(model, LEB) == pytest.approx(4.0 / 3.0, abs=1e-9)


FAMILIES = ["canonical_model", "atom_model", "unit_poisson_model", "lognormal_poisson_model", "gaussian_logid_model"]
P_POINTS = [0.125 * k for k in range(1, 17)]


class TestPhiProperties:
    """Test structural properties of the closed-form phi."""

    @pytest.mark.parametrize("model_name", FAMILIES)
    def test_midpoint_concave(self, request, model_name):
        """Test phi((a + c)/2) >= (phi(a) + phi(c))/2 for increasing p-points."""
        model = request.getfixturevalue(model_name)
        for i, a in enumerate(P_POINTS):
            for c in P_POINTS[i + 2:]:
                middle = phi_closed(model, LEB, (a + c) / 2.0)
                chord = (phi_closed(model, LEB, a) + phi_closed(model, LEB, c)) / 2.0
                assert middle >= chord - 1e-9

    @pytest.mark.parametrize("model_name", FAMILIES)
    def test_nonpositive_at_zero_and_one(self, request, model_name):
        """Test phi(0) <= 0 and phi(1) <= 0."""
        model = request.getfixturevalue(model_name)
        assert phi_closed(model, LEB, 0.0) <= 1e-12
        assert phi_closed(model, LEB, 1.0) <= 1e-12

    def test_nonpositive_under_bernoulli_measure(self, canonical_model):
        """Test phi(0) <= 0 and phi(1) <= 0 against lambda = (1/4, 3/4)."""
        measure = InhomogeneousBernoulliMeasure(vectors=[[0.25, 0.75]])
        assert phi_closed(canonical_model, measure, 0.0) <= 1e-12
        assert phi_closed(canonical_model, measure, 1.0) <= 1e-12

    @pytest.mark.parametrize("n, m", [(1, 4), (2, 3), (3, 3)])
    @pytest.mark.parametrize("p", [0.5, 1.5, 2.0])
    def test_log_additive(self, canonical_model, n, m, p):
        """Test S(n + m, p) = S(n, p) S(m, p) for a homogeneous model."""
        product = S_np_closed(canonical_model, LEB, n, p) * S_np_closed(canonical_model, LEB, m, p)
        assert S_np_closed(canonical_model, LEB, n + m, p) == pytest.approx(product, rel=1e-12)


class TestEmpiricalAgreement:
    """Test Monte Carlo slopes against the closed form."""

    @pytest.mark.parametrize("p", [0.5, 1.5, 2.0])
    def test_canonical_within_band(self, canonical_model, p):
        """Test phi(p) lies inside the band of the empirical slope."""
        estimate = phi_empirical(canonical_model, LEB, p, (2, 7), replicas=2000, seed=17)
        low, high = estimate.band
        assert low <= phi_closed(canonical_model, LEB, p) <= high

    def test_atom_model_within_band(self, atom_model):
        """Test phi(1/2) = 1/2 lies inside the band of the empirical slope."""
        estimate = phi_empirical(atom_model, LEB, 0.5, (2, 5), replicas=4000, seed=17)
        low, high = estimate.band
        assert low <= 0.5 <= high


class TestDistortionOnCones:
    """Test the sup-over-interval distortion check for cone families."""

    def test_unit_weights(self, unit_poisson_model):
        """Test Q = 1 gives zero log ratios and is supported below phi(2) ln 2."""
        check = distortion_check(unit_poisson_model, LEB, 2.0, (2, 4), replicas=20, m_sub=4)
        assert check.method == "monte-carlo"
        assert check.log_ratios == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
        assert check.threshold == pytest.approx(math.log(2))
        assert check.supported

    def test_lognormal_marks(self, lognormal_poisson_model):
        """Test the interval supremum exceeds the pointwise moment and the rate is finite."""
        check = distortion_check(lognormal_poisson_model, LEB, 2.0, (2, 4), replicas=400, seed=23, m_sub=4)
        assert check.n_values == [2, 3, 4]
        assert all(math.isfinite(value) for value in check.log_ratios)
        assert sum(check.log_ratios) / len(check.log_ratios) > 0.0
        assert math.isfinite(check.rate)
        assert check.stderr > 0.0
        assert check.threshold == pytest.approx(phi_closed(lognormal_poisson_model, LEB, 2.0) * math.log(2))

    def test_needs_two_generations(self, lognormal_poisson_model):
        """Test a single generation is refused."""
        with pytest.raises(InsufficientDataError):
            distortion_check(lognormal_poisson_model, LEB, 2.0, (3, 3), replicas=10)
