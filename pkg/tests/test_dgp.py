"""Tests for the exact DGP algebra."""

import math

import pytest
import numpy as np

from conftest import enumerate_observed_cells, random_dist, random_theta

from src.late_sensitivity.core.dgp import (
    binary_observed_means,
    has_overlap,
    iv_beta,
    late_complier,
    late_defier,
    observed_law,
    overlap_margin,
    quantile,
    sample,
    type_effect,
    wald_ratio,
)
from src.late_sensitivity.models import DiscreteDist, SampleData
from src.late_sensitivity.models.theta import CELL_KEYS
from src.late_sensitivity.utils.exceptions import (
    NoCompliersError,
    NoDefiersError,
    ValidationError,
    WeakInstrumentError,
)


class TestLates:
    """Test complier and defier LATEs and the IV estimand."""

    def test_complier_late(self, continuous_base):
        """Test mu1 = mean(F10) - mean(G10)."""
        assert late_complier(continuous_base) == pytest.approx(-0.01)

    def test_defier_late_requires_defiers(self, continuous_base):
        """Test that mu2 is undefined with c = 0."""
        with pytest.raises(NoDefiersError):
            late_defier(continuous_base)

    def test_type_effect_ignores_share(self, continuous_base):
        """Test that the law difference is defined for empty types."""
        assert type_effect(continuous_base, 0, 1) == 0.0

    def test_complier_late_requires_compliers(self, continuous_base):
        """Test that mu1 is undefined with b = 0."""
        with pytest.raises(NoCompliersError):
            late_complier(continuous_base.with_changes(b=0.0, c=0.1))

    def test_beta_without_defiers_is_complier_late(self, continuous_base):
        """Test beta = mu1 when c = 0."""
        assert iv_beta(continuous_base) == pytest.approx(late_complier(continuous_base))

    def test_beta_weighted_form(self):
        """Test beta = (mu1*b - mu2*c) / (b - c) on a DGP with defiers."""
        rng = np.random.default_rng(11)
        theta = random_theta(rng)
        mu1, mu2 = late_complier(theta), late_defier(theta)
        expected = (mu1 * theta.b - mu2 * theta.c) / (theta.b - theta.c)
        assert iv_beta(theta) == pytest.approx(expected)

    def test_beta_undefined_when_b_equals_c(self, continuous_base):
        """Test the weak-instrument error."""
        zero = DiscreteDist.point_mass(0.0)
        theta = continuous_base.with_changes(b=0.1, c=0.1, f01=zero, g01=zero)
        with pytest.raises(WeakInstrumentError):
            iv_beta(theta)


class TestObservedLaw:
    """Test the observable law implied by a DGP."""

    def test_cells_of_builtin_base(self, continuous_base):
        """Test each observable cell of the built-in DGP."""
        law = observed_law(continuous_base)
        assert law.k1 == pytest.approx(0.5)
        assert law.k2 == pytest.approx(0.3)
        assert law.law_10.total_variation(continuous_base.f11) == pytest.approx(0.0, abs=1e-15)
        assert law.law_01.total_variation(continuous_base.g00) == pytest.approx(0.0, abs=1e-15)
        assert law.law_11.mean() == pytest.approx(0.0)
        assert law.law_00.mean() == pytest.approx(0.2 * 0.01 / 0.7)

    def test_empty_cell_is_none(self, continuous_base):
        """Test that a zero-probability cell is None."""
        law = observed_law(continuous_base.with_changes(a=0.0, b=0.5))
        assert law.law_10 is None
        assert law.cell_mean(1, 0) is None

    def test_wald_ratio_equals_beta(self):
        """Test that the Wald ratio of the observed law is the IV estimand."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            theta = random_theta(rng)
            if abs(theta.b - theta.c) < 1e-2:
                continue
            assert wald_ratio(observed_law(theta)) == pytest.approx(iv_beta(theta), abs=1e-12)

    def test_wald_ratio_weak_instrument(self, continuous_base):
        """Test that k1 = k2 makes the Wald ratio undefined."""
        zero = DiscreteDist.point_mass(0.0)
        law = observed_law(continuous_base.with_changes(b=0.1, c=0.1, f01=zero, g01=zero))
        with pytest.raises(WeakInstrumentError):
            wald_ratio(law)

    def test_matches_enumeration(self):
        """Test observed_law against brute-force enumeration on random DGPs."""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            theta = random_theta(rng)
            law = observed_law(theta)
            cells = enumerate_observed_cells(theta)
            for d, z in CELL_KEYS:
                cell = law.cell(d, z)
                if (d, z) not in cells:
                    assert cell is None
                    continue
                expected = DiscreteDist.from_atoms(cells[(d, z)].items())
                assert cell.total_variation(expected) <= 1e-12

    def test_matches_sampled_frequencies(self):
        """Test conditional laws against frequencies in a million sampled rows."""
        rng = np.random.default_rng(77)
        for trial in range(3):
            theta = random_theta(rng, max_atoms=3)
            law = observed_law(theta)
            data = sample(theta, 1_000_000, [77, trial])
            for d, z in CELL_KEYS:
                in_arm = data.z == z
                in_cell = in_arm & (data.d == d)
                rows = int(in_cell.sum())
                take_up = law.treatment_probability(d, z)
                se = np.sqrt(take_up * (1 - take_up) / in_arm.sum())
                assert rows / in_arm.sum() == pytest.approx(take_up, abs=5 * se + 1e-9)
                y = data.y[in_cell]
                for location, mass in law.cell(d, z).atoms:
                    se = max(np.sqrt(mass * (1 - mass) / rows), 1.0 / rows)
                    assert np.mean(y == location) == pytest.approx(mass, abs=5 * se)


class TestQuantileAndOverlap:
    """Test quantiles and the well-separated overlap condition."""

    def test_quantile_validates_level(self):
        """Test that quantile levels outside (0, 1) raise ValidationError."""
        with pytest.raises(ValidationError, match="eps"):
            quantile(DiscreteDist.point_mass(0.0), 1.5)

    def test_quantile_exact_on_atom_cdf(self):
        """Test that a level equal to an atom's cdf returns that atom."""
        dist = DiscreteDist(locations=(0.0, 1.0, 2.0), masses=(0.7, 0.2, 0.1))
        assert quantile(dist, 0.9) == 1.0
        assert quantile(dist, 0.7) == 0.0
        assert quantile(dist, 0.95) == 2.0

    def test_quantile_two_point_law(self):
        """Test the jump between two equally likely atoms."""
        dist = DiscreteDist(locations=(0.0, 1.0), masses=(0.5, 0.5))
        assert quantile(dist, 0.5) == 0.0
        assert quantile(dist, 0.500001) == 1.0

    def test_quantile_matches_linear_scan(self):
        """Test quantiles against a scan over exact cumulative sums, and monotonicity."""
        rng = np.random.default_rng(31)
        for _ in range(200):
            dist = random_dist(rng, max_atoms=6)
            levels = np.sort(rng.uniform(0.001, 0.999, size=10))
            results = [quantile(dist, float(eps)) for eps in levels]
            assert results == sorted(results)
            for eps, result in zip(levels, results):
                expected = next(
                    loc
                    for i, loc in enumerate(dist.locations)
                    if math.fsum(dist.masses[: i + 1]) >= eps or i == len(dist) - 1
                )
                assert result == expected

    def test_overlap_margin_of_builtin_base(self, continuous_base):
        """Test Q1(1-eps1) - Q2(eps1) = 0.9 - (-0.9)."""
        assert overlap_margin(continuous_base, 0.2) == pytest.approx(1.8)

    def test_has_overlap(self, continuous_base):
        """Test the overlap predicate."""
        assert has_overlap(continuous_base, 0.2, 0.3)
        assert not has_overlap(continuous_base, 0.2, 2.0)

    def test_has_overlap_false_with_defiers(self):
        """Test that DGPs with defiers are excluded."""
        theta = random_theta(np.random.default_rng(1))
        assert not has_overlap(theta, 0.2, 0.0)


class TestBinaryObservedMeans:
    """Test observable means of binary DGPs."""

    def test_builtin_binary_base(self, binary_base):
        """Test the cell means and probabilities."""
        means = binary_observed_means(binary_base)
        assert means.rho_10 == pytest.approx(0.5)
        assert means.rho_01 == pytest.approx(0.4)
        assert means.rho_11 == pytest.approx((0.3 * 0.5 + 0.2 * 0.49) / 0.5)
        assert means.treated_success_z0 == pytest.approx(0.15)
        assert means.untreated_failure_z1 == pytest.approx(0.3)

    def test_matches_general_observed_law(self, binary_base):
        """Test agreement with observed_law on the Bernoulli DGP."""
        law = observed_law(binary_base.to_theta())
        means = binary_observed_means(binary_base)
        for (d, z), value in zip(CELL_KEYS, means.as_tuple()):
            assert law.cell_mean(d, z) == pytest.approx(value)


class TestSampling:
    """Test synthetic sampling from a DGP."""

    def test_sample_is_deterministic(self, continuous_base):
        """Test that the same seed reproduces the same rows."""
        a = sample(continuous_base, 200, 7)
        b = sample(continuous_base, 200, 7)
        assert isinstance(a, SampleData)
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.d, b.d)
        assert np.array_equal(a.z, b.z)

    def test_sequence_seeds_differ(self, continuous_base):
        """Test that distinct seed sequences give distinct samples."""
        a = sample(continuous_base, 200, [1, 0, 0])
        b = sample(continuous_base, 200, [1, 0, 1])
        assert not np.array_equal(a.y, b.y)

    def test_sample_moments(self, continuous_base):
        """Test that large samples reproduce P(Z=1), k1 and k2."""
        data = sample(continuous_base, 40000, 3)
        z1 = data.z == 1
        assert z1.mean() == pytest.approx(0.5, abs=0.02)
        assert data.d[z1].mean() == pytest.approx(0.5, abs=0.02)
        assert data.d[~z1].mean() == pytest.approx(0.3, abs=0.02)

    def test_outcomes_lie_on_atoms(self, continuous_base):
        """Test that sampled outcomes are atoms of the relevant laws."""
        data = sample(continuous_base, 500, 9)
        atoms = set()
        for dist in continuous_base.distributions().values():
            atoms.update(dist.locations)
        assert set(np.unique(data.y)) <= atoms

    def test_rejects_empty_sample(self, continuous_base):
        """Test that n must be positive."""
        with pytest.raises(ValidationError):
            sample(continuous_base, 0, 1)
