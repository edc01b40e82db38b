"""Tests for boundary classification of the complier LATE sign."""

import pytest
import numpy as np

from src.late_sensitivity.core.boundary import (
    binary_boundary,
    classify_general_bounded,
    classify_interior,
    classify_one_sided,
    classify_worst_case,
)
from src.late_sensitivity.core.dgp import binary_observed_means, iv_beta
from src.late_sensitivity.data.fixtures import PUBLISHED_SUMMARIES
from src.late_sensitivity.models import BinaryTheta, Regime, Verdict
from src.late_sensitivity.utils.exceptions import (
    InconsistentInputsError,
    OrientationError,
    ValidationError,
)


class TestBinaryBoundary:
    """Test |beta|(k1 - k2)."""

    def test_published_summary(self):
        """Test the same-sex siblings boundary."""
        summary = PUBLISHED_SUMMARIES["angrist-evans"]
        boundary = binary_boundary(summary.beta, summary.k1, summary.k2)
        assert round(boundary, 4) == 0.0052

    def test_sign_of_beta_does_not_matter(self):
        """Test that the boundary uses |beta|."""
        assert binary_boundary(0.2, 0.6, 0.1) == binary_boundary(-0.2, 0.6, 0.1)

    def test_orientation_required(self):
        """Test that k1 <= k2 raises with a relabeling hint."""
        with pytest.raises(OrientationError, match="relabel Z"):
            binary_boundary(-0.1, 0.3, 0.3)

    def test_probabilities_validated(self):
        """Test that k1 outside [0, 1] is rejected."""
        with pytest.raises(ValidationError):
            binary_boundary(-0.1, 1.2, 0.3)


class TestClassifyInterior:
    """Test the interior rule: SafeSide iff eta < |beta|(k1 - k2)."""

    def test_safe_side(self):
        """Test a defier share below the boundary."""
        report = classify_interior(-0.0950, 0.4105, 0.3557, 0.003)
        assert report.verdict is Verdict.SAFE_SIDE
        assert report.regime is Regime.INTERIOR
        assert report.eta == 0.003
        assert report.margin == pytest.approx(report.boundary - 0.003)

    def test_danger_side(self):
        """Test a defier share above the boundary."""
        report = classify_interior(-0.0950, 0.4105, 0.3557, 0.01)
        assert report.verdict is Verdict.DANGER_SIDE
        assert not report.is_safe

    def test_equality_is_danger_side(self):
        """Test that eta equal to the boundary is not safe."""
        report = classify_interior(-0.5, 0.75, 0.25, 0.25)
        assert report.boundary == 0.25
        assert report.margin == 0.0
        assert report.verdict is Verdict.DANGER_SIDE

    def test_eta_above_k2_rejected(self):
        """Test that eta must not exceed k2."""
        with pytest.raises(ValidationError, match="eta"):
            classify_interior(-0.1, 0.6, 0.1, 0.2)

    def test_positive_beta_is_relabeled(self):
        """Test that beta > 0 is classified on the relabeled outcome."""
        report = classify_interior(0.2, 0.6, 0.2, 0.01)
        assert report.relabeled
        assert report.verdict is Verdict.SAFE_SIDE
        assert any("relabeled" in note for note in report.notes)

    def test_zero_beta_is_danger_side(self):
        """Test that beta = 0 gives a zero boundary and a note."""
        report = classify_interior(0.0, 0.6, 0.2, 0.0)
        assert report.boundary == 0.0
        assert report.verdict is Verdict.DANGER_SIDE
        assert any("beta = 0" in note for note in report.notes)


class TestClassifyOneSided:
    """Test the testable one-sided rule."""

    def test_jtpa_preset_is_safe(self):
        """Test the job-training summary numbers, whose cell exceeds the reported k2."""
        summary = PUBLISHED_SUMMARIES["jtpa"]
        with pytest.raises(InconsistentInputsError):
            classify_one_sided(summary.beta, summary.k1, summary.k2, summary.cell_prob)
        report = classify_one_sided(
            summary.beta, summary.k1, summary.k2, summary.cell_prob, check_consistency=False
        )
        assert any("inconsistent inputs" in note for note in report.notes)
        assert report.boundary == pytest.approx(0.0363 * (0.6228 - 0.0112))
        assert abs(report.boundary - 0.0222) <= 5e-5
        assert report.boundary > 0.0157
        assert report.verdict is Verdict.SAFE_SIDE
        assert report.cell_prob == 0.0157

    def test_danger_side(self):
        """Test a cell probability above the boundary."""
        report = classify_one_sided(-0.05, 0.5, 0.2, 0.1)
        assert report.verdict is Verdict.DANGER_SIDE

    def test_cell_above_k2_is_inconsistent(self):
        """Test that P(Y=D=1|Z=0) > P(D=1|Z=0) cannot come from a DGP."""
        with pytest.raises(InconsistentInputsError):
            classify_one_sided(-0.05, 0.5, 0.2, 0.3)

    def test_positive_beta_compares_complement(self):
        """Test that beta > 0 compares k2 - cell_prob."""
        report = classify_one_sided(0.1, 0.5, 0.2, 0.19)
        assert report.quantity_name == "cell_prob_complement"
        assert report.quantity == pytest.approx(0.01)
        assert report.verdict is Verdict.SAFE_SIDE


class TestClassifyGeneralBounded:
    """Test the sufficient rule for bounded outcomes."""

    def test_safe_side_is_sufficient_only(self):
        """Test that 2*M*eta below the boundary is SafeSide and flagged sufficient."""
        report = classify_general_bounded(-0.2, 0.6, 0.2, 0.01, 1.0)
        assert report.quantity == pytest.approx(0.02)
        assert report.verdict is Verdict.SAFE_SIDE
        assert report.sufficient_only
        assert report.eta == pytest.approx(0.02)

    def test_danger_side_note(self):
        """Test that DangerSide carries the no-proof note."""
        report = classify_general_bounded(-0.2, 0.6, 0.2, 0.05, 1.0)
        assert report.verdict is Verdict.DANGER_SIDE
        assert any("sufficient condition only" in note for note in report.notes)

    def test_bound_must_be_positive(self):
        """Test that M <= 0 is rejected."""
        with pytest.raises(ValidationError):
            classify_general_bounded(-0.2, 0.6, 0.2, 0.05, 0.0)

    def test_safe_side_implies_interior_safe_side(self):
        """Test that with M >= 1/2 a general SafeSide verdict is also an interior one."""
        rng = np.random.default_rng(13)
        safe = 0
        for _ in range(1000):
            k2 = rng.uniform(0.0, 0.8)
            k1 = rng.uniform(k2 + 0.01, 1.0)
            beta = rng.uniform(-1.0, 1.0)
            eta = rng.uniform(0.0, min(k2, 0.1))
            general = classify_general_bounded(beta, k1, k2, eta, rng.uniform(0.5, 3.0))
            if general.is_safe:
                safe += 1
                assert classify_interior(beta, k1, k2, eta).is_safe
        assert safe >= 50


class TestClassifyWorstCase:
    """Test worst-case classification at interval endpoints."""

    def test_flags_extension_and_uses_endpoints(self):
        """Test that margin is boundary_lo - quantity_hi."""
        point = classify_one_sided(-0.1, 0.6, 0.1, 0.01)
        worst = classify_worst_case(point, (0.03, 0.07), (0.005, 0.02))
        assert worst.extension
        assert worst.margin == pytest.approx(0.01)
        assert worst.verdict is Verdict.SAFE_SIDE
        assert worst.regime is point.regime

    def test_can_flip_to_danger(self):
        """Test that wide intervals lose the SafeSide verdict."""
        point = classify_one_sided(-0.1, 0.6, 0.1, 0.01)
        worst = classify_worst_case(point, (0.01, 0.07), (0.005, 0.04))
        assert point.is_safe
        assert worst.verdict is Verdict.DANGER_SIDE

    def test_rejects_reversed_interval(self):
        """Test that lo > hi is rejected."""
        point = classify_one_sided(-0.1, 0.6, 0.1, 0.01)
        with pytest.raises(ValidationError):
            classify_worst_case(point, (0.07, 0.03), (0.0, 0.01))


def _random_binary_with_defiers(rng, max_defiers, takers_success=1.0):
    return BinaryTheta(
        a=float(rng.uniform(0.0, 0.2)),
        b=float(rng.uniform(0.2, 0.5)),
        c=float(rng.uniform(0.0, max_defiers)),
        pz=float(rng.uniform(0.2, 0.8)),
        r11=float(rng.uniform(0.0, takers_success)),
        r10=float(rng.uniform()),
        r01=float(rng.uniform(0.0, takers_success)),
        r00=float(rng.uniform()),
        t11=float(rng.uniform()),
        t10=float(rng.uniform()),
        t01=float(rng.uniform()),
        t00=float(rng.uniform()),
    )


class TestSafeSideGuarantee:
    """SafeSide verdicts never coexist with a complier LATE of the wrong sign."""

    def test_interior_rule_over_random_dgps(self):
        """Test 1000 binary DGPs: c <= eta < |beta|(k1-k2) and beta < 0 imply mu1 < 0."""
        rng = np.random.default_rng(20240101)
        qualifying = 0
        for _ in range(1000):
            theta = _random_binary_with_defiers(rng, max_defiers=0.1)
            beta = iv_beta(theta.to_theta())
            if beta >= 0:
                continue
            eta = theta.c
            report = classify_interior(beta, theta.k1, theta.k2, eta)
            if not report.is_safe:
                continue
            qualifying += 1
            assert theta.r10 - theta.t10 < 0
        assert qualifying >= 50

    def test_one_sided_rule_over_random_dgps(self):
        """Test 1000 binary DGPs: P(Y=D=1|Z=0) < |beta|(k1-k2) and beta < 0 imply mu1 < 0."""
        rng = np.random.default_rng(7)
        qualifying = 0
        for _ in range(1000):
            theta = _random_binary_with_defiers(rng, max_defiers=0.2, takers_success=0.2)
            beta = iv_beta(theta.to_theta())
            if beta >= 0:
                continue
            cell = binary_observed_means(theta).treated_success_z0
            report = classify_one_sided(beta, theta.k1, theta.k2, min(cell, theta.k2))
            if not report.is_safe:
                continue
            qualifying += 1
            assert theta.r10 - theta.t10 < 0
        assert qualifying >= 20
