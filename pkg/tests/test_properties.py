"""Property-based checks of the bounds, verdicts and forged twins."""

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from conftest import random_binary_danger_theta, random_theta, random_well_separated_theta

from src.late_sensitivity.core.adversarial import (
    forge_binary_interior,
    forge_continuous,
    verify_equivalence,
)
from src.late_sensitivity.core.boundary import binary_boundary, classify_interior
from src.late_sensitivity.core.dgp import iv_beta, late_complier, late_defier
from src.late_sensitivity.core.estimation import (
    magnitude_lower_bound,
    sign_under_dominance,
    tightness_grid_search,
)
from src.late_sensitivity.models import Verdict

PROPERTY_SETTINGS = settings(
    max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@PROPERTY_SETTINGS
@given(seed=seeds)
def test_magnitude_bound_holds_on_every_dgp(seed):
    """max{|mu1|, |mu2|} >= |beta|*gamma for DGPs with compliers and defiers."""
    theta = random_theta(np.random.default_rng(seed))
    assume(abs(theta.b - theta.c) > 1e-6)
    beta = iv_beta(theta)
    largest = max(abs(late_complier(theta)), abs(late_defier(theta)))
    assert largest >= magnitude_lower_bound(beta, theta.k1, theta.k2) - 1e-10


def dominating_theta(rng: np.random.Generator, attempts: int = 500):
    """First random DGP with b > c and |mu1| >= |mu2| > 0, or None."""
    for _ in range(attempts):
        theta = random_theta(rng)
        mu1, mu2 = late_complier(theta), late_defier(theta)
        if theta.b > theta.c + 1e-6 and abs(mu1) >= abs(mu2) and abs(mu1) > 1e-9:
            return theta
    return None


@PROPERTY_SETTINGS
@given(seed=seeds)
def test_sign_follows_beta_under_dominance(seed):
    """|mu1| >= |mu2| with more compliers than defiers fixes sign(mu1) = sign(beta)."""
    theta = dominating_theta(np.random.default_rng(seed))
    assert theta is not None
    mu1 = late_complier(theta)
    assert sign_under_dominance(iv_beta(theta), 1).sign == int(np.sign(mu1))


@PROPERTY_SETTINGS
@given(
    beta=st.floats(min_value=0.01, max_value=5.0),
    negative=st.booleans(),
    k2=st.floats(min_value=0.0, max_value=0.9),
    spread=st.floats(min_value=0.01, max_value=1.0),
)
def test_grid_minimum_matches_closed_form(beta, negative, k2, spread):
    """The grid minimum is within two grid steps of |beta|(k1-k2)/(k1+k2)."""
    k1 = min(1.0, k2 + spread)
    assume(k1 > k2)
    certificate = tightness_grid_search(-beta if negative else beta, k1, k2)
    assert certificate.minimum >= certificate.closed_form - 1e-12
    assert certificate.gap <= 2 * certificate.grid_spacing


@PROPERTY_SETTINGS
@given(
    beta=st.floats(min_value=-1.0, max_value=1.0),
    k2=st.floats(min_value=0.0, max_value=0.9),
    spread=st.floats(min_value=0.01, max_value=0.1),
    eta_fraction=st.floats(min_value=0.0, max_value=1.0),
)
def test_interior_verdict_matches_boundary(beta, k2, spread, eta_fraction):
    """SafeSide exactly when eta < |beta|(k1-k2)."""
    k1 = min(1.0, k2 + spread)
    assume(k1 > k2)
    eta = k2 * eta_fraction
    report = classify_interior(beta, k1, k2, eta)
    expected = Verdict.SAFE_SIDE if eta < binary_boundary(beta, k1, k2) else Verdict.DANGER_SIDE
    assert report.verdict is expected


@PROPERTY_SETTINGS
@given(seed=seeds)
def test_forged_continuous_twin_is_equivalent(seed):
    """A forged continuous twin has the base's observable law and a flipped sign."""
    theta, config = random_well_separated_theta(np.random.default_rng(seed))
    result = forge_continuous(theta, config)
    assert verify_equivalence(theta, result.twin) <= 1e-12
    assert late_complier(theta) < 0 < result.mu1_twin


@PROPERTY_SETTINGS
@given(seed=seeds)
def test_forged_binary_twin_is_equivalent(seed):
    """A forged binary twin keeps the cell means and has mu1 >= 0."""
    theta, eta = random_binary_danger_theta(np.random.default_rng(seed))
    result = forge_binary_interior(theta, eta)
    assert result.equivalence_distance <= 1e-12
    assert result.mu1_twin >= -1e-12
    assert result.twin.c <= eta + 1e-12


@PROPERTY_SETTINGS
@given(first=seeds, second=seeds)
def test_equivalence_distance_is_symmetric(first, second):
    """verify_equivalence(a, b) = verify_equivalence(b, a), within [0, 1]."""
    a = random_theta(np.random.default_rng(first))
    b = random_theta(np.random.default_rng(second))
    distance = verify_equivalence(a, b)
    assert distance == pytest.approx(verify_equivalence(b, a))
    assert 0.0 <= distance <= 1.0


class TestFixedDrawSuites:
    """Seeded 1000-draw versions of the bound and sign checks."""

    def test_magnitude_bound_over_1000_dgps(self):
        """Test max{|mu1|, |mu2|} >= |beta|*gamma - 1e-10 with zero violations."""
        rng = np.random.default_rng(505)
        checked = 0
        for _ in range(1000):
            theta = random_theta(rng)
            if theta.b == theta.c:
                continue
            bound = magnitude_lower_bound(iv_beta(theta), theta.k1, theta.k2)
            largest = max(abs(late_complier(theta)), abs(late_defier(theta)))
            assert largest >= bound - 1e-10
            checked += 1
        assert checked >= 990

    def test_dominance_sign_over_1000_dgps(self):
        """Test sign(mu1) = sign(beta) whenever b > c and |mu1| >= |mu2|."""
        rng = np.random.default_rng(606)
        qualifying = 0
        for _ in range(1000):
            theta = random_theta(rng)
            mu1, mu2 = late_complier(theta), late_defier(theta)
            if theta.b <= theta.c or abs(mu1) < abs(mu2) or mu1 == 0:
                continue
            qualifying += 1
            assert sign_under_dominance(iv_beta(theta), 1).sign == int(np.sign(mu1))
        assert qualifying >= 100
