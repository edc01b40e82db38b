"""Adversarial twins: observationally equivalent DGPs with the opposite LATE sign.

Starting from a DGP without defiers whose complier LATE equals beta < 0, each
forge moves a small share of the population into a defier type and redistributes
outcome mass so that every observable law is unchanged, while the twin's
complier LATE becomes nonnegative.
"""

import logging
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..models.config import ForgeConfig
from ..models.distribution import DiscreteDist
from ..models.results import EQUIVALENCE_TOLERANCE, ForgeResult, MembershipFlags
from ..models.theta import CELL_KEYS, SHARE_TOLERANCE, BinaryTheta, Theta
from ..utils.exceptions import ConstructionDegenerateError, PreconditionViolatedError
from ..utils.validation import validate_config
from .dgp import binary_observed_means, iv_beta, observed_law, type_effect

logger = logging.getLogger(__name__)

# Tolerance for the LATE identity (mu1*b - mu2*c)/(b - c) = beta on a twin
IDENTITY_TOLERANCE = 1e-10
# Means of a binary twin may drift outside [0, 1] by rounding at most this much
MEAN_TOLERANCE = 1e-12

METHOD_CONTINUOUS = "continuous"
METHOD_BINARY_INTERIOR = "binary-interior"
METHOD_BINARY_ONE_SIDED = "binary-one-sided"


def _require(holds: bool, inequality: str, detail: Optional[str] = None) -> None:
    if not holds:
        raise PreconditionViolatedError(inequality, detail)


def _as_theta(model: Union[Theta, BinaryTheta]) -> Theta:
    return model.to_theta() if isinstance(model, BinaryTheta) else model


def verify_equivalence(
    theta: Union[Theta, BinaryTheta], twin: Union[Theta, BinaryTheta]
) -> float:
    """
    Distance between the observable laws of two DGPs.

    The maximum of: total variation between the laws of Y given (D, Z) in each
    of the four cells, total variation between the (D, Z) laws, and the gaps in
    k1, k2 and P(Z=1).
    """
    law_a = observed_law(_as_theta(theta))
    law_b = observed_law(_as_theta(twin))

    gaps = [
        abs(law_a.k1 - law_b.k1),
        abs(law_a.k2 - law_b.k2),
        abs(law_a.pz - law_b.pz),
        0.5
        * sum(
            abs(law_a.joint_probability(d, z) - law_b.joint_probability(d, z))
            for d, z in CELL_KEYS
        ),
    ]
    for d, z in CELL_KEYS:
        cell_a, cell_b = law_a.cell(d, z), law_b.cell(d, z)
        if cell_a is None and cell_b is None:
            continue
        if cell_a is None or cell_b is None:
            gaps.append(1.0)
            continue
        gaps.append(cell_a.total_variation(cell_b))
    return min(1.0, float(max(gaps)))


def verify_membership(
    twin: Theta,
    config: ForgeConfig,
    base_beta: float,
    base_k1: float,
    base_k2: float,
) -> MembershipFlags:
    """Check each clause of the bounded-defier parameter space on a twin."""
    a, b, c = twin.a, twin.b, twin.c
    mu1 = type_effect(twin, 1, 0)
    mu2 = type_effect(twin, 0, 1)

    if b != c:
        identity = (mu1 * b - mu2 * c) / (b - c)
        late_identity = abs(identity - base_beta) <= IDENTITY_TOLERANCE
    else:
        late_identity = False

    return MembershipFlags(
        shares_valid=min(a, b, c) >= 0.0 and a + b + c <= 1.0 + SHARE_TOLERANCE,
        k1_matches=abs(a + b - base_k1) <= SHARE_TOLERANCE,
        k2_matches=abs(a + c - base_k2) <= SHARE_TOLERANCE,
        outcome_bound=all(
            dist.supported_within(config.M) for dist in twin.distributions().values()
        ),
        late_identity=late_identity,
        defier_share=0.0 <= c <= config.eta + SHARE_TOLERANCE,
        complier_magnitude=abs(mu1) >= abs(base_beta) - IDENTITY_TOLERANCE,
        sign_agreement=bool(np.sign(mu1) == np.sign(mu2)),
    )


def _binary_membership(
    twin: BinaryTheta,
    eta: float,
    base_beta: float,
    base_k1: float,
    base_k2: float,
    cell_floors: bool,
) -> MembershipFlags:
    a, b, c = twin.a, twin.b, twin.c
    mu1 = twin.r10 - twin.t10
    mu2 = twin.r01 - twin.t01
    late_identity = (
        b != c and abs((mu1 * b - mu2 * c) / (b - c) - base_beta) <= IDENTITY_TOLERANCE
    )
    return MembershipFlags(
        shares_valid=min(a, b, c) >= 0.0 and a + b + c <= 1.0 + SHARE_TOLERANCE,
        k1_matches=abs(a + b - base_k1) <= SHARE_TOLERANCE,
        k2_matches=abs(a + c - base_k2) <= SHARE_TOLERANCE,
        outcome_bound=True,
        late_identity=late_identity,
        defier_share=0.0 <= c <= eta + SHARE_TOLERANCE,
        cell_floors=cell_floors,
    )


def _signed(
    components: List[Tuple[float, DiscreteDist]], name: str
) -> DiscreteDist:
    try:
        return DiscreteDist.signed_mixture(components)
    except ValueError as e:
        raise ConstructionDegenerateError(
            f"{name} is not a distribution", stage=f"constructing {name}", cause=e
        )


def forge_continuous(theta: Theta, config: ForgeConfig) -> ForgeResult:
    """
    Build a twin of a no-defier DGP whose complier and defier LATEs both exceed -beta.

    The twin has c = eta defiers whose Y(1) is the upper tail of the always-taker
    law above B1 and whose Y(0) is the lower tail of the never-taker law up to B2.
    Always-taker and never-taker laws are adjusted so that the observable
    mixtures are unchanged.

    Raises:
        PreconditionViolatedError: Naming the first inequality that fails
        ConstructionDegenerateError: If an adjusted law gets a negative atom
    """
    validate_config(config)
    eps1, eps2, eta = config.eps1, config.eps2, config.eta

    _require(theta.c <= SHARE_TOLERANCE, "c = 0", f"c = {theta.c}")
    k1, k2 = theta.k1, theta.k2
    _require(k1 > k2, "k1 > k2", f"k1 = {k1}, k2 = {k2}")
    beta = iv_beta(theta)
    _require(beta < 0, "beta < 0", f"beta = {beta}")
    _require(eta > 0, "eta > 0")
    _require(eta < eps1 * k2, "eta < eps1*k2", f"{eta} >= {eps1 * k2}")
    _require(eta < eps1 * (1 - k1), "eta < eps1*(1-k1)", f"{eta} >= {eps1 * (1 - k1)}")
    _require(eta < eps1 * (k1 - k2), "eta < eps1*(k1-k2)", f"{eta} >= {eps1 * (k1 - k2)}")
    _require(
        3 * abs(beta) / eta < eps2 / (k1 - k2),
        "3*|beta|/eta < eps2/(k1-k2)",
        f"{3 * abs(beta) / eta} >= {eps2 / (k1 - k2)}",
    )
    outside = [
        name
        for name, dist in theta.distributions().items()
        if not dist.supported_within(config.M)
    ]
    _require(not outside, "support within [-M, M]", ", ".join(outside))

    law = observed_law(theta)
    q1 = law.law_10.quantile(1 - eps1)
    q2 = law.law_01.quantile(eps1)
    _require(
        q1 - q2 > eps2,
        "Q1(1-eps1) - Q2(eps1) > eps2",
        f"Q1(1-eps1) = {q1}, Q2(eps1) = {q2}",
    )

    delta_upper = eps2 - 3 * (k1 - k2) * abs(beta) / eta
    delta = config.delta_rule * delta_upper
    b1 = q1 - delta
    b2 = q2
    logger.debug(f"Forge thresholds: delta={delta:.6g}, B1={b1:.6g}, B2={b2:.6g}")

    c_tilde = eta
    a_tilde = k2 - c_tilde
    b_tilde = k1 - k2 + c_tilde
    never = 1 - k1

    f01 = theta.f11.condition_above(b1)
    g01 = theta.g00.condition_at_most(b2)
    f11 = _signed(
        [(k2 / a_tilde, theta.f11), (-c_tilde / a_tilde, f01)], "F11"
    )
    f10 = DiscreteDist.mixture(
        [((k1 - k2) / b_tilde, theta.f10), (c_tilde / b_tilde, f01)]
    )
    g00 = _signed(
        [(never / (never - c_tilde), theta.g00), (-c_tilde / (never - c_tilde), g01)],
        "G00",
    )
    g10 = DiscreteDist.mixture(
        [((k1 - k2) / b_tilde, theta.g10), (c_tilde / b_tilde, g01)]
    )
    unidentified = DiscreteDist.point_mass(0.0)

    twin = Theta(
        a=a_tilde,
        b=b_tilde,
        c=c_tilde,
        pz=theta.pz,
        M=config.M,
        f11=f11,
        f10=f10,
        f01=f01,
        f00=unidentified,
        g11=unidentified,
        g10=g10,
        g01=g01,
        g00=g00,
    )

    mu1_twin = type_effect(twin, 1, 0)
    mu2_twin = type_effect(twin, 0, 1)
    distance = verify_equivalence(theta, twin)
    membership = verify_membership(twin, config, beta, k1, k2)
    mu2_alternative = f01.mean() - theta.g00.mean()

    diagnostics: Dict[str, object] = {
        "beta": beta,
        "q1": q1,
        "q2": q2,
        "delta_upper": delta_upper,
        "f11_at_b1": theta.f11.cdf(b1),
        "f11_validity_bound": 1 - c_tilde / k2,
        "mu2_alternative": mu2_alternative,
        "mu2_alternative_exceeds_minus_beta": mu2_alternative > -beta,
        "sign_flip_ok": mu1_twin > -beta and mu2_twin > -beta,
    }
    if not diagnostics["sign_flip_ok"]:
        logger.warning(
            f"Forged twin misses the sign-flip bound: mu1={mu1_twin}, mu2={mu2_twin}, -beta={-beta}"
        )
    if distance > EQUIVALENCE_TOLERANCE:
        logger.warning(f"Forged twin equivalence distance {distance:.3e} above tolerance")

    return ForgeResult(
        method=METHOD_CONTINUOUS,
        base=theta,
        twin=twin,
        c_tilde=c_tilde,
        mu1_twin=mu1_twin,
        mu2_twin=mu2_twin,
        equivalence_distance=distance,
        membership_ok=membership,
        b1=b1,
        b2=b2,
        delta=delta,
        diagnostics=diagnostics,
    )


def _clip_mean(value: float, name: str) -> float:
    if value < -MEAN_TOLERANCE or value > 1 + MEAN_TOLERANCE:
        raise ConstructionDegenerateError(
            f"{name} = {value!r} falls outside [0, 1]", stage=f"constructing {name}"
        )
    return min(max(value, 0.0), 1.0)


def _binary_base_checks(theta: BinaryTheta) -> Tuple[float, float, float]:
    """Shared preconditions; returns (beta, k1, k2)."""
    _require(theta.c <= SHARE_TOLERANCE, "c = 0", f"c = {theta.c}")
    k1, k2 = theta.k1, theta.k2
    _require(k1 > k2, "k1 > k2", f"k1 = {k1}, k2 = {k2}")
    beta = theta.r10 - theta.t10
    _require(beta < 0, "beta < 0", f"beta = {beta}")
    return beta, k1, k2


def _forge_binary(
    theta: BinaryTheta,
    c_tilde: float,
    method: str,
    eta: float,
    beta: float,
    cell_floors: bool,
) -> ForgeResult:
    """Binary twin with c_tilde defiers; the base must have passed its preconditions."""
    k1, k2 = theta.k1, theta.k2
    rho10 = theta.r11
    never = 1 - k1

    _require(c_tilde > 0, "c_tilde > 0", f"c_tilde = {c_tilde}")
    _require(k1 + c_tilde <= 1 + SHARE_TOLERANCE, "k1 + c_tilde <= 1", f"{k1 + c_tilde}")
    slack = (
        beta * (k1 - k2)
        + min(c_tilde, rho10 * k2)
        - max(0.0, c_tilde - (1 - theta.t00) * never)
    )
    _require(
        slack >= 0,
        "beta*(k1-k2) + min(c_tilde, rho10*k2) - max(0, c_tilde - (1-t00)*(1-k1)) >= 0",
        f"left-hand side = {slack:.6g}",
    )

    a_tilde = k2 - c_tilde
    b_tilde = k1 - k2 + c_tilde

    r01 = min(1.0, rho10 * k2 / c_tilde)
    t01 = max(0.0, 1 + (theta.t00 - 1) * never / c_tilde)
    r11 = _clip_mean((theta.r11 * k2 - r01 * c_tilde) / a_tilde, "r11") if a_tilde > 0 else 0.0
    r10 = _clip_mean((theta.r10 * (k1 - k2) + r01 * c_tilde) / b_tilde, "r10")
    t10 = _clip_mean((theta.t10 * (k1 - k2) + t01 * c_tilde) / b_tilde, "t10")
    never_twin = never - c_tilde
    t00 = (
        _clip_mean((theta.t00 * never - t01 * c_tilde) / never_twin, "t00")
        if never_twin > 0
        else 0.0
    )

    r01_window = (
        max(0.0, 1 + (rho10 - 1) * k2 / c_tilde) - MEAN_TOLERANCE
        <= r01
        <= min(1.0, rho10 * k2 / c_tilde) + MEAN_TOLERANCE
        if a_tilde > 0
        else None
    )
    t01_window = (
        max(0.0, 1 + (theta.t00 - 1) * never / c_tilde) - MEAN_TOLERANCE
        <= t01
        <= min(1.0, theta.t00 * never / c_tilde) + MEAN_TOLERANCE
        if never_twin > 0
        else None
    )

    twin = BinaryTheta(
        a=a_tilde,
        b=b_tilde,
        c=c_tilde,
        pz=theta.pz,
        r11=r11,
        r10=r10,
        r01=r01,
        r00=0.0,
        t11=0.0,
        t10=t10,
        t01=t01,
        t00=t00,
    )

    mu1_twin = r10 - t10
    mu2_twin = r01 - t01
    base_means = binary_observed_means(theta).as_tuple()
    twin_means = binary_observed_means(twin).as_tuple()
    mean_gap = max(
        abs(x - y) for x, y in zip(base_means, twin_means) if x is not None and y is not None
    )
    distance = verify_equivalence(theta, twin)
    membership = _binary_membership(twin, eta, beta, k1, k2, cell_floors)

    diagnostics: Dict[str, object] = {
        "beta": beta,
        "slack": slack,
        "identity_gap": abs(mu1_twin * b_tilde - mu2_twin * c_tilde - beta * (k1 - k2)),
        "observed_mean_gap": mean_gap,
        "r01_window_ok": r01_window,
        "t01_window_ok": t01_window,
        "sign_flip_ok": mu1_twin >= -MEAN_TOLERANCE,
    }
    logger.debug(f"{method} forge: c_tilde={c_tilde:.6g}, mu1_twin={mu1_twin:.6g}")

    return ForgeResult(
        method=method,
        base=theta,
        twin=twin,
        c_tilde=c_tilde,
        mu1_twin=mu1_twin,
        mu2_twin=mu2_twin,
        equivalence_distance=distance,
        membership_ok=membership,
        diagnostics=diagnostics,
    )


def forge_binary_interior(
    theta: BinaryTheta, eta: float, floor: float = 0.05
) -> ForgeResult:
    """
    Binary twin with c_tilde = min(k2, eta) defiers and a nonnegative complier LATE.

    Needs beta*(k1-k2) + eta >= 0; below that the sign of mu1 is identified and
    the forge refuses. ``floor`` bounds P(Y=D=1|Z=0) and P(Y=D=0|Z=1) from below.
    """
    beta, k1, k2 = _binary_base_checks(theta)
    _require(0 <= eta <= k2, "0 <= eta <= k2", f"eta = {eta}, k2 = {k2}")
    _require(
        beta * (k1 - k2) + eta >= 0,
        "beta*(k1-k2) + eta >= 0",
        "SafeSide: eta < |beta|(k1-k2), so sign(mu1) = sign(beta) on every equivalent DGP",
    )
    means = binary_observed_means(theta)
    _require(
        means.treated_success_z0 >= floor,
        "P(Y=D=1|Z=0) >= floor",
        f"{means.treated_success_z0:.6g} < {floor}",
    )
    _require(
        means.untreated_failure_z1 >= floor,
        "P(Y=D=0|Z=1) >= floor",
        f"{means.untreated_failure_z1:.6g} < {floor}",
    )
    return _forge_binary(
        theta,
        c_tilde=min(k2, eta),
        method=METHOD_BINARY_INTERIOR,
        eta=eta,
        beta=beta,
        cell_floors=True,
    )


def forge_binary_onesided(theta: BinaryTheta, floor: float = 0.05) -> ForgeResult:
    """
    Binary twin with c_tilde = P(Y=1, D=1 | Z=0) defiers.

    Needs P(Y=D=1|Z=0) >= |beta|(k1-k2); below that the DGP is in the testable
    safe region and the forge refuses.
    """
    beta, k1, k2 = _binary_base_checks(theta)
    means = binary_observed_means(theta)
    cell = means.treated_success_z0
    _require(
        beta * (k1 - k2) + cell >= 0,
        "beta*(k1-k2) + P(Y=D=1|Z=0) >= 0",
        "SafeSide: P(Y=D=1|Z=0) < |beta|(k1-k2), so sign(mu1) = sign(beta)",
    )
    _require(
        means.untreated_failure_z1 >= floor,
        "P(Y=D=0|Z=1) >= floor",
        f"{means.untreated_failure_z1:.6g} < {floor}",
    )
    _require(k1 - k2 >= floor, "k1 - k2 >= floor", f"{k1 - k2:.6g} < {floor}")
    return _forge_binary(
        theta,
        c_tilde=cell,
        method=METHOD_BINARY_ONE_SIDED,
        eta=k2,
        beta=beta,
        cell_floors=True,
    )
