"""Exact algebra of potential-outcomes DGPs.

Computes the complier and defier LATEs, the IV estimand, the observable law of
(Y, D, Z) implied by a DGP, and draws synthetic samples from it.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.distribution import DiscreteDist
from ..models.sample import SampleData
from ..models.theta import (
    ALWAYS_TAKER,
    COMPLIER,
    DEFIER,
    NEVER_TAKER,
    TYPE_KEYS,
    BinaryTheta,
    ObservedLaw,
    Theta,
)
from ..utils.exceptions import (
    NoCompliersError,
    NoDefiersError,
    ValidationError,
    WeakInstrumentError,
)

logger = logging.getLogger(__name__)

SeedLike = Union[int, Sequence[int], np.random.SeedSequence]


def type_effect(theta: Theta, d1: int, d0: int) -> float:
    """mean(F_{d1,d0}) - mean(G_{d1,d0}), whatever the type's share."""
    return theta.f(d1, d0).mean() - theta.g(d1, d0).mean()


def late_complier(theta: Theta) -> float:
    """LATE for compliers, mu1."""
    if theta.b <= 0:
        raise NoCompliersError("complier share b is zero", quantity="mu1")
    return type_effect(theta, *COMPLIER)


def late_defier(theta: Theta) -> float:
    """LATE for defiers, mu2."""
    if theta.c <= 0:
        raise NoDefiersError("defier share c is zero", quantity="mu2")
    return type_effect(theta, *DEFIER)


def iv_beta(theta: Theta) -> float:
    """IV estimand beta = (mu1*b - mu2*c) / (b - c)."""
    if theta.b == theta.c:
        raise WeakInstrumentError(
            f"b = c = {theta.b}; the IV estimand is undefined", quantity="beta"
        )
    complier_term = late_complier(theta) * theta.b if theta.b > 0 else 0.0
    defier_term = late_defier(theta) * theta.c if theta.c > 0 else 0.0
    return (complier_term - defier_term) / (theta.b - theta.c)


def _conditional_law(
    parts: List[Tuple[float, DiscreteDist]],
) -> Optional[DiscreteDist]:
    """Mixture of the parts normalized by their total share, None if that is zero."""
    total = sum(weight for weight, _ in parts)
    if total <= 0:
        return None
    return DiscreteDist.mixture(
        [(weight / total, dist) for weight, dist in parts if weight > 0]
    )


def observed_law(theta: Theta) -> ObservedLaw:
    """Law of (Y, D, Z) implied by theta.

    Y | D=1, Z=1 mixes always-takers and compliers under treatment; Y | D=0, Z=0
    mixes compliers and never-takers without it; the Z=0 treated and Z=1
    untreated cells bring in the defiers.
    """
    a, b, c, n = theta.a, theta.b, theta.c, theta.never_taker_share
    return ObservedLaw(
        pz=theta.pz,
        k1=a + b,
        k2=a + c,
        law_11=_conditional_law([(a, theta.f11), (b, theta.f10)]),
        law_10=_conditional_law([(a, theta.f11), (c, theta.f01)]),
        law_01=_conditional_law([(c, theta.g01), (n, theta.g00)]),
        law_00=_conditional_law([(b, theta.g10), (n, theta.g00)]),
    )


def wald_ratio(law: ObservedLaw) -> float:
    """[E(Y|Z=1) - E(Y|Z=0)] / [E(D|Z=1) - E(D|Z=0)]."""
    first_stage = law.first_stage()
    if first_stage == 0:
        raise WeakInstrumentError("k1 = k2; the Wald ratio is undefined", quantity="beta")
    return law.itt() / first_stage


def quantile(dist: DiscreteDist, eps: float) -> float:
    """inf{t : P(Y <= t) >= eps}."""
    if not 0.0 < eps < 1.0:
        raise ValidationError("quantile level must be in (0, 1)", field="eps", value=str(eps))
    return dist.quantile(eps)


def overlap_margin(theta: Theta, eps1: float) -> Optional[float]:
    """Q1(1-eps1) - Q2(eps1) on the treated Z=0 and untreated Z=1 cells.

    None when either cell is empty.
    """
    law = observed_law(theta)
    treated_z0 = law.cell(1, 0)
    untreated_z1 = law.cell(0, 1)
    if treated_z0 is None or untreated_z1 is None:
        return None
    return quantile(treated_z0, 1.0 - eps1) - quantile(untreated_z1, eps1)


def has_overlap(theta: Theta, eps1: float, eps2: float) -> bool:
    """True when theta has no defiers and its overlap margin exceeds eps2."""
    if theta.c != 0:
        return False
    margin = overlap_margin(theta, eps1)
    return margin is not None and margin > eps2


@dataclass(frozen=True)
class BinaryObservedMeans:
    """E(Y | D=d, Z=z) for a binary DGP plus the two cell probabilities."""

    rho_11: Optional[float]
    rho_10: Optional[float]
    rho_01: Optional[float]
    rho_00: Optional[float]
    treated_success_z0: float  # P(Y=1, D=1 | Z=0)
    untreated_failure_z1: float  # P(Y=0, D=0 | Z=1)

    def as_tuple(self) -> Tuple[Optional[float], ...]:
        return (self.rho_11, self.rho_10, self.rho_01, self.rho_00)


def _weighted_mean(parts: List[Tuple[float, float]]) -> Optional[float]:
    total = sum(weight for weight, _ in parts)
    if total <= 0:
        return None
    return sum(weight * value for weight, value in parts) / total


def binary_observed_means(theta: BinaryTheta) -> BinaryObservedMeans:
    """Observable conditional means of a binary DGP."""
    a, b, c, n = theta.a, theta.b, theta.c, theta.never_taker_share
    k1, k2 = theta.k1, theta.k2
    rho_10 = _weighted_mean([(a, theta.r11), (c, theta.r01)])
    rho_01 = _weighted_mean([(c, theta.t01), (n, theta.t00)])
    return BinaryObservedMeans(
        rho_11=_weighted_mean([(a, theta.r11), (b, theta.r10)]),
        rho_10=rho_10,
        rho_01=rho_01,
        rho_00=_weighted_mean([(b, theta.t10), (n, theta.t00)]),
        treated_success_z0=(rho_10 or 0.0) * k2,
        untreated_failure_z1=(1.0 - rho_01) * (1.0 - k1) if rho_01 is not None else 0.0,
    )


def sample(theta: Theta, n: int, seed: SeedLike) -> SampleData:
    """Draw n iid rows (Y, D, Z) from theta; deterministic given seed."""
    if n < 1:
        raise ValidationError("sample size must be at least 1", field="n", value=str(n))
    rng = np.random.default_rng(seed)

    z = (rng.random(n) < theta.pz).astype(np.int8)
    shares = np.array([theta.share(d1, d0) for d1, d0 in TYPE_KEYS], dtype=float)
    types = rng.choice(len(TYPE_KEYS), size=n, p=shares / shares.sum())

    d1 = np.isin(types, [TYPE_KEYS.index(ALWAYS_TAKER), TYPE_KEYS.index(COMPLIER)])
    d0 = np.isin(types, [TYPE_KEYS.index(ALWAYS_TAKER), TYPE_KEYS.index(DEFIER)])
    d = np.where(z == 1, d1, d0).astype(np.int8)

    y = np.empty(n, dtype=float)
    for index, (t1, t0) in enumerate(TYPE_KEYS):
        for treated, law in ((1, theta.f(t1, t0)), (0, theta.g(t1, t0))):
            mask = (types == index) & (d == treated)
            count = int(mask.sum())
            if count:
                y[mask] = law.sample(rng, count)

    logger.debug(
        f"Sampled n={n}: P(Z=1)={z.mean():.4f}, "
        f"never-takers={np.mean(types == TYPE_KEYS.index(NEVER_TAKER)):.4f}"
    )
    return SampleData(y=y, d=d, z=z)
