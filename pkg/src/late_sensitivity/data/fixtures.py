"""Built-in DGPs and published summary statistics used by the CLI and the tests."""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..models.config import ForgeConfig
from ..models.distribution import DiscreteDist
from ..models.theta import BinaryTheta, Theta

# Settings under which the built-in continuous base can be forged
BUILTIN_FORGE_CONFIG = ForgeConfig(eps1=0.2, eps2=0.3, M=1.0, eta=0.03)


def builtin_continuous_base() -> Theta:
    """No-defier DGP with beta = -0.01 and well-separated tails.

    Always-takers and never-takers share four atoms, so Q(1-eps1) of the
    treated z=0 cell is 0.9 and Q(eps1) of the untreated z=1 cell is -0.9.
    """
    tails = DiscreteDist.uniform([-0.9, -0.3, 0.3, 0.9])
    zero = DiscreteDist.point_mass(0.0)
    return Theta(
        a=0.3,
        b=0.2,
        c=0.0,
        pz=0.5,
        M=1.0,
        f11=tails,
        f10=DiscreteDist.uniform([-0.2, 0.2]),
        f01=zero,
        f00=zero,
        g11=zero,
        g10=DiscreteDist.uniform([-0.19, 0.21]),
        g01=zero,
        g00=tails,
    )


def builtin_twin_pair() -> Tuple[Theta, Theta]:
    """The continuous base and its forged twin."""
    from ..core.adversarial import forge_continuous

    base = builtin_continuous_base()
    twin = forge_continuous(base, BUILTIN_FORGE_CONFIG).twin
    assert isinstance(twin, Theta)
    return base, twin


def builtin_binary_base() -> BinaryTheta:
    """Binary no-defier DGP with beta = -0.01 that both binary forges accept."""
    return BinaryTheta(
        a=0.3,
        b=0.2,
        c=0.0,
        pz=0.5,
        r11=0.5,
        r10=0.49,
        r01=0.0,
        r00=0.0,
        t11=0.0,
        t10=0.5,
        t01=0.0,
        t00=0.4,
    )


@dataclass(frozen=True)
class PublishedSummary:
    """Summary statistics of an empirical application, as reported."""

    name: str
    pz: float
    k1: float
    k2: float
    beta: float
    cell_prob: Optional[float] = None
    regime: str = "interior"


PUBLISHED_SUMMARIES: Dict[str, PublishedSummary] = {
    "jtpa": PublishedSummary(
        name="JTPA job training",
        pz=0.6662,
        k1=0.6228,
        k2=0.0112,
        beta=-0.0363,
        cell_prob=0.0157,
        regime="one-sided",
    ),
    "angrist-evans": PublishedSummary(
        name="Angrist-Evans same-sex siblings",
        pz=0.5048,
        k1=0.4105,
        k2=0.3557,
        beta=-0.0950,
    ),
}
