"""Potential-outcomes DGP models and the observable law they induce."""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

from .distribution import DiscreteDist

logger = logging.getLogger(__name__)

SHARE_TOLERANCE = 1e-12

# Compliance types keyed by (D(1), D(0))
ALWAYS_TAKER = (1, 1)
COMPLIER = (1, 0)
DEFIER = (0, 1)
NEVER_TAKER = (0, 0)
TYPE_KEYS: Tuple[Tuple[int, int], ...] = (ALWAYS_TAKER, COMPLIER, DEFIER, NEVER_TAKER)

# Observable cells keyed by (D, Z)
CELL_KEYS: Tuple[Tuple[int, int], ...] = ((1, 1), (1, 0), (0, 1), (0, 0))


def _check_shares(a: float, b: float, c: float, pz: float) -> None:
    for name, value in (("a", a), ("b", b), ("c", c)):
        if value < 0.0:
            raise ValueError(f"Type share {name} must be nonnegative, got {value}")
    if a + b + c > 1.0 + SHARE_TOLERANCE:
        raise ValueError(f"Type shares a+b+c must not exceed 1, got {a + b + c!r}")
    if not 0.0 < pz < 1.0:
        raise ValueError(f"pz must be in (0, 1), got {pz}")


@dataclass(frozen=True)
class Theta:
    """A full DGP: type shares plus the laws of Y(1) and Y(0) per type.

    ``f11`` is the law of Y(1) for always-takers, ``g10`` the law of Y(0) for
    compliers, and so on: the two digits are (D(1), D(0)). Y(1) and Y(0) are
    independent given type.
    """

    a: float
    b: float
    c: float
    pz: float
    M: float
    f11: DiscreteDist
    f10: DiscreteDist
    f01: DiscreteDist
    f00: DiscreteDist
    g11: DiscreteDist
    g10: DiscreteDist
    g01: DiscreteDist
    g00: DiscreteDist

    def __post_init__(self) -> None:
        """Validate shares and outcome supports."""
        _check_shares(self.a, self.b, self.c, self.pz)
        if self.M <= 0:
            raise ValueError(f"Outcome bound M must be positive, got {self.M}")
        for name, dist in self.distributions().items():
            if not dist.supported_within(self.M):
                raise ValueError(
                    f"{name} has support outside [-{self.M}, {self.M}]: "
                    f"[{dist.min_location}, {dist.max_location}]"
                )

    @property
    def never_taker_share(self) -> float:
        return max(0.0, 1.0 - self.a - self.b - self.c)

    @property
    def k1(self) -> float:
        """P(D=1 | Z=1)."""
        return self.a + self.b

    @property
    def k2(self) -> float:
        """P(D=1 | Z=0)."""
        return self.a + self.c

    def share(self, d1: int, d0: int) -> float:
        """Population share of the type with (D(1), D(0)) = (d1, d0)."""
        return {
            ALWAYS_TAKER: self.a,
            COMPLIER: self.b,
            DEFIER: self.c,
            NEVER_TAKER: self.never_taker_share,
        }[(d1, d0)]

    def f(self, d1: int, d0: int) -> DiscreteDist:
        """Law of Y(1) for type (d1, d0)."""
        return getattr(self, f"f{d1}{d0}")

    def g(self, d1: int, d0: int) -> DiscreteDist:
        """Law of Y(0) for type (d1, d0)."""
        return getattr(self, f"g{d1}{d0}")

    def distributions(self) -> Dict[str, DiscreteDist]:
        return {
            f"{prefix}{d1}{d0}": getattr(self, f"{prefix}{d1}{d0}")
            for prefix in ("f", "g")
            for d1, d0 in TYPE_KEYS
        }

    def with_changes(self, **changes) -> "Theta":
        """Copy with some fields replaced (re-validated)."""
        return replace(self, **changes)


@dataclass(frozen=True)
class BinaryTheta:
    """A DGP with 0/1 outcomes, parametrized by the mean of Y(1) and Y(0) per type.

    ``r10`` is E(Y(1) | complier), ``t00`` is E(Y(0) | never-taker), etc.
    """

    a: float
    b: float
    c: float
    pz: float
    r11: float
    r10: float
    r01: float
    r00: float
    t11: float
    t10: float
    t01: float
    t00: float

    def __post_init__(self) -> None:
        """Validate shares and means."""
        _check_shares(self.a, self.b, self.c, self.pz)
        for name in ("r11", "r10", "r01", "r00", "t11", "t10", "t01", "t00"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Mean {name} must be in [0, 1], got {value}")

    @property
    def never_taker_share(self) -> float:
        return max(0.0, 1.0 - self.a - self.b - self.c)

    @property
    def k1(self) -> float:
        return self.a + self.b

    @property
    def k2(self) -> float:
        return self.a + self.c

    def r(self, d1: int, d0: int) -> float:
        return getattr(self, f"r{d1}{d0}")

    def t(self, d1: int, d0: int) -> float:
        return getattr(self, f"t{d1}{d0}")

    def to_theta(self) -> Theta:
        """The same DGP with Bernoulli outcome laws and bound M = 1."""
        laws = {
            f"{prefix}{d1}{d0}": DiscreteDist.bernoulli(
                getattr(self, f"{'r' if prefix == 'f' else 't'}{d1}{d0}")
            )
            for prefix in ("f", "g")
            for d1, d0 in TYPE_KEYS
        }
        return Theta(a=self.a, b=self.b, c=self.c, pz=self.pz, M=1.0, **laws)

    def with_changes(self, **changes) -> "BinaryTheta":
        return replace(self, **changes)


@dataclass(frozen=True)
class ObservedLaw:
    """Distribution of the observables (Y, D, Z).

    ``law_dz`` is the law of Y given D=d, Z=z; it is None when P(D=d | Z=z) = 0.
    """

    pz: float
    k1: float
    k2: float
    law_11: Optional[DiscreteDist]
    law_10: Optional[DiscreteDist]
    law_01: Optional[DiscreteDist]
    law_00: Optional[DiscreteDist]

    def __post_init__(self) -> None:
        for name, value in (("k1", self.k1), ("k2", self.k2)):
            if not -SHARE_TOLERANCE <= value <= 1.0 + SHARE_TOLERANCE:
                raise ValueError(f"{name} must be in [0, 1], got {value}")

    def cell(self, d: int, z: int) -> Optional[DiscreteDist]:
        """Law of Y given D=d, Z=z."""
        return getattr(self, f"law_{d}{z}")

    def treatment_probability(self, d: int, z: int) -> float:
        """P(D=d | Z=z)."""
        take_up = self.k1 if z == 1 else self.k2
        return take_up if d == 1 else 1.0 - take_up

    def joint_probability(self, d: int, z: int) -> float:
        """P(D=d, Z=z)."""
        arm = self.pz if z == 1 else 1.0 - self.pz
        return arm * self.treatment_probability(d, z)

    def cell_mean(self, d: int, z: int) -> Optional[float]:
        law = self.cell(d, z)
        return law.mean() if law is not None else None

    def arm_mean(self, z: int) -> float:
        """E(Y | Z=z)."""
        total = 0.0
        for d in (1, 0):
            weight = self.treatment_probability(d, z)
            law = self.cell(d, z)
            if law is not None and weight > 0:
                total += weight * law.mean()
        return total

    def itt(self) -> float:
        """Intent-to-treat effect E(Y|Z=1) - E(Y|Z=0)."""
        return self.arm_mean(1) - self.arm_mean(0)

    def first_stage(self) -> float:
        """E(D|Z=1) - E(D|Z=0)."""
        return self.k1 - self.k2
