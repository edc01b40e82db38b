"""Result types returned by estimation, boundary classification and forging."""

from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from .theta import BinaryTheta, Theta


class Verdict(str, Enum):
    SAFE_SIDE = "SafeSide"
    DANGER_SIDE = "DangerSide"


class Regime(str, Enum):
    INTERIOR = "InteriorK2"
    ONE_SIDED = "OneSided"
    GENERAL = "GeneralBounded"


@dataclass(frozen=True)
class Estimates:
    """Plug-in estimates from one sample.

    ``beta_hat`` and ``lower_bound_hat`` are None when the estimated first
    stage is exactly zero (``weak_instrument``); ``cell_prob_hat`` is None for
    non-binary outcomes.
    """

    n: int
    pz_hat: float
    k1_hat: float
    k2_hat: float
    mean_y_z1: float
    mean_y_z0: float
    itt_hat: float
    gamma_hat: float
    beta_hat: Optional[float] = None
    lower_bound_hat: Optional[float] = None
    cell_prob_hat: Optional[float] = None
    weak_instrument: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile bootstrap interval for one named statistic."""

    statistic: str
    point: float
    lo: float
    hi: float
    level: float
    replications: int
    seed: int
    redraws: int = 0

    def __post_init__(self) -> None:
        if not self.lo <= self.point <= self.hi:
            raise ValueError(
                f"Interval [{self.lo}, {self.hi}] must contain the point {self.point}"
            )

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class BoundaryReport:
    """Outcome of comparing a defier-share quantity with the boundary |beta|(k1-k2).

    ``quantity`` is what was compared: eta (interior), the cell probability
    P(Y=D=1|Z=0) (one-sided) or 2*M*eta (general bounded outcomes).
    """

    regime: Regime
    boundary: float
    quantity_name: str
    quantity: float
    verdict: Verdict
    margin: float
    beta: float
    k1: float
    k2: float
    sufficient_only: bool = False
    relabeled: bool = False
    extension: bool = False
    notes: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        expected = Verdict.SAFE_SIDE if self.margin > 0 else Verdict.DANGER_SIDE
        if self.verdict is not expected:
            raise ValueError(
                f"Verdict {self.verdict.value} inconsistent with margin {self.margin}"
            )

    @property
    def eta(self) -> Optional[float]:
        return self.quantity if self.quantity_name in ("eta", "2*M*eta") else None

    @property
    def cell_prob(self) -> Optional[float]:
        return self.quantity if self.quantity_name.startswith("cell_prob") else None

    @property
    def is_safe(self) -> bool:
        return self.verdict is Verdict.SAFE_SIDE

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["regime"] = self.regime.value
        data["verdict"] = self.verdict.value
        return data


@dataclass(frozen=True)
class TightnessCertificate:
    """Grid minimum of max{|mu1|, |mu2|} compared with its closed form."""

    beta: float
    k1: float
    k2: float
    minimum: float
    argmin_lambda: float
    argmin_mu2: float
    closed_form: float
    grid_spacing: float

    @property
    def gap(self) -> float:
        return abs(self.minimum - self.closed_form)


@dataclass(frozen=True)
class ConditionalSign:
    """A sign that holds only under the stated modeling assumption."""

    sign: int
    assumption: str = "|mu1| >= |mu2|"


@dataclass(frozen=True)
class MembershipFlags:
    """Per-clause check of a bounded-defier parameter space.

    A clause that does not apply to the space being checked is None. The
    binary space has no magnitude or sign-agreement clause but bounds the
    observable cells P(Y=D=1|Z=0) and P(Y=D=0|Z=1) from below.
    """

    shares_valid: bool
    k1_matches: bool
    k2_matches: bool
    outcome_bound: bool
    late_identity: bool
    defier_share: bool
    complier_magnitude: Optional[bool] = None
    sign_agreement: Optional[bool] = None
    cell_floors: Optional[bool] = None

    @property
    def all_ok(self) -> bool:
        return not self.failed()

    def failed(self) -> List[str]:
        return [f.name for f in fields(self) if getattr(self, f.name) is False]

    def to_dict(self) -> Dict[str, Optional[bool]]:
        return asdict(self)


# Equivalence distance at or below this counts as observational equivalence
EQUIVALENCE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ForgeResult:
    """An adversarial twin plus the certificate checked on it."""

    method: str
    base: Union[Theta, BinaryTheta]
    twin: Union[Theta, BinaryTheta]
    c_tilde: float
    mu1_twin: float
    mu2_twin: float
    equivalence_distance: float
    membership_ok: MembershipFlags
    b1: Optional[float] = None
    b2: Optional[float] = None
    delta: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        """Equivalent, sign-flipped and inside the parameter space."""
        return (
            self.equivalence_distance <= EQUIVALENCE_TOLERANCE
            and self.membership_ok.all_ok
            and bool(self.diagnostics.get("sign_flip_ok", True))
        )
