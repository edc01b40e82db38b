"""Configuration models for LATE sensitivity analysis."""

import logging
import os
from dataclasses import dataclass, field
from typing import Optional

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "LATE_SENSITIVITY_SEED"
FALLBACK_SEED = 20240101


def default_seed() -> int:
    """Seed from LATE_SENSITIVITY_SEED, or the fixed fallback."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return FALLBACK_SEED
    try:
        return int(raw)
    except ValueError:
        logger.warning(
            f"Ignoring non-integer {SEED_ENV_VAR}={raw!r}; using {FALLBACK_SEED}"
        )
        return FALLBACK_SEED


@dataclass
class ForgeConfig:
    """Settings for constructing adversarial twins."""

    # Overlap constants of the well-separated set: Q1(1-eps1) - Q2(eps1) > eps2
    eps1: float = 0.2
    eps2: float = 0.3

    # Outcome bound and defier tolerance
    M: float = 1.0
    eta: float = 0.03

    # Position of delta inside its open admissible interval
    delta_rule: float = 0.5

    # Lower bound on the observable cells the binary forges divide by
    floor: float = 0.05

    def validate(self) -> None:
        """Validate configuration settings."""
        if not 0.0 < self.eps1 < 1.0:
            raise ValueError(f"eps1 must be in (0, 1), got {self.eps1}")
        if self.eps2 <= 0:
            raise ValueError(f"eps2 must be positive, got {self.eps2}")
        if self.M <= 0:
            raise ValueError(f"M must be positive, got {self.M}")
        if self.eta < 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")
        if not 0.0 < self.delta_rule < 1.0:
            raise ValueError(f"delta_rule must be in (0, 1), got {self.delta_rule}")
        if not 0.0 <= self.floor < 1.0:
            raise ValueError(f"floor must be in [0, 1), got {self.floor}")


@dataclass
class ExperimentConfig:
    """Settings for a Monte Carlo twin experiment."""

    n: int = 5000
    replications: int = 400
    seed: int = field(default_factory=default_seed)

    # Coverage target is 1 - alpha
    alpha: float = 0.05
    procedure: str = "plug-in-sign"

    # Level of the outcome-distribution equality test
    significance: float = 0.01

    # Resamples used by procedures that need a bootstrap standard error
    bootstrap_replications: int = 200

    # Thread pool size for replications; None or 1 runs sequentially
    workers: Optional[int] = None

    def validate(self) -> None:
        """Validate configuration settings."""
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if self.replications < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.significance < 1.0:
            raise ValueError(f"significance must be in (0, 1), got {self.significance}")
        if self.bootstrap_replications < 2:
            raise ValueError(
                f"bootstrap_replications must be at least 2, got {self.bootstrap_replications}"
            )
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        if not self.procedure:
            raise ValueError("procedure must be named")


@dataclass
class AnalysisConfig:
    """Settings for analysing an observed sample."""

    # Column names in the input CSV
    y_col: str = "y"
    d_col: str = "d"
    z_col: str = "z"

    # Bootstrap (0 disables it)
    bootstrap_replications: int = 0
    level: float = 0.95
    seed: int = field(default_factory=default_seed)

    # Optional inputs for boundary classification
    eta: Optional[float] = None
    M: Optional[float] = None

    def validate(self) -> None:
        """Validate configuration settings."""
        if len({self.y_col, self.d_col, self.z_col}) != 3:
            raise ValueError(
                f"y_col, d_col and z_col must be distinct, got "
                f"{self.y_col!r}, {self.d_col!r}, {self.z_col!r}"
            )
        if self.bootstrap_replications != 0 and self.bootstrap_replications < 100:
            raise ValueError(
                f"bootstrap_replications must be 0 or at least 100, got "
                f"{self.bootstrap_replications}"
            )
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must be in (0, 1), got {self.level}")
        if self.eta is not None and self.eta < 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")
        if self.M is not None and self.M <= 0:
            raise ValueError(f"M must be positive, got {self.M}")
