"""LATE Sensitivity

Exact potential-outcomes DGP algebra, plug-in estimators, boundary
classification for violations of monotonicity, and a forge for
observationally equivalent DGPs whose complier LATE has the opposite sign.
"""

from .core import (
    estimate,
    forge_continuous,
    iv_beta,
    late_complier,
    observed_law,
    run_twin_experiment,
    verify_equivalence,
)
from .models import BinaryTheta, DiscreteDist, ExperimentConfig, ForgeConfig, Theta

__version__ = "0.1.0"
__all__ = [
    "estimate",
    "forge_continuous",
    "iv_beta",
    "late_complier",
    "observed_law",
    "run_twin_experiment",
    "verify_equivalence",
    "BinaryTheta",
    "DiscreteDist",
    "ExperimentConfig",
    "ForgeConfig",
    "Theta",
]
