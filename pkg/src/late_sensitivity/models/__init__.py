"""Value types: outcome distributions, DGPs, samples, configs and results."""

from .config import AnalysisConfig, ExperimentConfig, ForgeConfig
from .distribution import DiscreteDist
from .results import (
    BootstrapCI,
    BoundaryReport,
    ConditionalSign,
    Estimates,
    ForgeResult,
    MembershipFlags,
    Regime,
    TightnessCertificate,
    Verdict,
)
from .sample import SampleData
from .theta import BinaryTheta, ObservedLaw, Theta

__all__ = [
    "AnalysisConfig",
    "ExperimentConfig",
    "ForgeConfig",
    "DiscreteDist",
    "BootstrapCI",
    "BoundaryReport",
    "ConditionalSign",
    "Estimates",
    "ForgeResult",
    "MembershipFlags",
    "Regime",
    "TightnessCertificate",
    "Verdict",
    "SampleData",
    "BinaryTheta",
    "ObservedLaw",
    "Theta",
]
