"""Core library modules: DGP algebra, estimation, boundary, forge and simulation."""

from .adversarial import (
    forge_binary_interior,
    forge_binary_onesided,
    forge_continuous,
    verify_equivalence,
    verify_membership,
)
from .boundary import (
    binary_boundary,
    classify_general_bounded,
    classify_interior,
    classify_one_sided,
    classify_worst_case,
)
from .dgp import (
    iv_beta,
    late_complier,
    late_defier,
    observed_law,
    quantile,
    sample,
    type_effect,
)
from .estimation import (
    bootstrap,
    dichotomize,
    estimate,
    lower_bound_tightness_certificate,
    magnitude_lower_bound,
    sign_under_dominance,
)
from .simulation import (
    SIGN_PROCEDURES,
    register_procedure,
    run_consistency_sweep,
    run_twin_experiment,
)

__all__ = [
    "forge_binary_interior",
    "forge_binary_onesided",
    "forge_continuous",
    "verify_equivalence",
    "verify_membership",
    "binary_boundary",
    "classify_general_bounded",
    "classify_interior",
    "classify_one_sided",
    "classify_worst_case",
    "iv_beta",
    "late_complier",
    "late_defier",
    "observed_law",
    "quantile",
    "sample",
    "type_effect",
    "bootstrap",
    "dichotomize",
    "estimate",
    "lower_bound_tightness_certificate",
    "magnitude_lower_bound",
    "sign_under_dominance",
    "SIGN_PROCEDURES",
    "register_procedure",
    "run_consistency_sweep",
    "run_twin_experiment",
]
