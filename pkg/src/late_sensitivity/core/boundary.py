"""Phase-transition boundary for the sign of the complier LATE.

Below the boundary |beta|(k1 - k2) the sign of mu1 equals the sign of beta for
every DGP in the relevant parameter space (SafeSide); at or above it an
observationally equivalent DGP with the opposite sign exists, or (for general
bounded outcomes) the guarantee is lost (DangerSide).

All classifiers assume Z is oriented so that k1 > k2. Positive beta is handled
by relabeling the outcome (Y -> -Y, or Y -> 1 - Y for 0/1 outcomes), which
flips the signs of beta, mu1 and mu2 together.
"""

import logging
from typing import List, Optional, Tuple

from ..models.results import BoundaryReport, Regime, Verdict
from ..utils.exceptions import InconsistentInputsError, OrientationError, ValidationError
from ..utils.validation import validate_finite, validate_positive, validate_probability

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-12


def _check_orientation(k1: float, k2: float) -> None:
    k1 = validate_probability(k1, "k1")
    k2 = validate_probability(k2, "k2")
    if k1 <= k2:
        raise OrientationError("boundary requires k1 > k2", k1=k1, k2=k2)


def binary_boundary(beta: float, k1: float, k2: float) -> float:
    """|beta| * (k1 - k2)."""
    beta = validate_finite(beta, "beta")
    _check_orientation(k1, k2)
    return abs(beta) * (k1 - k2)


def _report(
    regime: Regime,
    beta: float,
    k1: float,
    k2: float,
    quantity_name: str,
    quantity: float,
    sufficient_only: bool = False,
    notes: Optional[List[str]] = None,
) -> BoundaryReport:
    boundary = binary_boundary(beta, k1, k2)
    margin = boundary - quantity
    verdict = Verdict.SAFE_SIDE if margin > 0 else Verdict.DANGER_SIDE
    notes = list(notes or [])
    if beta == 0:
        notes.append("beta = 0: the boundary is zero and no sign is guaranteed")
    relabeled = beta > 0
    if relabeled:
        notes.append("beta > 0: classified on the relabeled outcome")

    logger.debug(
        f"{regime.value}: boundary={boundary:.6g} vs {quantity_name}={quantity:.6g} "
        f"-> {verdict.value}"
    )
    return BoundaryReport(
        regime=regime,
        boundary=boundary,
        quantity_name=quantity_name,
        quantity=quantity,
        verdict=verdict,
        margin=margin,
        beta=beta,
        k1=k1,
        k2=k2,
        sufficient_only=sufficient_only,
        relabeled=relabeled,
        notes=notes,
    )


def classify_interior(beta: float, k1: float, k2: float, eta: float) -> BoundaryReport:
    """Binary outcomes with at most eta defiers: SafeSide iff eta < |beta|(k1 - k2)."""
    _check_orientation(k1, k2)
    eta = validate_positive(eta, "eta", allow_zero=True)
    if eta > k2 + PROBABILITY_TOLERANCE:
        raise ValidationError("eta must not exceed k2", field="eta", value=str(eta))
    return _report(Regime.INTERIOR, beta, k1, k2, "eta", eta)


def classify_one_sided(
    beta: float,
    k1: float,
    k2: float,
    cell_prob: float,
    check_consistency: bool = True,
) -> BoundaryReport:
    """
    Testable rule for (almost) one-sided non-compliance with binary outcomes.

    SafeSide iff P(Y=D=1 | Z=0) < |beta|(k1 - k2). For beta > 0 the relabeled
    outcome 1 - Y turns the compared cell into P(Y=0, D=1 | Z=0) = k2 - cell_prob.

    A cell probability above k2 cannot come from a single DGP. Published summary
    numbers sometimes mix samples; with ``check_consistency=False`` they are
    classified anyway and the report carries a note.
    """
    _check_orientation(k1, k2)
    cell_prob = validate_probability(cell_prob, "cell_prob")
    notes: List[str] = []
    if cell_prob > k2 + PROBABILITY_TOLERANCE:
        message = f"P(Y=D=1|Z=0) = {cell_prob} exceeds P(D=1|Z=0) = k2 = {k2}"
        if check_consistency:
            raise InconsistentInputsError(message)
        logger.warning(f"{message}; classifying anyway")
        notes.append(f"inconsistent inputs: {message}")
    if beta > 0:
        return _report(
            Regime.ONE_SIDED,
            beta,
            k1,
            k2,
            "cell_prob_complement",
            max(k2 - cell_prob, 0.0),
            notes=notes + ["compared P(Y=0, D=1 | Z=0) = k2 - cell_prob"],
        )
    return _report(Regime.ONE_SIDED, beta, k1, k2, "cell_prob", cell_prob, notes=notes)


def classify_general_bounded(
    beta: float, k1: float, k2: float, eta: float, M: float
) -> BoundaryReport:
    """
    Sufficient condition for outcomes bounded by M: SafeSide iff 2*M*eta < |beta|(k1 - k2).

    With lambda = c/b, mu1 = lambda*mu2 + (1 - lambda)*beta and |mu2| <= 2M, so
    c*2M < |beta|(k1 - k2) keeps mu1 on the side of beta. DangerSide here only
    means the guarantee is lost.
    """
    _check_orientation(k1, k2)
    eta = validate_positive(eta, "eta", allow_zero=True)
    M = validate_positive(M, "M")
    return _report(
        Regime.GENERAL,
        beta,
        k1,
        k2,
        "2*M*eta",
        2.0 * M * eta,
        sufficient_only=True,
        notes=["sufficient condition only: DangerSide does not prove a sign flip"],
    )


def classify_worst_case(
    point_report: BoundaryReport,
    boundary_interval: Tuple[float, float],
    quantity_interval: Tuple[float, float],
) -> BoundaryReport:
    """
    Classify at the unfavourable ends of confidence intervals.

    The margin is the boundary's lower endpoint minus the compared quantity's
    upper endpoint. This goes beyond point-estimate classification and is
    flagged as an extension.
    """
    boundary_lo, boundary_hi = boundary_interval
    quantity_lo, quantity_hi = quantity_interval
    if boundary_lo > boundary_hi or quantity_lo > quantity_hi:
        raise ValidationError("interval endpoints out of order", field="interval")
    margin = boundary_lo - quantity_hi
    verdict = Verdict.SAFE_SIDE if margin > 0 else Verdict.DANGER_SIDE
    return BoundaryReport(
        regime=point_report.regime,
        boundary=boundary_lo,
        quantity_name=point_report.quantity_name,
        quantity=quantity_hi,
        verdict=verdict,
        margin=margin,
        beta=point_report.beta,
        k1=point_report.k1,
        k2=point_report.k2,
        sufficient_only=point_report.sufficient_only,
        relabeled=point_report.relabeled,
        extension=True,
        notes=point_report.notes
        + ["worst-case classification at confidence-interval endpoints"],
    )
