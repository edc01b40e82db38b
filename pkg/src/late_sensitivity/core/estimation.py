"""Plug-in estimators, the assumption-free magnitude bound and bootstrap intervals."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from ..models.config import default_seed
from ..models.results import BootstrapCI, ConditionalSign, Estimates, TightnessCertificate
from ..models.sample import SampleData
from ..utils.exceptions import (
    AssumptionNotApplicableError,
    BootstrapFailedError,
    DegenerateInstrumentError,
    IdentificationError,
    NotBinaryOutcomeError,
    NoTakersError,
    ValidationError,
    WeakInstrumentError,
)
from ..utils.validation import validate_finite, validate_probability, validate_seed

logger = logging.getLogger(__name__)

MIN_BOOTSTRAP_REPLICATIONS = 100
# A bootstrap gives up after this many attempts per requested replication
REDRAW_FACTOR = 10


@dataclass(frozen=True)
class _ArmMoments:
    n: int
    n1: int
    k1: float
    k2: float
    mean_y_z1: float
    mean_y_z0: float

    @property
    def first_stage(self) -> float:
        return self.k1 - self.k2

    @property
    def itt(self) -> float:
        return self.mean_y_z1 - self.mean_y_z0


def _arm_moments(data: SampleData) -> _ArmMoments:
    z1 = data.z == 1
    n1 = int(z1.sum())
    if n1 == 0 or n1 == data.n:
        raise DegenerateInstrumentError(
            f"all {data.n} rows have z={int(data.z[0])}", quantity="instrument arms"
        )
    z0 = ~z1
    return _ArmMoments(
        n=data.n,
        n1=n1,
        k1=float(data.d[z1].mean()),
        k2=float(data.d[z0].mean()),
        mean_y_z1=float(data.y[z1].mean()),
        mean_y_z0=float(data.y[z0].mean()),
    )


def compliance_gamma(k1: float, k2: float) -> float:
    """|k1 - k2| / (k1 + k2), taken as 0 when nobody is treated."""
    total = k1 + k2
    return abs(k1 - k2) / total if total > 0 else 0.0


def cell_probability(data: SampleData) -> float:
    """P(Y=1, D=1 | Z=0) estimated as a fraction of the z=0 rows."""
    if not data.is_binary_outcome:
        raise NotBinaryOutcomeError(
            "dichotomize the outcome first", quantity="P(Y=D=1|Z=0)"
        )
    z0 = data.z == 0
    if not z0.any():
        raise DegenerateInstrumentError("no rows with z=0", quantity="P(Y=D=1|Z=0)")
    return float(np.mean((data.y[z0] == 1.0) & (data.d[z0] == 1)))


def estimate(data: SampleData, strict: bool = False) -> Estimates:
    """
    Plug-in estimates of the first stage, ITT, Wald ratio and magnitude bound.

    Args:
        data: Observed sample
        strict: Raise WeakInstrumentError instead of flagging k1_hat = k2_hat

    Returns:
        Estimates; beta_hat and lower_bound_hat are None under a zero first stage

    Raises:
        DegenerateInstrumentError: If z takes a single value
    """
    moments = _arm_moments(data)
    gamma_hat = compliance_gamma(moments.k1, moments.k2)

    beta_hat: Optional[float] = None
    lower_bound_hat: Optional[float] = None
    weak = moments.first_stage == 0
    if weak:
        if strict:
            raise WeakInstrumentError(
                f"k1_hat = k2_hat = {moments.k1:.6g}", quantity="beta_hat"
            )
        logger.warning(
            f"Zero estimated first stage (k1_hat = k2_hat = {moments.k1:.6g}); "
            "beta_hat is undefined"
        )
    else:
        beta_hat = moments.itt / moments.first_stage
        lower_bound_hat = abs(beta_hat) * gamma_hat

    cell_prob_hat = cell_probability(data) if data.is_binary_outcome else None

    return Estimates(
        n=moments.n,
        pz_hat=moments.n1 / moments.n,
        k1_hat=moments.k1,
        k2_hat=moments.k2,
        mean_y_z1=moments.mean_y_z1,
        mean_y_z0=moments.mean_y_z0,
        itt_hat=moments.itt,
        gamma_hat=gamma_hat,
        beta_hat=beta_hat,
        lower_bound_hat=lower_bound_hat,
        cell_prob_hat=cell_prob_hat,
        weak_instrument=weak,
    )


def magnitude_lower_bound(beta: float, k1: float, k2: float) -> float:
    """|beta| * |k1 - k2| / (k1 + k2): a floor on max{|mu1|, |mu2|} for any consistent DGP."""
    beta = validate_finite(beta, "beta")
    k1 = validate_probability(k1, "k1")
    k2 = validate_probability(k2, "k2")
    if k1 + k2 <= 0:
        raise NoTakersError("k1 = k2 = 0", quantity="magnitude lower bound")
    return abs(beta) * compliance_gamma(k1, k2)


def tightness_grid_search(
    beta: float,
    k1: float,
    k2: float,
    grid_size: int = 401,
    search_bound: Optional[float] = None,
) -> TightnessCertificate:
    """
    Grid-minimize max{|mu1|, |mu2|} over DGPs consistent with (beta, k1, k2).

    With lambda = c/b in [0, k2/k1], consistency forces
    mu1 = lambda*mu2 + (1 - lambda)*beta, so the search runs over (lambda, mu2)
    with mu2 in [-2*search_bound, 2*search_bound] (search_bound defaults to |beta|).
    """
    beta = validate_finite(beta, "beta")
    if beta == 0:
        raise ValidationError("beta must be nonzero", field="beta", value=str(beta))
    k1 = validate_probability(k1, "k1")
    k2 = validate_probability(k2, "k2")
    if not k1 > k2:
        raise ValidationError("requires k1 > k2 >= 0", field="k1", value=f"{k1} <= {k2}")
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2", field="grid_size", value=str(grid_size))

    bound = abs(beta) if search_bound is None else search_bound
    lambdas = np.linspace(0.0, k2 / k1, grid_size)
    mu2_values = np.linspace(-2.0 * bound, 2.0 * bound, grid_size)
    lam, mu2 = np.meshgrid(lambdas, mu2_values, indexing="ij")
    mu1 = lam * mu2 + (1.0 - lam) * beta
    objective = np.maximum(np.abs(mu1), np.abs(mu2))

    i, j = np.unravel_index(int(np.argmin(objective)), objective.shape)
    spacing = max(
        float(lambdas[1] - lambdas[0]),
        float(mu2_values[1] - mu2_values[0]),
    )
    return TightnessCertificate(
        beta=beta,
        k1=k1,
        k2=k2,
        minimum=float(objective[i, j]),
        argmin_lambda=float(lambdas[i]),
        argmin_mu2=float(mu2_values[j]),
        closed_form=abs(beta) * (k1 - k2) / (k1 + k2),
        grid_spacing=spacing,
    )


def lower_bound_tightness_certificate(
    beta: float, k1: float, k2: float, grid_size: int = 401
) -> float:
    """Grid minimum of max{|mu1|, |mu2|}; matches the closed-form bound up to grid resolution."""
    return tightness_grid_search(beta, k1, k2, grid_size).minimum


def sign_under_dominance(beta: float, cov_sign: int) -> ConditionalSign:
    """sign(mu1) = sign(beta) when |mu1| >= |mu2| and cov(D, Z) > 0."""
    beta = validate_finite(beta, "beta")
    if beta == 0:
        raise ValidationError("beta must be nonzero", field="beta", value="0")
    if cov_sign != 1:
        raise AssumptionNotApplicableError(
            f"sign dominance needs cov(D, Z) > 0 (got sign {cov_sign}); "
            "the orientation of Z is not without loss of generality here"
        )
    return ConditionalSign(sign=1 if beta > 0 else -1)


def dichotomize(data: SampleData, threshold: float) -> SampleData:
    """Replace y by 1{y >= threshold}."""
    threshold = validate_finite(threshold, "threshold")
    return data.with_outcome((data.y >= threshold).astype(float))


# Named statistics available to the bootstrap. Each raises an
# IdentificationError when undefined on a sample.


def _beta_statistic(data: SampleData) -> float:
    moments = _arm_moments(data)
    if moments.first_stage == 0:
        raise WeakInstrumentError("k1_hat = k2_hat", quantity="beta_hat")
    return moments.itt / moments.first_stage


def _lower_bound_statistic(data: SampleData) -> float:
    moments = _arm_moments(data)
    if moments.first_stage == 0:
        raise WeakInstrumentError("k1_hat = k2_hat", quantity="lower_bound_hat")
    if moments.k1 + moments.k2 == 0:
        raise NoTakersError("k1_hat = k2_hat = 0", quantity="lower_bound_hat")
    beta_hat = moments.itt / moments.first_stage
    return abs(beta_hat) * compliance_gamma(moments.k1, moments.k2)


def _boundary_statistic(data: SampleData) -> float:
    moments = _arm_moments(data)
    if moments.first_stage == 0:
        raise WeakInstrumentError("k1_hat = k2_hat", quantity="boundary")
    beta_hat = moments.itt / moments.first_stage
    return abs(beta_hat) * moments.first_stage


def _cell_complement_statistic(data: SampleData) -> float:
    """P(Y=0, D=1 | Z=0): the one-sided cell after relabeling Y as 1 - Y."""
    if not data.is_binary_outcome:
        raise NotBinaryOutcomeError("dichotomize the outcome first", quantity="P(Y=0,D=1|Z=0)")
    moments = _arm_moments(data)
    return moments.k2 - cell_probability(data)


STATISTICS: Dict[str, Callable[[SampleData], float]] = {
    "beta": _beta_statistic,
    "itt": lambda data: _arm_moments(data).itt,
    "k1": lambda data: _arm_moments(data).k1,
    "k2": lambda data: _arm_moments(data).k2,
    "pz": lambda data: _arm_moments(data).n1 / data.n,
    "gamma": lambda data: compliance_gamma(_arm_moments(data).k1, _arm_moments(data).k2),
    "lower_bound": _lower_bound_statistic,
    "boundary": _boundary_statistic,
    "cell_prob": cell_probability,
    "cell_prob_complement": _cell_complement_statistic,
}


def _resolve_statistic(statistic: str) -> Callable[[SampleData], float]:
    try:
        return STATISTICS[statistic]
    except KeyError:
        available = ", ".join(sorted(STATISTICS))
        raise ValidationError(
            f"unknown statistic; available: {available}", field="statistic", value=statistic
        )


def bootstrap(
    data: SampleData,
    statistic: str = "beta",
    level: float = 0.95,
    replications: int = 1000,
    seed: Optional[int] = None,
) -> BootstrapCI:
    """
    Nonparametric percentile bootstrap interval for a named statistic.

    Replication k resamples rows with a generator seeded by (seed, k). Resamples on
    which the statistic is undefined are redrawn, up to REDRAW_FACTOR * replications
    attempts in total. The interval is widened to contain the point estimate.

    Raises:
        BootstrapFailedError: If the attempt budget runs out
        IdentificationError: If the statistic is undefined on the full sample
    """
    compute = _resolve_statistic(statistic)
    validate_probability(level, "level", allow_zero=False, allow_one=False)
    if replications < MIN_BOOTSTRAP_REPLICATIONS:
        raise ValidationError(
            f"need at least {MIN_BOOTSTRAP_REPLICATIONS} replications",
            field="replications",
            value=str(replications),
        )
    seed = validate_seed(default_seed() if seed is None else seed)

    point = compute(data)
    values = []
    max_attempts = REDRAW_FACTOR * replications
    attempts = 0
    while len(values) < replications:
        if attempts >= max_attempts:
            raise BootstrapFailedError(
                f"only {len(values)} of {replications} resamples had a defined statistic",
                statistic=statistic,
                attempts=attempts,
            )
        rng = np.random.default_rng([seed, attempts])
        attempts += 1
        resample = data.take(rng.integers(0, data.n, size=data.n))
        try:
            values.append(compute(resample))
        except IdentificationError as e:
            logger.debug(f"Redrawing bootstrap resample {attempts - 1}: {e}")

    redraws = attempts - replications
    if redraws:
        logger.warning(f"Bootstrap for '{statistic}' redrew {redraws} undefined resamples")

    alpha = 1.0 - level
    lo, hi = np.quantile(np.asarray(values), [alpha / 2.0, 1.0 - alpha / 2.0])
    return BootstrapCI(
        statistic=statistic,
        point=point,
        lo=min(float(lo), point),
        hi=max(float(hi), point),
        level=level,
        replications=replications,
        seed=seed,
        redraws=redraws,
    )


def bootstrap_standard_error(
    data: SampleData,
    statistic: str,
    replications: int,
    rng: np.random.Generator,
) -> float:
    """
    Bootstrap standard error of a statistic; NaN when fewer than two resamples are defined.

    Moment statistics (beta, itt, k1, k2) resample all replications at once.
    """
    if replications < 2:
        raise ValidationError("need at least 2 replications", field="replications", value=str(replications))
    indices = rng.integers(0, data.n, size=(replications, data.n))

    if statistic in ("beta", "itt", "k1", "k2"):
        y, d, z = data.y[indices], data.d[indices], data.z[indices]
        n1 = z.sum(axis=1)
        n0 = data.n - n1
        with np.errstate(divide="ignore", invalid="ignore"):
            k1 = (d * z).sum(axis=1) / n1
            k2 = (d * (1 - z)).sum(axis=1) / n0
            itt = (y * z).sum(axis=1) / n1 - (y * (1 - z)).sum(axis=1) / n0
            values = {
                "beta": itt / (k1 - k2),
                "itt": itt,
                "k1": k1,
                "k2": k2,
            }[statistic]
        values = values[np.isfinite(values)]
    else:
        compute = _resolve_statistic(statistic)
        collected = []
        for row in indices:
            try:
                collected.append(compute(data.take(row)))
            except IdentificationError:
                continue
        values = np.asarray(collected, dtype=float)

    if len(values) < 2:
        return float("nan")
    return float(np.std(values, ddof=1))
