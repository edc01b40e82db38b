"""Monte Carlo experiments on observationally equivalent DGP pairs.

A sign procedure maps a sample to a nonempty subset of {-1, 0, 1}. Because a
forged twin induces the same law of (Y, D, Z) as its base, any procedure
produces the same distribution of confidence sets under both, while the two
complier LATEs have opposite signs. The twin experiment measures this directly.
"""

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from ..models.config import ExperimentConfig
from ..models.sample import SampleData
from ..models.theta import Theta
from ..utils.exceptions import (
    ConfigurationError,
    DegenerateInstrumentError,
    IdentificationError,
    RefuseToRunError,
    ValidationError,
    WeakInstrumentError,
)
from ..utils.validation import validate_config, validate_seed
from .adversarial import verify_equivalence
from .dgp import iv_beta, late_complier, sample
from .estimation import bootstrap_standard_error, compliance_gamma, estimate

logger = logging.getLogger(__name__)

SIGNS: FrozenSet[int] = frozenset({-1, 0, 1})

# Pairs further apart than this are not treated as equivalent
REFUSE_DISTANCE = 1e-9

# Chi-square categories need this expected count
MIN_EXPECTED_COUNT = 5.0

# DGP tags mixed into replication seeds
BASE_TAG = 0
TWIN_TAG = 1

SignProcedure = Callable[[SampleData, np.random.Generator], FrozenSet[int]]
ProcedureFactory = Callable[[ExperimentConfig], SignProcedure]

SIGN_PROCEDURES: Dict[str, ProcedureFactory] = {}


def register_procedure(name: str) -> Callable[[ProcedureFactory], ProcedureFactory]:
    """Register a procedure factory under ``name``."""

    def decorator(factory: ProcedureFactory) -> ProcedureFactory:
        if name in SIGN_PROCEDURES:
            raise ConfigurationError(f"procedure {name!r} already registered", setting="procedure")
        SIGN_PROCEDURES[name] = factory
        return factory

    return decorator


def get_procedure(config: ExperimentConfig) -> SignProcedure:
    try:
        factory = SIGN_PROCEDURES[config.procedure]
    except KeyError:
        available = ", ".join(sorted(SIGN_PROCEDURES))
        raise ConfigurationError(
            f"unknown procedure {config.procedure!r}; available: {available}",
            setting="procedure",
        )
    return factory(config)


def _sign(value: float) -> int:
    return int(np.sign(value))


def _point_beta(data: SampleData) -> Optional[float]:
    try:
        return estimate(data).beta_hat
    except DegenerateInstrumentError:
        return None


@register_procedure("plug-in-sign")
def plug_in_sign(config: ExperimentConfig) -> SignProcedure:
    """{sign(beta_hat)}; the full set when beta_hat is undefined."""

    def procedure(data: SampleData, rng: np.random.Generator) -> FrozenSet[int]:
        beta_hat = _point_beta(data)
        if beta_hat is None:
            return SIGNS
        return frozenset({_sign(beta_hat)})

    return procedure


@register_procedure("t-test-sign")
def t_test_sign(config: ExperimentConfig) -> SignProcedure:
    """{sign(beta_hat)} when |beta_hat| clears the bootstrap critical value, else the full set."""
    critical = float(stats.norm.ppf(1.0 - config.alpha / 2.0))

    def procedure(data: SampleData, rng: np.random.Generator) -> FrozenSet[int]:
        beta_hat = _point_beta(data)
        if beta_hat is None:
            return SIGNS
        se = bootstrap_standard_error(data, "beta", config.bootstrap_replications, rng)
        if not np.isfinite(se) or se <= 0:
            return SIGNS
        if abs(beta_hat) > critical * se:
            return frozenset({_sign(beta_hat)})
        return SIGNS

    return procedure


@register_procedure("always-ambiguous")
def always_ambiguous(config: ExperimentConfig) -> SignProcedure:
    def procedure(data: SampleData, rng: np.random.Generator) -> FrozenSet[int]:
        return SIGNS

    return procedure


def outcome_label(outcome: FrozenSet[int]) -> str:
    """Stable text label of a confidence set, e.g. '{-1,0,1}'."""
    return "{" + ",".join(str(s) for s in sorted(outcome)) + "}"


@dataclass(frozen=True)
class CoverageLedger:
    """Counts of confidence-set events over the replications of one DGP."""

    replications: int
    contains_minus: int
    contains_zero: int
    contains_plus: int
    contains_both: int  # both -1 and 1
    covers_target: int

    @property
    def holds(self) -> bool:
        """#{-1 and 1 in CS} >= #{-1 in CS} + #{1 in CS} - R; true for any tally."""
        return self.contains_both >= self.contains_minus + self.contains_plus - self.replications

    @property
    def coverage(self) -> float:
        return self.covers_target / self.replications

    def to_dict(self) -> Dict[str, object]:
        result: Dict[str, object] = asdict(self)
        result["holds"] = self.holds
        result["coverage"] = self.coverage
        return result


def tally(outcomes: Sequence[FrozenSet[int]], target_sign: int) -> CoverageLedger:
    return CoverageLedger(
        replications=len(outcomes),
        contains_minus=sum(1 for cs in outcomes if -1 in cs),
        contains_zero=sum(1 for cs in outcomes if 0 in cs),
        contains_plus=sum(1 for cs in outcomes if 1 in cs),
        contains_both=sum(1 for cs in outcomes if -1 in cs and 1 in cs),
        covers_target=sum(1 for cs in outcomes if target_sign in cs),
    )


@dataclass(frozen=True)
class EqualityTest:
    """Chi-square test that two samples of confidence sets share one distribution."""

    statistic: float
    df: int
    p_value: float
    categories: List[str]

    def rejects(self, significance: float) -> bool:
        return self.p_value < significance


def outcome_equality_test(
    counts_a: Dict[str, int], counts_b: Dict[str, int]
) -> EqualityTest:
    """
    Two-sample chi-square test over confidence-set categories.

    Categories whose expected count falls below MIN_EXPECTED_COUNT are pooled;
    a pooled bucket that is still too small joins the smallest kept category.
    With fewer than two categories left the test is vacuous (statistic 0, p = 1).
    """
    labels = sorted(set(counts_a) | set(counts_b))
    total_a = sum(counts_a.values())
    total_b = sum(counts_b.values())
    grand = total_a + total_b

    def expected(label: str) -> float:
        column = counts_a.get(label, 0) + counts_b.get(label, 0)
        return column * min(total_a, total_b) / grand if grand else 0.0

    kept = [label for label in labels if expected(label) >= MIN_EXPECTED_COUNT]
    pooled = [label for label in labels if label not in kept]
    groups: List[List[str]] = [[label] for label in kept]
    if pooled:
        pooled_column = sum(counts_a.get(l, 0) + counts_b.get(l, 0) for l in pooled)
        pooled_expected = pooled_column * min(total_a, total_b) / grand if grand else 0.0
        if pooled_expected >= MIN_EXPECTED_COUNT or not groups:
            groups.append(pooled)
        elif pooled_column > 0:
            smallest = min(groups, key=lambda g: sum(expected(l) for l in g))
            smallest.extend(pooled)

    names = ["|".join(group) for group in groups]
    if len(groups) < 2:
        return EqualityTest(statistic=0.0, df=0, p_value=1.0, categories=names)

    table = np.array(
        [
            [sum(counts.get(l, 0) for l in group) for group in groups]
            for counts in (counts_a, counts_b)
        ]
    )
    statistic, p_value, df, _ = stats.chi2_contingency(table, correction=False)
    return EqualityTest(
        statistic=float(statistic), df=int(df), p_value=float(p_value), categories=names
    )


@dataclass(frozen=True)
class TwinExperimentReport:
    """Outcome of running one sign procedure on both members of an equivalent pair."""

    procedure: str
    n: int
    replications: int
    seed: int
    alpha: float
    significance: float
    equivalence_distance: float
    target_sign_base: int
    target_sign_twin: int
    counts_base: Dict[str, int]
    counts_twin: Dict[str, int]
    equality_test: EqualityTest
    ledger_base: CoverageLedger
    ledger_twin: CoverageLedger

    @property
    def rejects_equality(self) -> bool:
        return self.equality_test.rejects(self.significance)

    @property
    def coverage_base(self) -> float:
        return self.ledger_base.coverage

    @property
    def coverage_twin(self) -> float:
        return self.ledger_twin.coverage

    @property
    def cross_bound(self) -> float:
        """Lower bound on P({-1, 1} in CS) implied by coverage of both targets."""
        return self.coverage_base + self.coverage_twin - 1.0

    @property
    def coverage_reaches_target(self) -> Dict[str, bool]:
        target = 1.0 - self.alpha
        return {"base": self.coverage_base >= target, "twin": self.coverage_twin >= target}

    def to_dict(self) -> Dict[str, object]:
        return {
            "procedure": self.procedure,
            "n": self.n,
            "replications": self.replications,
            "seed": self.seed,
            "alpha": self.alpha,
            "significance": self.significance,
            "equivalence_distance": self.equivalence_distance,
            "target_sign": {"base": self.target_sign_base, "twin": self.target_sign_twin},
            "counts": {"base": dict(self.counts_base), "twin": dict(self.counts_twin)},
            "equality_test": {
                "statistic": self.equality_test.statistic,
                "df": self.equality_test.df,
                "p_value": self.equality_test.p_value,
                "categories": list(self.equality_test.categories),
                "rejects": self.rejects_equality,
            },
            "ledger": {"base": self.ledger_base.to_dict(), "twin": self.ledger_twin.to_dict()},
            "coverage": {"base": self.coverage_base, "twin": self.coverage_twin},
            "cross_bound": self.cross_bound,
            "coverage_reaches_target": self.coverage_reaches_target,
        }


def _replicate(
    theta: Theta,
    tag: int,
    index: int,
    config: ExperimentConfig,
    procedure: SignProcedure,
) -> FrozenSet[int]:
    data = sample(theta, config.n, [config.seed, tag, index, 0])
    rng = np.random.default_rng([config.seed, tag, index, 1])
    outcome = frozenset(procedure(data, rng))
    if not outcome or not outcome <= SIGNS:
        raise ValidationError(
            "procedure must return a nonempty subset of {-1, 0, 1}",
            field="procedure",
            value=str(sorted(outcome)),
        )
    return outcome


def _run_replications(
    theta: Theta, tag: int, config: ExperimentConfig, procedure: SignProcedure
) -> List[FrozenSet[int]]:
    if config.workers and config.workers > 1:
        return Parallel(n_jobs=config.workers, prefer="threads")(
            delayed(_replicate)(theta, tag, i, config, procedure)
            for i in range(config.replications)
        )
    return [_replicate(theta, tag, i, config, procedure) for i in range(config.replications)]


def run_twin_experiment(
    theta: Theta, twin: Theta, config: ExperimentConfig
) -> TwinExperimentReport:
    """
    Apply a sign procedure to samples from both members of an equivalent pair.

    Replication i of the base uses seeds derived from (seed, 0, i) and of the twin
    from (seed, 1, i), so the two sample streams are independent.

    Raises:
        RefuseToRunError: If the pair is not observationally equivalent
        ConfigurationError: If the procedure is not registered
    """
    validate_config(config)
    validate_seed(config.seed)
    distance = verify_equivalence(theta, twin)
    if distance > REFUSE_DISTANCE:
        raise RefuseToRunError("DGPs are not observationally equivalent", distance=distance)
    procedure = get_procedure(config)

    target_base = _sign(late_complier(theta))
    target_twin = _sign(late_complier(twin))

    logger.info(
        f"Running '{config.procedure}' on an equivalent pair: n={config.n}, "
        f"replications={config.replications}, seed={config.seed}"
    )
    outcomes_base = _run_replications(theta, BASE_TAG, config, procedure)
    outcomes_twin = _run_replications(twin, TWIN_TAG, config, procedure)

    counts_base = dict(sorted(Counter(outcome_label(cs) for cs in outcomes_base).items()))
    counts_twin = dict(sorted(Counter(outcome_label(cs) for cs in outcomes_twin).items()))

    report = TwinExperimentReport(
        procedure=config.procedure,
        n=config.n,
        replications=config.replications,
        seed=config.seed,
        alpha=config.alpha,
        significance=config.significance,
        equivalence_distance=distance,
        target_sign_base=target_base,
        target_sign_twin=target_twin,
        counts_base=counts_base,
        counts_twin=counts_twin,
        equality_test=outcome_equality_test(counts_base, counts_twin),
        ledger_base=tally(outcomes_base, target_base),
        ledger_twin=tally(outcomes_twin, target_twin),
    )
    logger.info(
        f"Coverage base={report.coverage_base:.3f}, twin={report.coverage_twin:.3f}; "
        f"equality p-value={report.equality_test.p_value:.3g}"
    )
    return report


ESTIMANDS = ("beta", "k1", "k2", "gamma")


@dataclass(frozen=True)
class SweepRow:
    n: int
    mean_abs_error: Dict[str, Optional[float]]
    weak_instrument: int
    degenerate: int

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass(frozen=True)
class ConsistencySweepReport:
    """Mean absolute estimation error per sample size."""

    seed: int
    seeds: int
    truth: Dict[str, Optional[float]]
    rows: List[SweepRow]
    # Share of seeds whose error at the largest size is below that at the smallest
    seed_decay_fraction: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def monotone_decay(self) -> Dict[str, bool]:
        """Per estimand: mean error never increases with n."""
        flags = {}
        for name in ESTIMANDS:
            errors = [row.mean_abs_error[name] for row in self.rows]
            defined = [e for e in errors if e is not None]
            flags[name] = all(later <= earlier for earlier, later in zip(defined, defined[1:]))
        return flags

    def to_dict(self) -> Dict[str, object]:
        return {
            "seed": self.seed,
            "seeds": self.seeds,
            "truth": dict(self.truth),
            "rows": [row.to_dict() for row in self.rows],
            "monotone_decay": self.monotone_decay,
            "seed_decay_fraction": dict(self.seed_decay_fraction),
        }


def _true_values(theta: Theta) -> Dict[str, Optional[float]]:
    try:
        beta: Optional[float] = iv_beta(theta)
    except WeakInstrumentError:
        beta = None
    return {
        "beta": beta,
        "k1": theta.k1,
        "k2": theta.k2,
        "gamma": compliance_gamma(theta.k1, theta.k2),
    }


def _errors(theta_truth: Dict[str, Optional[float]], data: SampleData) -> Tuple[Dict[str, Optional[float]], bool]:
    estimates = estimate(data)
    observed = {
        "beta": estimates.beta_hat,
        "k1": estimates.k1_hat,
        "k2": estimates.k2_hat,
        "gamma": estimates.gamma_hat,
    }
    errors: Dict[str, Optional[float]] = {}
    for name in ESTIMANDS:
        truth, value = theta_truth[name], observed[name]
        errors[name] = None if truth is None or value is None else abs(value - truth)
    return errors, estimates.weak_instrument


def run_consistency_sweep(
    theta: Theta, sizes: Sequence[int], seeds: int, seed: Optional[int] = None
) -> ConsistencySweepReport:
    """
    Mean absolute error of (beta_hat, k1_hat, k2_hat, gamma_hat) at each sample size.

    Sample s at size n is drawn with seed (seed, n, s). Zero first stages are
    counted as weak-instrument draws and single-arm samples as degenerate draws.
    """
    if not sizes:
        raise ValidationError("sizes must be nonempty", field="sizes")
    if seeds < 1:
        raise ValidationError("seeds must be at least 1", field="seeds", value=str(seeds))
    if seed is None:
        seed = ExperimentConfig().seed
    seed = validate_seed(seed)
    ordered = sorted(set(int(n) for n in sizes))
    truth = _true_values(theta)

    per_seed: Dict[int, List[Dict[str, Optional[float]]]] = {}
    rows = []
    for n in ordered:
        collected: Dict[str, List[float]] = {name: [] for name in ESTIMANDS}
        draws: List[Dict[str, Optional[float]]] = []
        weak = degenerate = 0
        for s in range(seeds):
            data = sample(theta, n, [seed, n, s])
            try:
                errors, is_weak = _errors(truth, data)
            except IdentificationError as e:
                logger.debug(f"Degenerate draw at n={n}, seed index {s}: {e}")
                degenerate += 1
                draws.append({name: None for name in ESTIMANDS})
                continue
            weak += int(is_weak)
            draws.append(errors)
            for name, error in errors.items():
                if error is not None:
                    collected[name].append(error)
        per_seed[n] = draws
        rows.append(
            SweepRow(
                n=n,
                mean_abs_error={
                    name: float(np.mean(values)) if values else None
                    for name, values in collected.items()
                },
                weak_instrument=weak,
                degenerate=degenerate,
            )
        )
        logger.info(f"Sweep n={n}: weak={weak}, degenerate={degenerate}")

    decay: Dict[str, Optional[float]] = {}
    if len(ordered) >= 2:
        smallest, largest = per_seed[ordered[0]], per_seed[ordered[-1]]
        for name in ESTIMANDS:
            pairs = [
                (small[name], large[name])
                for small, large in zip(smallest, largest)
                if small[name] is not None and large[name] is not None
            ]
            decay[name] = (
                sum(1 for small, large in pairs if large < small) / len(pairs) if pairs else None
            )

    return ConsistencySweepReport(
        seed=seed, seeds=seeds, truth=truth, rows=rows, seed_decay_fraction=decay
    )
