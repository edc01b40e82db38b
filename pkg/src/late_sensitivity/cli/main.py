"""Command-line interface for LATE sensitivity analysis."""

import argparse
import logging
import sys
import traceback
from typing import List, Optional, Tuple, Union

from .. import __version__
from ..core.adversarial import (
    METHOD_BINARY_INTERIOR,
    METHOD_BINARY_ONE_SIDED,
    METHOD_CONTINUOUS,
    forge_binary_interior,
    forge_binary_onesided,
    forge_continuous,
    verify_equivalence,
    verify_membership,
)
from ..core.boundary import (
    binary_boundary,
    classify_general_bounded,
    classify_interior,
    classify_one_sided,
    classify_worst_case,
)
from ..core.dgp import iv_beta, type_effect
from ..core.estimation import bootstrap, dichotomize, estimate
from ..core.simulation import run_consistency_sweep, run_twin_experiment
from ..data.documents import (
    DgpDocument,
    ExperimentReportDocument,
    build_analysis_report,
    config_hash,
    document_to_dgp,
    forge_to_document,
    parse_model_document,
    parse_simulation_config,
    to_canonical_json,
)
from ..data.fixtures import PUBLISHED_SUMMARIES, builtin_twin_pair
from ..data.sample_loader import load_sample_csv, write_sample_csv
from ..models.config import AnalysisConfig, ExperimentConfig, ForgeConfig, default_seed
from ..models.results import EQUIVALENCE_TOLERANCE, BootstrapCI, BoundaryReport, ForgeResult
from ..models.sample import SampleData
from ..models.theta import BinaryTheta, Theta
from ..utils.exceptions import (
    ConfigurationError,
    IdentificationError,
    LateSensitivityError,
    ValidationError,
)
from ..utils.file_utils import read_text, write_output
from ..utils.validation import validate_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DANGER = 2

# Statistics bootstrapped by `estimate --bootstrap`
BOOTSTRAP_STATISTICS = ("beta", "itt", "k1", "k2", "gamma", "lower_bound")


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Set up logging configuration; records go to stderr."""
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    format_str = (
        "%(levelname)s: %(message)s"
        if not verbose
        else "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    logging.basicConfig(
        level=level,
        format=format_str,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def create_config_from_args(args) -> AnalysisConfig:
    """Create AnalysisConfig from command-line arguments."""
    config = AnalysisConfig()

    if hasattr(args, "y_col") and args.y_col:
        config.y_col = args.y_col

    if hasattr(args, "d_col") and args.d_col:
        config.d_col = args.d_col

    if hasattr(args, "z_col") and args.z_col:
        config.z_col = args.z_col

    if hasattr(args, "bootstrap") and args.bootstrap:
        config.bootstrap_replications = args.bootstrap

    if hasattr(args, "level") and args.level is not None:
        config.level = args.level

    if hasattr(args, "seed") and args.seed is not None:
        config.seed = args.seed

    if hasattr(args, "eta") and args.eta is not None:
        config.eta = args.eta

    if hasattr(args, "M") and args.M is not None:
        config.M = args.M

    validate_config(config)
    return config


def create_forge_config_from_args(args) -> ForgeConfig:
    """Create ForgeConfig from command-line arguments."""
    config = ForgeConfig()

    for name in ("eps1", "eps2", "M", "eta", "delta_rule", "floor"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)

    validate_config(config)
    return config


def _handle_error(args, error: Exception) -> int:
    if isinstance(error, LateSensitivityError):
        print(f"Error: {error}", file=sys.stderr)
    else:
        print(f"Unexpected error: {error}", file=sys.stderr)
    if getattr(args, "verbose", False):
        traceback.print_exc()
    return EXIT_ERROR


def _print_report(report: BoundaryReport, label: Optional[str] = None) -> None:
    title = label or report.regime.value
    print(f"\n{title}:")
    print(f"  Boundary |beta|(k1-k2): {report.boundary:.4f}")
    print(f"  Compared {report.quantity_name}: {report.quantity:.4f}")
    print(f"  Margin: {report.margin:+.4f}")
    print(f"  Verdict: {report.verdict.value}")
    for note in report.notes:
        print(f"  Note: {note}")


def _exit_for(reports: List[BoundaryReport]) -> int:
    point_reports = [r for r in reports if not r.extension]
    if any(not r.is_safe for r in point_reports):
        return EXIT_DANGER
    return EXIT_OK


def _classify_estimates(
    data: SampleData, config: AnalysisConfig, beta: float, k1: float, k2: float,
    cell_prob: Optional[float],
) -> List[BoundaryReport]:
    reports = []
    if config.eta is not None:
        if data.is_binary_outcome:
            if config.eta <= k2:
                reports.append(classify_interior(beta, k1, k2, config.eta))
            else:
                logger.warning(
                    f"eta = {config.eta} exceeds k2_hat = {k2:.4f}; interior rule skipped"
                )
        if config.M is not None:
            reports.append(classify_general_bounded(beta, k1, k2, config.eta, config.M))
    if cell_prob is not None:
        reports.append(classify_one_sided(beta, k1, k2, cell_prob))
    return reports


def _worst_case(
    data: SampleData, config: AnalysisConfig, point_reports: List[BoundaryReport]
) -> Tuple[List[BoundaryReport], List[BootstrapCI]]:
    """Worst-case classification of each point report from bootstrap intervals.

    The boundary is always estimated. Only the one-sided cell probability is;
    eta and 2*M*eta are user inputs and enter as degenerate intervals.
    """
    def interval(statistic: str) -> BootstrapCI:
        return bootstrap(data, statistic, config.level, config.bootstrap_replications, config.seed)

    boundary_ci = interval("boundary")
    intervals = [boundary_ci]
    reports = []
    for report in point_reports:
        if report.cell_prob is not None:
            cell_ci = interval("cell_prob_complement" if report.relabeled else "cell_prob")
            intervals.append(cell_ci)
            quantity = (cell_ci.lo, cell_ci.hi)
        else:
            quantity = (report.quantity, report.quantity)
        reports.append(classify_worst_case(report, (boundary_ci.lo, boundary_ci.hi), quantity))
    return reports, intervals


def estimate_command(args) -> int:
    """Handle the estimate subcommand."""
    try:
        config = create_config_from_args(args)
        data = load_sample_csv(args.csv, config)
        estimates = estimate(data)

        print(f"Sample: {args.csv} ({estimates.n} rows)")
        print("\nEstimates:")
        print(f"  P(Z=1):         {estimates.pz_hat:.4f}")
        print(f"  k1 = P(D=1|Z=1): {estimates.k1_hat:.4f}")
        print(f"  k2 = P(D=1|Z=0): {estimates.k2_hat:.4f}")
        print(f"  ITT:            {estimates.itt_hat:.4f}")
        print(f"  gamma:          {estimates.gamma_hat:.4f}")
        if estimates.beta_hat is not None:
            print(f"  beta (Wald):    {estimates.beta_hat:.4f}")
            print(f"  |beta|*gamma:   {estimates.lower_bound_hat:.4f}")
        else:
            print("  beta (Wald):    undefined (zero first stage)")
        if estimates.cell_prob_hat is not None:
            print(f"  P(Y=D=1|Z=0):   {estimates.cell_prob_hat:.4f}")

        reports: List[BoundaryReport] = []
        intervals: List[BootstrapCI] = []
        oriented = estimates.k1_hat > estimates.k2_hat
        if estimates.beta_hat is not None and not oriented:
            logger.warning("k1_hat <= k2_hat: relabel Z so that k1 > k2 to classify")
        if estimates.beta_hat is not None and oriented:
            reports = _classify_estimates(
                data,
                config,
                estimates.beta_hat,
                estimates.k1_hat,
                estimates.k2_hat,
                estimates.cell_prob_hat,
            )

        if config.bootstrap_replications:
            for statistic in BOOTSTRAP_STATISTICS:
                try:
                    intervals.append(
                        bootstrap(
                            data,
                            statistic,
                            config.level,
                            config.bootstrap_replications,
                            config.seed,
                        )
                    )
                except IdentificationError as e:
                    logger.warning(f"No bootstrap interval for {statistic}: {e}")
            if reports:
                worst, extra = _worst_case(data, config, reports)
                reports.extend(worst)
                intervals.extend(extra)

            print(f"\nBootstrap {config.level:.0%} intervals ({config.bootstrap_replications} replications):")
            for ci in intervals:
                marker = "" if ci.contains(0.0) else "  excludes 0"
                print(f"  {ci.statistic:<22} {ci.point:+.4f}  [{ci.lo:+.4f}, {ci.hi:+.4f}]{marker}")

        for report in reports:
            label = f"{report.regime.value} (worst case, extension)" if report.extension else None
            _print_report(report, label)

        if args.report:
            document = build_analysis_report(
                estimates,
                reports,
                intervals,
                config,
                seed=config.seed,
                tool_version=__version__,
                input_path=str(args.csv),
            )
            write_output(to_canonical_json(document), args.report)

        return _exit_for(reports)

    except Exception as e:
        return _handle_error(args, e)


def boundary_command(args) -> int:
    """Handle the boundary subcommand."""
    try:
        beta, k1, k2, cell_prob = args.beta, args.k1, args.k2, args.cell_prob
        regime = args.regime
        if args.preset:
            summary = PUBLISHED_SUMMARIES[args.preset]
            beta = summary.beta if beta is None else beta
            k1 = summary.k1 if k1 is None else k1
            k2 = summary.k2 if k2 is None else k2
            cell_prob = summary.cell_prob if cell_prob is None else cell_prob
            regime = regime or summary.regime
            print(f"Preset: {summary.name}")
        if beta is None or k1 is None or k2 is None:
            raise ConfigurationError("--beta, --k1 and --k2 are required", setting="boundary")
        regime = regime or ("one-sided" if cell_prob is not None else "interior")

        boundary = binary_boundary(beta, k1, k2)
        print(f"Boundary |beta|(k1-k2) = {boundary:.4f}")

        report: Optional[BoundaryReport] = None
        if regime == "interior" and args.eta is not None:
            report = classify_interior(beta, k1, k2, args.eta)
        elif regime == "one-sided" and cell_prob is not None:
            # Summary numbers may come from different tables
            report = classify_one_sided(beta, k1, k2, cell_prob, check_consistency=False)
        elif regime == "general" and args.eta is not None:
            if args.M is None:
                raise ConfigurationError("--M is required for the general regime", setting="M")
            report = classify_general_bounded(beta, k1, k2, args.eta, args.M)

        if report is None:
            logger.info(f"No compared quantity for regime '{regime}'; boundary only")
            return EXIT_OK

        _print_report(report)

        if args.report:
            document = build_analysis_report(
                {"beta_hat": beta, "k1_hat": k1, "k2_hat": k2, "cell_prob_hat": cell_prob},
                [report],
                [],
                {"beta": beta, "k1": k1, "k2": k2, "regime": regime, "eta": args.eta,
                 "cell_prob": cell_prob, "M": args.M},
                seed=default_seed(),
                tool_version=__version__,
            )
            write_output(to_canonical_json(document), args.report)

        return _exit_for([report])

    except Exception as e:
        return _handle_error(args, e)


def _load_dgp(path: str, role: str = "base") -> Union[Theta, BinaryTheta]:
    source = "<stdin>" if path == "-" else path
    return parse_model_document(read_text(path), file_path=source, role=role)


def _run_forge(model: Union[Theta, BinaryTheta], method: str, config: ForgeConfig) -> ForgeResult:
    if method == METHOD_CONTINUOUS:
        theta = model.to_theta() if isinstance(model, BinaryTheta) else model
        return forge_continuous(theta, config)
    if not isinstance(model, BinaryTheta):
        raise ValidationError(
            "binary forges need a binary DGP document", field="method", value=method
        )
    if method == METHOD_BINARY_INTERIOR:
        return forge_binary_interior(model, config.eta, config.floor)
    return forge_binary_onesided(model, config.floor)


def forge_command(args) -> int:
    """Handle the forge subcommand."""
    try:
        config = create_forge_config_from_args(args)
        model = _load_dgp(args.dgp)
        result = _run_forge(model, args.method, config)

        logger.info(
            f"Forged {result.method} twin: c_tilde={result.c_tilde:.4f}, "
            f"mu1={result.mu1_twin:.4f}, mu2={result.mu2_twin:.4f}, "
            f"distance={result.equivalence_distance:.2e}"
        )
        failed = result.membership_ok.failed()
        if failed:
            logger.warning(f"Membership checks failed: {', '.join(failed)}")

        write_output(to_canonical_json(forge_to_document(result)), args.output)
        return EXIT_OK if result.certified else EXIT_ERROR

    except Exception as e:
        return _handle_error(args, e)


def audit_command(args) -> int:
    """Handle the audit subcommand."""
    try:
        base = _load_dgp(args.base, role="base")
        twin = _load_dgp(args.twin, role="twin")
        distance = verify_equivalence(base, twin)

        base_theta = base.to_theta() if isinstance(base, BinaryTheta) else base
        twin_theta = twin.to_theta() if isinstance(twin, BinaryTheta) else twin

        print(f"Equivalence distance: {distance:.3e}")
        print(f"  base: mu1={type_effect(base_theta, 1, 0):+.6f}  mu2={type_effect(base_theta, 0, 1):+.6f}")
        print(f"  twin: mu1={type_effect(twin_theta, 1, 0):+.6f}  mu2={type_effect(twin_theta, 0, 1):+.6f}")

        try:
            base_beta = iv_beta(base_theta)
        except IdentificationError as e:
            logger.warning(f"Membership not checked: {e}")
        else:
            flags = verify_membership(
                twin_theta,
                ForgeConfig(M=twin_theta.M, eta=max(twin_theta.c, 0.0)),
                base_beta,
                base_theta.k1,
                base_theta.k2,
            )
            print("Membership:")
            for name, value in flags.to_dict().items():
                if value is not None:
                    print(f"  {name}: {'ok' if value else 'FAILED'}")

        if distance <= EQUIVALENCE_TOLERANCE:
            print("Observationally equivalent")
            return EXIT_OK
        print("NOT observationally equivalent")
        return EXIT_ERROR

    except Exception as e:
        return _handle_error(args, e)


def simulate_command(args) -> int:
    """Handle the simulate subcommand."""
    try:
        source = "<stdin>" if args.config == "-" else args.config
        settings = parse_simulation_config(read_text(args.config), file_path=source)

        if settings.dgp is None:
            theta, twin = builtin_twin_pair()
        else:
            base = _load_from_document(settings.dgp, source)
            if settings.twin is not None:
                twin = _load_from_document(settings.twin, source)
                theta = base
            else:
                forge_config = settings.forge.to_config() if settings.forge else ForgeConfig()
                forged = forge_continuous(base, forge_config)
                theta, twin = base, forged.twin

        experiments = []
        for name in settings.procedures:
            config = ExperimentConfig(
                n=settings.n,
                replications=settings.replications,
                seed=settings.seed,
                alpha=settings.alpha,
                procedure=name,
                significance=settings.significance,
                bootstrap_replications=settings.bootstrap_replications,
                workers=settings.workers,
            )
            report = run_twin_experiment(theta, twin, config)
            experiments.append(report.to_dict())
            if not args.quiet:
                print(
                    f"{name}: coverage base={report.coverage_base:.3f} "
                    f"twin={report.coverage_twin:.3f}, equality p={report.equality_test.p_value:.3f}",
                    file=sys.stderr,
                )

        sweep = None
        if settings.sweep is not None:
            sweep = run_consistency_sweep(
                theta, settings.sweep.sizes, settings.sweep.seeds, settings.seed
            ).to_dict()

        document = ExperimentReportDocument(
            config_hash=config_hash(settings),
            equivalence_distance=verify_equivalence(theta, twin),
            experiments=experiments,
            sweep=sweep,
            tool_version=__version__,
        )
        write_output(to_canonical_json(document), args.output)
        return EXIT_OK

    except Exception as e:
        return _handle_error(args, e)


def _load_from_document(document: DgpDocument, source: str) -> Theta:
    model = document_to_dgp(document, source)
    return model.to_theta() if isinstance(model, BinaryTheta) else model


def dichotomize_command(args) -> int:
    """Handle the dichotomize subcommand."""
    try:
        config = create_config_from_args(args)
        data = load_sample_csv(args.csv, config)
        binary = dichotomize(data, args.threshold)
        logger.info(
            f"Dichotomized at {args.threshold}: {int(binary.y.sum())} of {binary.n} rows are 1"
        )
        write_sample_csv(binary, args.output, config.y_col, config.d_col, config.z_col)
        return EXIT_OK

    except Exception as e:
        return _handle_error(args, e)


def _add_column_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--y-col", type=str, help="Outcome column (default: y)")
    parser.add_argument("--d-col", type=str, help="Treatment column (default: d)")
    parser.add_argument("--z-col", type=str, help="Instrument column (default: z)")


def create_parser() -> argparse.ArgumentParser:
    """Create command-line argument parser."""
    parser = argparse.ArgumentParser(
        description="Sensitivity of the LATE sign to violations of monotonicity",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Estimates, magnitude bound and one-sided classification for a sample
  late-sensitivity estimate data.csv --bootstrap 1000 --seed 7 --report report.json

  # Read the sample from stdin with custom column names
  cat data.csv | late-sensitivity estimate - --y-col earnings --d-col trained --z-col offered

  # Boundary for published summary numbers
  late-sensitivity boundary --beta -0.0950 --k1 0.4105 --k2 0.3557 --eta 0.003
  late-sensitivity boundary --preset jtpa

  # Forge an observationally equivalent twin and audit it
  late-sensitivity forge base.json --eta 0.03 --output twin.json
  late-sensitivity audit base.json twin.json

  # Monte Carlo twin experiment
  late-sensitivity simulate sim.json --output experiment.json

  # Turn a continuous outcome into 1{y >= t}
  late-sensitivity dichotomize data.csv --threshold 0.5 --output binary.csv

Exit codes: 0 success or SafeSide, 2 DangerSide, 1 error.
Default seed: $LATE_SENSITIVITY_SEED (fallback 20240101).
        """,
    )

    # Global options
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Enable verbose output"
    )
    parser.add_argument(
        "--quiet", "-q", action="store_true", help="Only log warnings and errors"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Estimate command
    est_parser = subparsers.add_parser("estimate", help="Estimate from an observed sample")
    est_parser.add_argument("csv", help="Input CSV file ('-' for stdin)")
    _add_column_arguments(est_parser)
    est_parser.add_argument(
        "--bootstrap", type=int, metavar="N", help="Bootstrap replications (0 = none, else >= 100)"
    )
    est_parser.add_argument("--level", type=float, help="Confidence level (default: 0.95)")
    est_parser.add_argument("--seed", type=int, help="Random seed")
    est_parser.add_argument("--eta", type=float, help="Defier-share bound to classify")
    est_parser.add_argument("--M", type=float, help="Outcome bound for the general rule")
    est_parser.add_argument("--report", type=str, metavar="PATH", help="Write a JSON report")

    # Boundary command
    bnd_parser = subparsers.add_parser("boundary", help="Classify summary numbers")
    bnd_parser.add_argument("--beta", type=float, help="Wald estimand")
    bnd_parser.add_argument("--k1", type=float, help="P(D=1|Z=1)")
    bnd_parser.add_argument("--k2", type=float, help="P(D=1|Z=0)")
    bnd_parser.add_argument("--eta", type=float, help="Defier-share bound")
    bnd_parser.add_argument("--cell-prob", type=float, help="P(Y=1, D=1 | Z=0)")
    bnd_parser.add_argument("--M", type=float, help="Outcome bound (general regime)")
    bnd_parser.add_argument(
        "--regime", choices=["interior", "one-sided", "general"], help="Classification rule"
    )
    bnd_parser.add_argument(
        "--preset", choices=sorted(PUBLISHED_SUMMARIES), help="Use published summary numbers"
    )
    bnd_parser.add_argument("--report", type=str, metavar="PATH", help="Write a JSON report")

    # Forge command
    forge_parser = subparsers.add_parser("forge", help="Forge an adversarial twin")
    forge_parser.add_argument("dgp", help="DGP document ('-' for stdin)")
    forge_parser.add_argument(
        "--method",
        choices=[METHOD_CONTINUOUS, METHOD_BINARY_INTERIOR, METHOD_BINARY_ONE_SIDED],
        default=METHOD_CONTINUOUS,
        help="Construction (default: continuous)",
    )
    forge_parser.add_argument("--eta", type=float, help="Defier share (default: 0.03)")
    forge_parser.add_argument("--eps1", type=float, help="Quantile level (default: 0.2)")
    forge_parser.add_argument("--eps2", type=float, help="Required quantile gap (default: 0.3)")
    forge_parser.add_argument("--M", type=float, help="Outcome bound (default: 1.0)")
    forge_parser.add_argument(
        "--delta-rule", type=float, help="Position of delta in its interval (default: 0.5)"
    )
    forge_parser.add_argument("--floor", type=float, help="Binary cell floor (default: 0.05)")
    forge_parser.add_argument("--output", "-o", type=str, metavar="PATH", help="Output file (default: stdout)")

    # Audit command
    audit_parser = subparsers.add_parser("audit", help="Check two DGPs for equivalence")
    audit_parser.add_argument("base", help="Base DGP or forge document")
    audit_parser.add_argument("twin", help="Twin DGP or forge document")

    # Simulate command
    sim_parser = subparsers.add_parser("simulate", help="Run a Monte Carlo twin experiment")
    sim_parser.add_argument("config", help="Simulation config document ('-' for stdin)")
    sim_parser.add_argument("--output", "-o", type=str, metavar="PATH", help="Output file (default: stdout)")

    # Dichotomize command
    dich_parser = subparsers.add_parser("dichotomize", help="Replace y by 1{y >= threshold}")
    dich_parser.add_argument("csv", help="Input CSV file ('-' for stdin)")
    dich_parser.add_argument("--threshold", type=float, required=True, help="Cut point")
    _add_column_arguments(dich_parser)
    dich_parser.add_argument("--output", "-o", type=str, metavar="PATH", help="Output file (default: stdout)")

    return parser


COMMANDS = {
    "estimate": estimate_command,
    "boundary": boundary_command,
    "forge": forge_command,
    "audit": audit_command,
    "simulate": simulate_command,
    "dichotomize": dichotomize_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for CLI."""
    parser = create_parser()
    argv = sys.argv[1:] if argv is None else argv

    # If no arguments provided, show help
    if not argv:
        parser.print_help()
        return EXIT_OK

    args = parser.parse_args(argv)

    # Set up logging
    setup_logging(args.verbose, args.quiet)

    handler = COMMANDS.get(args.command)
    if handler is None:
        parser.print_help()
        return EXIT_ERROR
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
