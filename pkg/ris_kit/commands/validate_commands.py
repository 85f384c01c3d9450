import logging

from ris_kit.commands.common import common_options, load_scenario, output, parse_phases, resolve_seed
from ris_kit.config import DEFAULT_MOMENT_TRIALS, Z_SCORE_LIMIT
from ris_kit.models.estimate import MOMENT_CSV_HEADER
from ris_kit.services.monte_carlo_service import MonteCarloService
from ris_kit.utils.error_handlers import ValidationFailure

logger = logging.getLogger(__name__)


def cmd_validate(args) -> int:
    """Monte Carlo check of every moment identity; exit 1 when any |z| exceeds the limit"""
    scenario = load_scenario(args)
    phases = parse_phases(args.phases, scenario)
    trials = args.trials or DEFAULT_MOMENT_TRIALS
    report = MonteCarloService.moment_report(scenario, phases, trials, resolve_seed(args, scenario))
    output(MOMENT_CSV_HEADER, report.csv_rows(), args, force_csv=True)

    flagged = report.flagged(args.z_limit)
    worst = max((abs(row.z_score) for row in report.rows), default=0.0)
    logger.info(f"Validated {len(report.rows)} expectations, max |z| = {worst:.3f}, flagged = {len(flagged)}")
    if flagged:
        names = ", ".join(f"{row.name}(k={row.k}, i={row.i}, z={row.z_score:.2f})" for row in flagged)
        raise ValidationFailure(f"{len(flagged)} expectation(s) beyond |z| > {args.z_limit}: {names}")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", parents=[common_options()], help="Monte Carlo moment checks")
    parser.add_argument("--phases", default="random:0", help="zeros | aligned:k | random:seed | file:path")
    parser.add_argument("--z-limit", type=float, default=Z_SCORE_LIMIT)
    parser.set_defaults(handler=cmd_validate)
