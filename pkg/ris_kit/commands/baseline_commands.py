import logging

from ris_kit.commands.common import common_options, load_scenario, output, resolve_seed
from ris_kit.config import DEFAULT_PHASE_DRAWS
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.services.monte_carlo_service import MonteCarloService

logger = logging.getLogger(__name__)

BASELINE_HEADER = ("user", "random_phase", "random_phase_std_error", "no_ris")


def cmd_random_baseline(args) -> int:
    """Random-phase rates next to the RIS-free rates, per user and summed"""
    scenario = load_scenario(args)
    seed = resolve_seed(args, scenario)
    logger.info(f"Random-phase baseline: {args.phase_draws} phase draws, trials={args.trials or 'closed form'}")
    rows = []
    for k in list(range(1, scenario.K + 1)) + [None]:
        estimate = MonteCarloService.random_phase_rate(scenario, k, args.phase_draws, seed, trials=args.trials)
        if k is None:
            no_ris = sum(ClosedFormService.rate_no_ris(j, scenario) for j in range(1, scenario.K + 1))
        else:
            no_ris = ClosedFormService.rate_no_ris(k, scenario)
        rows.append(("sum" if k is None else k, estimate.mean, estimate.std_error, float(no_ris)))
    output(BASELINE_HEADER, rows, args)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("random-baseline", parents=[common_options()],
                                   help="random-phase and no-RIS baselines")
    parser.add_argument("--phase-draws", dest="phase_draws", type=int, default=DEFAULT_PHASE_DRAWS)
    parser.set_defaults(handler=cmd_random_baseline)
