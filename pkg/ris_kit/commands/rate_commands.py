import logging

import numpy as np

from ris_kit.commands.common import common_options, load_scenario, output, parse_phases
from ris_kit.services.closed_form_service import ClosedFormService

logger = logging.getLogger(__name__)

RATE_HEADER = ("user", "signal", "interference", "noise", "sinr", "rate")


def cmd_rate(args) -> int:
    """Closed-form rate breakdown for one phase configuration"""
    scenario = load_scenario(args)
    phases = parse_phases(args.phases, scenario)
    breakdown = ClosedFormService.rate_breakdown(phases, scenario)
    logger.info(f"Closed-form rates for phases={args.phases}: sum={breakdown.sum_rate:.6g}")

    rows = []
    for idx in range(breakdown.K):
        rows.append((
            idx + 1,
            float(breakdown.signal[idx]),
            float(np.sum(breakdown.interference[idx])),
            float(breakdown.noise[idx]),
            float(breakdown.sinr[idx]),
            float(breakdown.rate[idx]),
        ))
    rows.append(("sum", None, None, None, None, breakdown.sum_rate))
    output(RATE_HEADER, rows, args)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("rate", parents=[common_options()], help="closed-form ergodic rates")
    parser.add_argument("--phases", default="zeros", help="zeros | aligned:k | random:seed | file:path")
    parser.set_defaults(handler=cmd_rate)
