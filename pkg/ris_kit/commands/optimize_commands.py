import logging
import os
import sys

from pydantic import ValidationError

from ris_kit.commands.common import common_options, format_table, load_scenario, resolve_seed
from ris_kit.config import DEFAULT_PHASE_DRAWS
from ris_kit.models.ga import GA_TRACE_CSV_HEADER
from ris_kit.schemas.ga import GaConfig
from ris_kit.services.channel_service import ChannelService
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.services.ga_service import GaService
from ris_kit.services.monte_carlo_service import MonteCarloService
from ris_kit.utils.csv_io import write_csv
from ris_kit.utils.error_handlers import config_error_from_pydantic

logger = logging.getLogger(__name__)

GA_FLAGS = {
    "population": "population",
    "elites": "elites",
    "culled": "culled",
    "parents": "parents",
    "offspring": "crossover_offspring",
    "mutation_prob": "mutation_prob",
    "generations": "max_generations",
    "generation_factor": "generation_factor",
    "stagnation": "stagnation_window",
    "snapshot_every": "snapshot_every",
}


def ga_config_from_args(args) -> GaConfig:
    values = {field: getattr(args, flag) for flag, field in GA_FLAGS.items() if getattr(args, flag) is not None}
    try:
        return GaConfig(**values)
    except ValidationError as e:
        raise config_error_from_pydantic(e, "GA flags") from e


def cmd_optimize(args) -> int:
    """Run the GA, write the best phases and the trace, compare with the baselines"""
    scenario = load_scenario(args)
    seed = resolve_seed(args, scenario)
    config = ga_config_from_args(args)

    best, trace = GaService.run(scenario, config, seed)
    out_dir = args.out or "results"
    os.makedirs(out_dir, exist_ok=True)
    ChannelService.save_phases(os.path.join(out_dir, "phases.csv"), best)
    write_csv(os.path.join(out_dir, "trace.csv"), GA_TRACE_CSV_HEADER, trace.csv_rows())
    logger.info(f"GA results written to {out_dir}")

    optimized = ClosedFormService.sum_rate(best, scenario)
    random_phase = MonteCarloService.random_phase_rate(scenario, None, args.phase_draws, seed).mean
    no_ris = sum(ClosedFormService.rate_no_ris(k, scenario) for k in range(1, scenario.K + 1))
    rows = [("optimal_ga", optimized), ("random_phase", random_phase), ("no_ris", no_ris)]
    sys.stdout.write(format_table(("mode", "sum_rate"), rows))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("optimize", parents=[common_options()], help="GA phase-shift design")
    parser.add_argument("--population", type=int)
    parser.add_argument("--elites", type=int)
    parser.add_argument("--culled", type=int)
    parser.add_argument("--parents", type=int)
    parser.add_argument("--offspring", type=int)
    parser.add_argument("--mutation-prob", dest="mutation_prob", type=float)
    parser.add_argument("--generations", type=int, help="fixed generation budget")
    parser.add_argument("--generation-factor", dest="generation_factor", type=int,
                        help="budget of factor * N generations (default 100)")
    parser.add_argument("--stagnation", type=int, help="stop after this many generations without improvement")
    parser.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    parser.add_argument("--phase-draws", dest="phase_draws", type=int, default=DEFAULT_PHASE_DRAWS)
    parser.set_defaults(handler=cmd_optimize)
