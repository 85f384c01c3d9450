import logging

from ris_kit.commands.common import common_options, output
from ris_kit.services.sweep_service import SweepService
from ris_kit.utils.error_handlers import ConfigError

logger = logging.getLogger(__name__)


def cmd_sweep(args) -> int:
    if not args.spec:
        raise ConfigError("--spec is required for sweep")
    spec = SweepService.load_spec(args.spec)
    seed = args.seed if args.seed is not None else spec.base.seed
    logger.info(f"Sweep spec {args.spec} loaded, seed={seed}")
    rows = SweepService.run(spec, seed)
    output(SweepService.csv_header(args.timings), SweepService.csv_rows(rows, args.timings), args, force_csv=True)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", parents=[common_options()], help="parameter sweeps")
    parser.add_argument("--spec", help="sweep spec (JSON)")
    parser.add_argument("--timings", action="store_true", help="add a wall_time column")
    parser.set_defaults(handler=cmd_sweep)
