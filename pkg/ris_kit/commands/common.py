import argparse
import logging
import sys
from typing import Iterable, Sequence

from ris_kit.models.channel import PhaseShifts
from ris_kit.models.scenario import Scenario
from ris_kit.schemas.scenario import ScenarioConfig
from ris_kit.services.channel_service import ChannelService
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.services.scenario_service import ScenarioService
from ris_kit.utils.csv_io import render_csv, write_csv
from ris_kit.utils.error_handlers import ConfigError
from ris_kit.utils.rng import PHASE_STREAM, substream

logger = logging.getLogger(__name__)


def common_options() -> argparse.ArgumentParser:
    """Flags shared by every subcommand"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="scenario config (JSON)")
    parser.add_argument("--seed", type=int, default=None, help="master seed (defaults to the config seed)")
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--csv", action="store_true", help="machine-readable CSV output")
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trial count")
    parser.add_argument("--log-level", default=None, help="level of the ris_kit logger")
    return parser


def load_scenario(args) -> Scenario:
    if not args.config:
        raise ConfigError("--config is required for this command")
    config: ScenarioConfig = ScenarioService.load_config(args.config)
    return ScenarioService.build_scenario(config, seed=args.seed)


def resolve_seed(args, scenario: Scenario) -> int:
    if args.seed is not None:
        return args.seed
    return scenario.seed or 0


def parse_phases(source: str, scenario: Scenario) -> PhaseShifts:
    """zeros | aligned:k | random:seed | file:path"""
    kind, _, arg = source.partition(":")
    if kind == "zeros":
        return ChannelService.zero_phases(scenario.N)
    if kind == "aligned":
        return ClosedFormService.aligned_phases(int(arg or 1), scenario)
    if kind == "random":
        return ChannelService.random_phases(scenario.N, substream(int(arg or 0), PHASE_STREAM))
    if kind == "file":
        logger.info(f"Loading phase shifts from {arg}")
        return ChannelService.load_phases(arg, N=scenario.N)
    raise ConfigError(f"unknown phase source {source!r} (use zeros, aligned:k, random:seed or file:path)")


def format_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    def cell(value) -> str:
        if isinstance(value, float):
            return f"{value:.6g}"
        return "" if value is None else str(value)

    cells = [[str(h) for h in header]] + [[cell(v) for v in row] for row in rows]
    widths = [max(len(row[j]) for row in cells) for j in range(len(header))]
    lines = ["  ".join(text.rjust(width) for text, width in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def output(header: Sequence[str], rows: Iterable[Sequence], args, force_csv: bool = False,
           stream=None) -> None:
    """CSV file at --out when given; stdout gets CSV or an aligned table unless the file already holds the CSV"""
    stream = stream or sys.stdout
    rows = list(rows)
    as_csv = force_csv or args.csv
    if args.out:
        write_csv(args.out, header, rows)
        if as_csv:
            return
    stream.write(render_csv(header, rows) if as_csv else format_table(header, rows))
