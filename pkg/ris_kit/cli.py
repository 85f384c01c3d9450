import argparse
import logging
from typing import List, Optional

from ris_kit import __version__
from ris_kit.commands import (
    baseline_commands,
    optimize_commands,
    rate_commands,
    sweep_commands,
    validate_commands,
)
from ris_kit.utils.error_handlers import EXIT_OK, handle_exception
from ris_kit.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-kit",
        description="Statistical-CSI rate analysis and phase design for RIS-aided massive MIMO uplinks",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register subcommands
    rate_commands.register(subparsers)
    validate_commands.register(subparsers)
    optimize_commands.register(subparsers)
    sweep_commands.register(subparsers)
    baseline_commands.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, run one subcommand and map its outcome to the exit-code contract"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level=args.log_level)

    logger.debug(f"Running {args.command} with {vars(args)}")
    try:
        code = args.handler(args)
    except Exception as exc:
        return handle_exception(exc)
    return EXIT_OK if code is None else code
