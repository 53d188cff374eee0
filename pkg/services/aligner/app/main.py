"""
Manifold Bridge - command-line entry point
Verbs: align, benchmark, transfer, importance
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .artifacts import write_error
from .commands import align, benchmark, importance, transfer
from .config import settings
from .exceptions import AlignerError, ConfigError, DataError

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_BAD_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document")
    common.add_argument("--out", help="Output directory (overrides output_dir)")
    common.add_argument("--seed", type=int, help="Seed (overrides the config's seeds)")

    parser = argparse.ArgumentParser(
        prog="manifold-bridge",
        description=f"{settings.app_name}: manifold alignment with SPUD and MASH",
    )
    subparsers = parser.add_subparsers(dest="verb", required=True)
    for command in (align, benchmark, transfer, importance):
        command.add_parser(subparsers, [common])
    return parser


def handle_error(exc: BaseException, out_dir: str) -> int:
    """
    Log a failure, write error.json and pick the exit status
    """
    if isinstance(exc, (ConfigError, DataError, ValidationError)):
        logger.error(f"Invalid input: {exc}")
        status = EXIT_BAD_INPUT
    elif isinstance(exc, AlignerError):
        logger.error(f"Run failed: {exc}")
        status = EXIT_FAILURE
    else:
        logger.error(f"Unhandled exception: {exc}", exc_info=True)
        status = EXIT_FAILURE

    try:
        path = write_error(exc, out_dir)
        logger.info(f"Error details written to {path}")
    except OSError as e:
        logger.error(f"Could not write error.json to {out_dir}: {e}")
    return status


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.resolved_output = args.out or settings.output_dir

    logger.info(f"Starting {settings.app_name} {args.verb}...")
    try:
        return args.handler(args)
    except Exception as exc:
        return handle_error(exc, args.resolved_output)


if __name__ == "__main__":
    sys.exit(main())
