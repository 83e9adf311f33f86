# backend/app/main.py - command-line driver
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import ConfigError, DomainError, OutputError
from app.models.run_config import load_run_config
from app.models.statistics import Statistics
from app.services import run_service

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockbridge", description="Two-particle Fock/Hilbert toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Evolve a configured two-particle walk and write observables")
    run.add_argument("config", type=Path, help="JSON run configuration")
    run.add_argument("--check", action="store_true", help="Validate only, write nothing")
    run.add_argument("--output-dir", type=Path, default=None, help="Overrides output_dir of the config")

    table = commands.add_parser("index-table", help="Print the Fock basis with its Hilbert indices as CSV")
    table.add_argument("--K", type=int, required=True, dest="K")
    table.add_argument("--stat", choices=[s.value for s in Statistics], required=True)
    return parser


def _run(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    result = run_service.run(config, output_dir=args.output_dir, dry_run=args.check)
    if args.check:
        logger.info(f"{args.config}: configuration valid")
    else:
        logger.info(f"wrote {len(result.written)} artifacts")
    return EXIT_OK


def _index_table(args: argparse.Namespace) -> int:
    run_service.emit_index_table(args.K, Statistics(args.stat), sys.stdout)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    handler = _run if args.command == "run" else _index_table
    try:
        return handler(args)
    except (ConfigError, ValidationError) as e:
        logger.error(f"config error: {e}")
        return EXIT_CONFIG
    except DomainError as e:
        logger.error(str(e))
        return EXIT_DOMAIN
    except (OutputError, OSError) as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
