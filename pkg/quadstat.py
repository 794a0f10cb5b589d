#!/usr/bin/env python3
"""
quadstat - Main Entry Point

An exact-arithmetic workbench for quadratic-algebra realizations of
generalized particle statistics: braid and PBW checks, Hilbert series,
classification, Koszul duality and truncated Fock spaces.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from src.commands import COMMANDS, EXIT_FAILURE, EXIT_INPUT_ERROR, EXIT_OK, QuadstatCommands
from src.config import Config
from src.errors import QuadstatError
from src.model_file import default_preset_set, preset_document, preset_filename, write_model_file
from src.replay import MISMATCH, REPRODUCED, UNSUPPORTED, WitnessReplayer
from src.statmodel import PRESET_ALIASES, PRESET_NAMES

DEFAULT_REPORT = "quadstat_report.json"


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Setup logging configuration; stdout is kept for the summary table."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )


def _add_common_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Options accepted both before and after the subcommand."""
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        '--guard-dim',
        type=int,
        default=default(None),
        help='Largest ambient dimension allowed (default: model file guard, '
             'then QUADSTAT_GUARD_DIM, then 20000)'
    )
    parser.add_argument(
        '--log-level',
        type=str,
        default=default('INFO'),
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level (default: INFO)'
    )
    parser.add_argument(
        '--log-file',
        type=str,
        default=default(None),
        help='Also write the log to this file'
    )
    parser.add_argument(
        '--verbose',
        action='store_true',
        default=default(False),
        help='Enable verbose output'
    )


def create_argument_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser."""
    parser = argparse.ArgumentParser(
        description='Exact checks for quadratic-algebra statistics models',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s validate presets/boson.d2.json
  %(prog)s hilbert presets/singlet_pair_completed.d2.json --degree 4 --mode both
  %(prog)s classify presets/boson.d1.json --degree 8
  %(prog)s report-all presets/singlet_pair.d2.json --out singlet.json
  %(prog)s --replay singlet.json                   # re-evaluate every stored witness
  %(prog)s preset --all --out presets/              # regenerate the shipped model files

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 input error.
        """
    )
    parser.add_argument(
        '--replay',
        type=str,
        metavar='REPORT',
        help='Re-evaluate the witnesses stored in a JSON report'
    )
    _add_common_options(parser, suppress=False)

    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, suppress=True)

    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    descriptions = {
        'validate': 'parse the model, assemble P_gen and check the rank bookkeeping',
        'yb': 'global and internal braid identities and the PBW cubic check',
        'hilbert': 'single-mode and full Hilbert series with the factorization check',
        'classify': 'transfermionic / transbosonic classification of G(t)',
        'koszul': 'dual relations, dual series and the Koszul identity',
        'fock': 'truncated Fock space and its operator identities',
        'report-all': 'run the whole pipeline and write one report',
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, parents=[common], help=descriptions[command])
        sub.add_argument('model', type=str, help='Model file (JSON)')
        sub.add_argument(
            '--degree',
            type=int,
            help='Truncation degree N (default: the model n_max)'
        )
        sub.add_argument(
            '--mode',
            type=str,
            choices=list(Config.MODES),
            help='Series sectors for hilbert (default: both) and koszul (default: single)'
        )
        sub.add_argument(
            '-o', '--out',
            type=str,
            default=DEFAULT_REPORT if command == 'report-all' else None,
            help='Write the JSON report here' +
                 (f' (default: {DEFAULT_REPORT})' if command == 'report-all' else '')
        )
        sub.add_argument(
            '--max-fit-degree',
            type=int,
            default=3,
            help='Largest denominator degree tried for non-terminating series (default: 3)'
        )
        sub.add_argument(
            '--pade',
            action='store_true',
            help='Also report a rational P/Q fit of G(t)'
        )

    preset = subparsers.add_parser('preset', parents=[common], help='write preset model files')
    preset.add_argument('name', nargs='?', choices=[*PRESET_NAMES, *PRESET_ALIASES],
                        help='Preset to write')
    preset.add_argument('--d', type=int, help='Number of modes (default: preset dependent)')
    preset.add_argument('--all', action='store_true', help='Write the whole shipped preset set')
    preset.add_argument(
        '-o', '--out',
        type=str,
        default='presets',
        help='Output file, or directory with --all (default: presets)'
    )
    return parser


def run_presets(args: argparse.Namespace, logger: logging.Logger) -> int:
    """Write one preset file, or the shipped set with --all."""
    out = Path(args.out)
    if args.all:
        for name, d in default_preset_set():
            write_model_file(preset_document(name, d), out / preset_filename(name, d))
        logger.info(f"Wrote {len(default_preset_set())} preset files to {out}")
        return EXIT_OK
    if not args.name:
        logger.error("preset needs a NAME or --all")
        return EXIT_INPUT_ERROR
    document = preset_document(args.name, args.d)
    d = document["model"]["d"]
    target = out / preset_filename(args.name, d) if out.suffix != '.json' else out
    write_model_file(document, target)
    return EXIT_OK


def run_replay(report_path: str, config: Config, logger: logging.Logger) -> int:
    """Replay every witness of a report; exit 1 if any no longer reproduces."""
    replayer = WitnessReplayer(config)
    outcomes = replayer.replay_file(Path(report_path))
    for outcome in outcomes:
        print(f"{outcome.check:40}  {outcome.status:12}  {outcome.details}")
    mismatches = [o for o in outcomes if o.status == MISMATCH]
    unsupported = [o for o in outcomes if o.status == UNSUPPORTED]
    reproduced = [o for o in outcomes if o.status == REPRODUCED]
    logger.info(f"Replay: {len(reproduced)} reproduced, {len(mismatches)} mismatched, "
                f"{len(unsupported)} without a replay rule")
    return EXIT_FAILURE if mismatches else EXIT_OK


def main() -> int:
    """Main entry point."""
    parser = create_argument_parser()
    args = parser.parse_args()

    # Setup logging
    log_level = 'DEBUG' if args.verbose else args.log_level
    setup_logging(log_level, args.log_file)
    logger = logging.getLogger(__name__)

    try:
        overrides = {'log_level': log_level}
        if args.guard_dim is not None:
            overrides['guard_dim'] = args.guard_dim

        if args.replay:
            config = Config.from_env(replay_path=Path(args.replay), **overrides)
            logger.info(f"Replaying witnesses from: {args.replay}")
            return run_replay(args.replay, config, logger)

        if not args.command:
            parser.error("a COMMAND is required unless --replay is given")
        if args.command == 'preset':
            return run_presets(args, logger)

        config = Config.from_env(
            degree=args.degree,
            mode=args.mode,
            output_path=Path(args.out) if args.out else None,
            max_fit_degree=args.max_fit_degree,
            pade=args.pade,
            **overrides
        )
        model_path = Path(args.model)
        if not model_path.exists():
            logger.error(f"Model file does not exist: {args.model}")
            return EXIT_INPUT_ERROR

        commands = QuadstatCommands(config)
        result = commands.run(args.command, model_path)
        print(commands.output.render_summary(result.report))
        logger.info(f"Finished {args.command} with exit code {result.exit_code}")
        return result.exit_code

    except QuadstatError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INPUT_ERROR
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        logger.debug("Exception details:", exc_info=True)
        return EXIT_INPUT_ERROR


if __name__ == '__main__':
    sys.exit(main())
