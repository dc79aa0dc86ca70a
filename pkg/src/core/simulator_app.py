"""
PAPC Simulator Application
Command-line entry point for sum-rate sweeps and approximation validation
"""

import argparse
import logging
import os
import sys
import time
from typing import Dict, List, Optional

from dotenv import dotenv_values

from ..config import VERBOSE_MODE, LOG_FILE, DEFAULT_SEED, DEFAULT_TRIALS, DEFAULT_METHODS, PAPC_WORKERS
from .errors import ConfigError, OutputError, PapcError
from .experiment import (
    ExperimentConfig, run_experiment, emit_csv, validate_approximations,
    emit_validation_csv, preset, expand_methods, ALL_METHODS,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3

# Options whose values may start with a minus sign
RANGE_OPTIONS = ('--snr-db', '--beta')


def parse_range(text: str) -> List[float]:
    """Parse 'start:step:stop' (inclusive) or a comma-separated list"""
    text = str(text).strip()
    try:
        if ':' in text:
            parts = [float(p) for p in text.split(':')]
            if len(parts) != 3 or parts[1] == 0.0:
                raise ConfigError(f"range must be start:step:stop with non-zero step, got '{text}'")
            start, step, stop = parts
            count = int(round((stop - start) / step)) + 1
            if count < 1:
                raise ConfigError(f"empty range '{text}'")
            return [round(start + i * step, 10) for i in range(count)]
        return [float(p) for p in text.split(',') if p.strip()]
    except ValueError as e:
        raise ConfigError(f"cannot parse '{text}': {e}") from e


def parse_int_list(text: str) -> List[int]:
    """Parse an integer list or range"""
    values = parse_range(text)
    if any(v != int(v) for v in values):
        raise ConfigError(f"expected integers, got '{text}'")
    return [int(v) for v in values]


def parse_methods(text: str) -> List[str]:
    """Parse 'all' or a comma-separated method list"""
    names = [name.strip() for name in str(text).split(',') if name.strip()]
    return names or list(ALL_METHODS)


def load_config_file(path: str) -> Dict[str, str]:
    """Read a flat key=value file; keys use the long flag names"""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {key.strip().lower().replace('-', '_'): value for key, value in values.items() if value is not None}


def _join_range_values(argv: List[str]) -> List[str]:
    # argparse would read '-10:5:30' as an option
    joined = []
    i = 0
    while i < len(argv):
        if argv[i] in RANGE_OPTIONS and i + 1 < len(argv):
            joined.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            joined.append(argv[i])
            i += 1
    return joined


def build_parser() -> argparse.ArgumentParser:
    """Create the command-line parser"""
    parser = argparse.ArgumentParser(
        prog='papc-sim',
        description='Per-antenna power allocation for ZF and CB precoding in large-scale MU-MIMO',
    )
    parser.add_argument('--verbose', action='store_true', help='log to the console at DEBUG level')
    sub = parser.add_subparsers(dest='command')

    sim = sub.add_parser('simulate', help='Monte Carlo sum-rate sweep')
    sim.add_argument('--m', type=int, default=None, help='antenna count')
    sim.add_argument('--k', type=int, default=None, help='user count')
    sim.add_argument('--snr-db', default=None, help="SNR grid, e.g. '-10:5:30' or '0,10'")
    sim.add_argument('--beta', default=None, help="CSI correlation grid, e.g. '1.0' or '0.5:0.1:1'")
    sim.add_argument('--trials', type=int, default=None)
    sim.add_argument('--seed', type=int, default=None)
    sim.add_argument('--methods', default=None, help="'all' or a comma-separated list")
    sim.add_argument('--out', default=None, help='output CSV path')
    sim.add_argument('--preset', default=None, help='fig5, fig6, fig7, fig8 or fig9')
    sim.add_argument('--config', default=None, help='key=value file overriding flags')

    val = sub.add_parser('validate-approx', help='check closed-form approximations against Monte Carlo')
    val.add_argument('--m', type=int, default=256)
    val.add_argument('--k', default='24', help="user counts, e.g. '24' or '4,8,16'")
    val.add_argument('--snr-db', default='-10,0,10,20,30')
    val.add_argument('--beta', default='0.8,0.9,0.95,1.0')
    val.add_argument('--trials', type=int, default=DEFAULT_TRIALS)
    val.add_argument('--seed', type=int, default=DEFAULT_SEED)
    val.add_argument('--out', default='approximations.csv')
    val.add_argument('--config', default=None, help='key=value file overriding flags')
    return parser


def _apply_overrides(args: argparse.Namespace) -> argparse.Namespace:
    if not getattr(args, 'config', None):
        return args
    overrides = load_config_file(args.config)
    known = vars(args)
    for key, value in overrides.items():
        if key not in known or key in ('command', 'config'):
            raise ConfigError(f"unknown config key '{key}' in {args.config}")
        setattr(args, key, value)
    return args


def _to_int(value, name: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be an integer, got '{value}'") from e


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Merge preset, flags and config-file values into an ExperimentConfig"""
    if args.preset:
        cfg = preset(args.preset)
    else:
        cfg = ExperimentConfig(snr_db=parse_range('-10:5:30'), methods=list(DEFAULT_METHODS))
    if args.m is not None:
        cfg.m = _to_int(args.m, 'm')
    if args.k is not None:
        cfg.k = _to_int(args.k, 'k')
    if args.snr_db is not None:
        cfg.snr_db = parse_range(args.snr_db)
    if args.beta is not None:
        cfg.beta = parse_range(args.beta)
    if args.trials is not None:
        cfg.trials = _to_int(args.trials, 'trials')
    if args.seed is not None:
        cfg.seed = _to_int(args.seed, 'seed')
    if args.methods is not None:
        cfg.methods = parse_methods(args.methods)
    if args.out is not None:
        cfg.output_path = args.out
    return cfg


def show_status(cfg: ExperimentConfig) -> None:
    """Show the sweep about to run"""
    print("\n📊 Sweep configuration:")
    print(f"   📡 Antennas M={cfg.m}, users K={cfg.k}")
    print(f"   🔊 SNR grid (dB): {cfg.snr_db}")
    print(f"   🎯 CSI correlation beta: {cfg.beta}")
    print(f"   🎲 Trials: {cfg.trials}, seed {cfg.seed}, workers {PAPC_WORKERS}")
    print(f"   🧮 Methods: {', '.join(cfg.methods)}")
    print(f"   💾 Output: {cfg.output_path}")
    print()


def run_simulate(args: argparse.Namespace) -> int:
    """Run the simulate subcommand"""
    cfg = config_from_args(args)
    cfg.methods = expand_methods(cfg.methods)
    cfg.validate()
    show_status(cfg)
    started = time.time()
    print("🚀 Running Monte Carlo sweep...")
    result = run_experiment(cfg)
    emit_csv(result, cfg.output_path)
    excluded = sum(cell.nonconverged for cell in result.cells)
    if excluded:
        print(f"⚠️  {excluded} non-convergent samples excluded")
    print(f"✅ Wrote {len(result.cells)} rows to {cfg.output_path} in {time.time() - started:.1f}s")
    return EXIT_OK


def run_validate(args: argparse.Namespace) -> int:
    """Run the validate-approx subcommand"""
    m = _to_int(args.m, 'm')
    k_list = parse_int_list(args.k)
    started = time.time()
    print(f"🔍 Validating approximations for M={m}, K={k_list}...")
    rows = validate_approximations(
        m, k_list, _to_int(args.trials, 'trials'), _to_int(args.seed, 'seed'),
        betas=parse_range(args.beta), snr_db=parse_range(args.snr_db),
    )
    emit_validation_csv(rows, args.out)
    worst = max((abs(row.error) for row in rows if row.table != 'qmax'), default=0.0)
    print(f"📊 Largest gap error: {worst:.3f} dB")
    print(f"✅ Wrote {len(rows)} rows to {args.out} in {time.time() - started:.1f}s")
    return EXIT_OK


def setup_logging(verbose: bool = VERBOSE_MODE) -> None:
    """Setup logging configuration"""
    log_level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(LOG_FILE),
            logging.StreamHandler() if verbose else logging.NullHandler()
        ]
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_range_values(argv))
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK

    setup_logging(args.verbose or VERBOSE_MODE)
    logger.info(f"PAPC simulator starting: {' '.join(argv)}")

    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        args = _apply_overrides(args)
        if args.command == 'simulate':
            return run_simulate(args)
        return run_validate(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"❌ Configuration error: {e}")
        return EXIT_CONFIG
    except OutputError as e:
        logger.error(f"Output error: {e}")
        print(f"❌ Could not write results: {e}")
        return EXIT_IO
    except PapcError as e:
        logger.error(f"Simulation failed: {e}")
        print(f"❌ Simulation failed: {e}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        print("\n🛑 Interrupted by user")
        logger.info("Interrupted by user")
        return EXIT_FAILURE
    finally:
        logger.info("PAPC simulator finished")
