#!/usr/bin/env python3
"""
Harnack Lab - Main Application Entry Point

    python main.py chain --curve circle --radius 1 --N 5,20
    python main.py heat --sources "(-1,1);(1,1)"
    python main.py all --config run.json --out results --stable-output
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

from config import get_config
from src.core.exceptions import ConfigValidationError
from src.infrastructure.config import ExperimentConfig, setup_logging
from src.infrastructure.config.experiment_config import EXPERIMENTS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def parse_numbers(text: str, name: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigValidationError(name, f"expected comma-separated numbers, got {text!r}")


def parse_sources(text: str) -> List[List[float]]:
    """'(-1,1);(1,1)' -> [[-1, 1], [1, 1]]: location coordinates then weight."""
    sources = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()[] ")
        if chunk:
            sources.append(parse_numbers(chunk, "sources"))
    if not sources:
        raise ConfigValidationError("sources", f"no sources in {text!r}")
    return sources


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harnack-lab", description="Numerical verification of Harnack inequalities")
    parser.add_argument("command", choices=EXPERIMENTS, help="Suite to run")
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--env", choices=["development", "testing"], help="Built-in scale when no --config is given")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--stable-output", action="store_true", help="Omit timings so reports are byte-identical")
    parser.add_argument("--seed", type=int, help="Unsigned 64-bit seed")
    parser.add_argument("--parallel", action="store_true", help="Run suites in worker threads")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    overrides = parser.add_argument_group("parameter overrides")
    overrides.add_argument("--curve", help="circle, ellipse or generic")
    overrides.add_argument("--radius", type=float)
    overrides.add_argument("--semi-axes", help="a,b")
    overrides.add_argument("--M", type=int, help="Support samples per curve")
    overrides.add_argument("--N", help="Comma-separated stretch parameters")
    overrides.add_argument("--sources", help='Point sources, e.g. "(-1,1);(1,1)"')
    overrides.add_argument("--dt", type=float)
    overrides.add_argument("--t-end", type=float)
    overrides.add_argument("--scheme", help="semi_implicit or explicit")
    overrides.add_argument("--L", type=float, help="Grid box half-width (default: 6 circumradii of the curve)")
    overrides.add_argument("--resolution", type=int, help="Grid points per axis (odd)")
    return parser


def build_config(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        config = ExperimentConfig.for_environment(get_config(args.env))

    N = parse_numbers(args.N, "N") if args.N else None
    return config.with_overrides(
        experiment=args.command,
        output_dir=args.out,
        stable_output=True if args.stable_output else None,
        parallel=True if args.parallel else None,
        seed=args.seed,
        curve=args.curve,
        radius=args.radius,
        semi_axes=parse_numbers(args.semi_axes, "semi_axes") if args.semi_axes else None,
        curve_samples=args.M,
        chain_N=N if args.command == "chain" else None,
        N_sequence=N if args.command != "chain" else None,
        sources=parse_sources(args.sources) if args.sources else None,
        dt=args.dt,
        t_end=args.t_end,
        scheme=args.scheme,
        half_width=args.L,
        resolution=args.resolution,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    env = get_config(args.env)
    setup_logging("DEBUG" if args.verbose else env.LOG_LEVEL, env.LOG_FORMAT)

    try:
        config = build_config(args)
    except ConfigValidationError as e:
        print(f"❌ Invalid configuration: {e.message}", file=sys.stderr)
        return EXIT_CONFIG

    from src.workflow.orchestrators.verification_orchestrator import VerificationOrchestrator

    logger.info(f"🚀 Running {config.experiment} (seed {config.seed}) into {config.output_dir}")
    report = VerificationOrchestrator(config).run()
    if not report["passed"]:
        for name in report["failed_checks"]:
            print(f"❌ failed: {name}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
