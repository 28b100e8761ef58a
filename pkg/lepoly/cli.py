"""
Command-line entry point: `lepoly --f <expr> --g <expr> ...`.
"""

import argparse
import os
import sys
from typing import List, NoReturn, Optional

from loguru import logger
from pydantic import ValidationError

from . import __version__
from .config import RunConfig
from .errors import ConfigError
from .pipeline import run_pipeline


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's exit 2."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="lepoly",
        description="Lê polyhedron of the germ f·ḡ at the origin (g depending on y only)",
    )
    parser.add_argument("--f", required=True, help="polynomial f(x, y), e.g. 'x^2+y^3'")
    parser.add_argument("--g", default="1", help="polynomial g(y); '1' for the holomorphic case")
    parser.add_argument("--t", default="auto", help="|t| override or 'auto'")
    parser.add_argument("--arg-t", type=float, default=0.0, help="argument of t in radians")
    parser.add_argument("--seed", type=int, help="base point jitter seed")
    parser.add_argument("--trunc", type=int, help="Puiseux truncation order")
    parser.add_argument("--tol", type=float, help="root residual tolerance")
    parser.add_argument("--max-step", type=float, help="largest tracking step (path fraction)")
    parser.add_argument("--workers", type=int, help="tracking threads")
    parser.add_argument("--report", help="write the JSON report here instead of stdout")
    parser.add_argument("--dot", help="write the polyhedron as Graphviz DOT")
    parser.add_argument("--csv", help="write tracked trajectories as CSV")
    parser.add_argument("--oracle", action="store_true", help="run independent oracles")
    parser.add_argument("--version", action="version", version=f"lepoly {__version__}")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Flags override environment defaults; unset flags keep them."""
    overrides = {
        "seed": args.seed,
        "trunc": args.trunc,
        "tol_root": args.tol,
        "max_step": args.max_step,
        "workers": args.workers,
    }
    try:
        return RunConfig(
            f=args.f,
            g=args.g,
            t=args.t,
            arg_t=args.arg_t,
            report_path=args.report,
            dot_path=args.dot,
            csv_path=args.csv,
            oracle=args.oracle,
            **{k: v for k, v in overrides.items() if v is not None},
        )
    except (ValidationError, ValueError) as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return e.exit_code
    os.makedirs("logs", exist_ok=True)
    sink = logger.add(
        "logs/lepoly.log", rotation="1 day", level=os.getenv("LOG_LEVEL", "INFO")
    )
    try:
        return _run(args)
    finally:
        logger.remove(sink)


def _run(args: argparse.Namespace) -> int:
    try:
        config = config_from_args(args)
    except ConfigError as e:
        logger.error(str(e))
        print(str(e), file=sys.stderr)
        return e.exit_code

    report = run_pipeline(config)
    payload = report.to_json()
    if config.report_path:
        with open(config.report_path, "w", encoding="utf-8") as handle:
            handle.write(payload + "\n")
        logger.info(f"Report written to {config.report_path}")
    else:
        print(payload)
    if report.status != "ok":
        print(f"lepoly: {report.error}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
