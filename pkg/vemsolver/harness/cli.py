"""Command-line front end.

Usage:
    python -m vemsolver --config config/convergence.conf
    python -m vemsolver --config config/solve-pde.conf --out results/pde.csv --seed 7 --verbose

Exit status: 0 success, 2 parse/domain/input error, 3 numerical failure,
4 invariant violation, 5 output error.
"""

import argparse
import logging
import sys
from pathlib import Path

from vemsolver import __version__
from vemsolver.config import get_settings, load_run_config
from vemsolver.errors import InvariantViolation, OutputError, ResolutionError, VemsolverError
from vemsolver.harness.commands import HANDLERS
from vemsolver.harness.output import emit_csv, render_summary, summary_path, write_summary
from vemsolver.schemas import RunConfig

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> dict:
    """Execute one command and write its CSV and summaries; returns the summary dict.

    Raises InvariantViolation after writing every artifact when a check fails.
    """
    handler = HANDLERS[config.command]
    logger.info("running %s", config.command)
    result = handler(config)

    csv_path = Path(config.output or f"{config.command}.csv")
    emit_csv(csv_path, result.columns, result.rows)
    yaml_path = summary_path(csv_path)
    summary = {
        "command": config.command,
        "config": config.model_dump(exclude_none=True),
        "results": result.results,
        "report": result.report,
        "checks": {name: "pass" if ok else "fail" for name, ok in result.checks.items()},
        "artifacts": {"csv": str(csv_path), "summary": str(yaml_path)},
    }
    write_summary(yaml_path, summary)
    sys.stdout.write(render_summary(summary))

    failed = [name for name, ok in result.checks.items() if not ok]
    if failed:
        for name in failed:
            logger.warning("invariant check failed: %s", name)
        raise InvariantViolation(f"{config.command}: failed checks {', '.join(failed)}")
    logger.info("%s finished: %d rows, all %d checks passed", config.command, len(result.rows), len(result.checks))
    return summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vemsolver",
        description="Solver and verification harness for evolution equations with a variable-exponent memory kernel",
    )
    parser.add_argument("--config", required=True, help="Run config file (key = value lines)")
    parser.add_argument("--out", help="CSV output path (overrides 'output')")
    parser.add_argument("--seed", type=int, help="Random seed (overrides 'seed')")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=get_settings().LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
    try:
        config = load_run_config(args.config, {"output": args.out, "seed": args.seed})
        run(config)
    except VemsolverError as exc:
        print(f"error category={exc.category} status={exc.status}: {exc}", file=sys.stderr)
        return exc.status
    except MemoryError:
        error = ResolutionError("grid or truncation too large for the available memory")
        print(f"error category={error.category} status={error.status}: {error}", file=sys.stderr)
        return error.status
    except OSError as exc:
        error = OutputError(str(exc))
        print(f"error category={error.category} status={error.status}: {error}", file=sys.stderr)
        return error.status
    return 0


if __name__ == "__main__":
    sys.exit(main())
