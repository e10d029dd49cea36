"""Run every example config and report the exit status of each command.

Usage:
    python scripts/acceptance_sweep.py
    python scripts/acceptance_sweep.py --config-dir config --out-dir results --skip regularity-report
"""

import argparse
import sys
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(BASE_DIR))

from vemsolver.harness.cli import main as run_cli  # noqa: E402

STATUS_NAMES = {0: "ok", 2: "parse", 3: "numerical", 4: "invariant", 5: "io"}


def sweep(config_dir: Path, out_dir: Path, skip: set[str], seed: int | None) -> int:
    configs = sorted(config_dir.glob("*.conf"))
    if not configs:
        print(f"[ERROR] No configs found in {config_dir}")
        return 1

    failures = passed = 0
    for path in configs:
        if path.stem in skip:
            print(f"[SKIP] {path.stem}")
            continue
        argv = ["--config", str(path), "--out", str(out_dir / f"{path.stem}.csv")]
        if seed is not None:
            argv += ["--seed", str(seed)]
        status = run_cli(argv)
        label = STATUS_NAMES.get(status, "error")
        if status == 0:
            passed += 1
            print(f"[OK] {path.stem}")
        else:
            failures += 1
            print(f"[FAIL] {path.stem}: status {status} ({label})")

    print(f"\n{passed} passed, {failures} failed")
    return 1 if failures else 0


def main() -> None:
    parser = argparse.ArgumentParser(description="Run all example configs")
    parser.add_argument("--config-dir", default=str(BASE_DIR / "config"), help="Directory of *.conf files")
    parser.add_argument("--out-dir", default=str(BASE_DIR / "results"), help="Directory for CSV output")
    parser.add_argument("--skip", action="append", default=[], help="Config stem to skip (repeatable)")
    parser.add_argument("--seed", type=int, help="Seed override for every run")
    args = parser.parse_args()

    sys.exit(sweep(Path(args.config_dir), Path(args.out_dir), set(args.skip), args.seed))


if __name__ == "__main__":
    main()
