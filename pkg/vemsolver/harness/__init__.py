from vemsolver.harness.cli import main, run
from vemsolver.harness.output import emit_csv, read_csv

__all__ = ["emit_csv", "main", "read_csv", "run"]
