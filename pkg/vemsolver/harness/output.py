"""CSV tables, YAML summaries and the rendered text summary."""

import csv
import io
import logging
import math
from collections.abc import Callable, Mapping, Sequence
from pathlib import Path

import numpy as np
import yaml
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from vemsolver.config import get_settings
from vemsolver.errors import InputError, OutputError

logger = logging.getLogger(__name__)


# ─── CSV ──────────────────────────────────────────────────────


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), get_settings().FLOAT_FORMAT)
    return str(value)


def _parse_value(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def csv_text(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise InputError(f"row has {len(row)} fields, header has {len(columns)}")
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def emit_csv(path: str | Path, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    """Header first, floats at 17 significant digits, newline after every row."""
    path = Path(path)
    text = csv_text(columns, rows)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    logger.info("wrote %d rows to %s", len(rows), path)
    return path


def read_csv(
    path: str | Path, types: Mapping[str, Callable[[str], object]] | None = None
) -> tuple[list[str], list[list]]:
    """Header and rows of an ``emit_csv`` table.

    Fields are typed by content (bool, int, float, else str) unless ``types`` maps
    their column to a converter; a text column holding e.g. "007" needs ``str``
    there to read back unchanged. ``nan`` reads back as a float nan.
    """
    types = types or {}
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            columns = next(reader, [])
            parsers = [types.get(name, _parse_value) for name in columns]
            rows = [[parse(field) for parse, field in zip(parsers, row)] for row in reader]
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return columns, rows


# ─── Summaries ────────────────────────────────────────────────


def plain(value):
    """Convert numpy scalars/arrays and tuples into YAML-safe builtins."""
    if isinstance(value, Mapping):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def summary_path(csv_path: str | Path) -> Path:
    return Path(f"{csv_path}{get_settings().SUMMARY_SUFFIX}")


def write_summary(path: str | Path, summary: dict) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(plain(summary), f, default_flow_style=False, allow_unicode=True, sort_keys=False)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _environment() -> Environment:
    settings = get_settings()
    env = Environment(
        loader=FileSystemLoader(str(settings.TEMPLATE_DIR)),
        undefined=StrictUndefined,
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
    )
    env.filters["num"] = lambda value: format(value, ".6g") if isinstance(value, (int, float)) else value
    return env


def render_summary(summary: dict) -> str:
    template = _environment().get_template(get_settings().SUMMARY_TEMPLATE)
    return template.render(**plain(summary))
