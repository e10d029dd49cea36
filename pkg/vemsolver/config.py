"""Harness settings and `key = value` run-config loading."""

import io
import logging
from functools import lru_cache
from pathlib import Path

from dotenv.parser import parse_stream
from pydantic import ValidationError

from vemsolver.errors import ConfigError
from vemsolver.schemas import RunConfig

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent.parent


class Settings:
    # Logging
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    # Output
    FLOAT_FORMAT: str = ".17g"
    SUMMARY_SUFFIX: str = ".summary.yaml"
    TEMPLATE_DIR: Path = Path(__file__).resolve().parent / "harness" / "templates"
    SUMMARY_TEMPLATE: str = "summary.txt.j2"

    # Example configs
    CONFIG_DIR: Path = BASE_DIR / "config"


@lru_cache
def get_settings() -> Settings:
    return Settings()


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Bindings of a `key = value` file; `#` starts a comment, blank lines are skipped."""
    values: dict[str, str] = {}
    for binding in parse_stream(io.StringIO(text)):
        if binding.error:
            line = binding.original.line
            raise ConfigError(f"{source}:{line}: cannot parse {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        if binding.value is None:
            raise ConfigError(f"{source}:{binding.original.line}: key {binding.key!r} has no value")
        if binding.key in values:
            raise ConfigError(f"{source}:{binding.original.line}: duplicate key {binding.key!r}")
        values[binding.key] = binding.value
    return values


def _describe(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(item) for item in error["loc"]) or "config"
        parts.append(f"{where}: {error['msg']}")
    return "; ".join(parts)


def build_run_config(values: dict, source: str = "<config>") -> RunConfig:
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {_describe(exc)}") from exc


def load_run_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a run config; ``overrides`` (e.g. --out, --seed) win over the file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    values: dict = parse_config_text(text, str(path))
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    config = build_run_config(values, str(path))
    logger.info("loaded %s config from %s", config.command, path)
    return config
