"""
Run configuration files.

Flat ``key = value`` lines; ``#`` starts a comment. Every key is optional and
defaults to the RunConfig default.
"""

from __future__ import annotations

import os
import re
from collections.abc import Callable
from dataclasses import replace
from enum import Enum
from pathlib import Path
from typing import Any, TypeVar

from .cases import case_names
from .errors import ConfigError
from .models import CornerScheme, OutputFormat, RemapKind, RunConfig

OUT_DIR_ENV = "HYDRO_OUT_DIR"
LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")

E = TypeVar("E", bound=Enum)


def _enum(kind: type[E]) -> Callable[[str], E]:
    def convert(value: str) -> E:
        for member in kind:
            if member.value.lower() == value.lower() or member.name.lower() == value.lower():
                return member
        valid = ", ".join(m.value for m in kind)
        raise ValueError(f"invalid value '{value}', expected one of: {valid}")

    return convert


def _bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"invalid boolean '{value}'")


def _resolution(value: str) -> tuple[int, int]:
    match = re.fullmatch(r"(\d+)\s*[x,]\s*(\d+)", value)
    if not match:
        raise ValueError(f"invalid resolution '{value}', expected NXxNY")
    return int(match.group(1)), int(match.group(2))


def _case(value: str) -> str:
    if value not in case_names():
        raise ValueError(f"unknown case '{value}', expected one of: {', '.join(case_names())}")
    return value


def _log_level(value: str) -> str:
    if value.upper() not in LOG_LEVELS:
        raise ValueError(f"invalid log level '{value}', expected one of: {', '.join(LOG_LEVELS)}")
    return value.upper()


_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "case": _case,
    "scheme": _enum(RemapKind),
    "face_order": int,
    "corner_scheme": _enum(CornerScheme),
    "interface_degrade": _bool,
    "cfl": float,
    "divisor": int,
    "resolution": _resolution,
    "end_time": float,
    "output_dir": str,
    "output_every": int,
    "output_format": _enum(OutputFormat),
    "seed": int,
    "a1": float,
    "a2": float,
    "log_level": _log_level,
}


def parse_config(text: str) -> RunConfig:
    """
    Parse configuration text.

    Raises:
        ConfigError: Malformed line, unknown or duplicate key, invalid value
    """
    values: dict[str, Any] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown key '{key}', expected one of: {', '.join(_CONVERTERS)}", line=line_no)
        if key in values:
            raise ConfigError(f"duplicate key '{key}'", line=line_no)
        if not value:
            raise ConfigError(f"missing value for '{key}'", line=line_no)
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as e:
            raise ConfigError(f"{key}: {e}", line=line_no) from e
    try:
        return RunConfig(**values)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def load_config(path: str | Path) -> RunConfig:
    """
    Read a configuration file and apply the ``HYDRO_OUT_DIR`` override.

    Raises:
        OSError: The file cannot be read
        ConfigError: Invalid content
    """
    config = parse_config(Path(path).read_text(encoding="utf-8"))
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        config = replace(config, output_dir=out_dir)
    return config
