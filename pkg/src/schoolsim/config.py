"""Flat ``key = value`` configuration files and the shipped calibration fixtures.

A config may start from a pattern fixture (``pattern = I`` .. ``IV``) or the
size-sweep fixture (``preset = sweep-default``); explicit keys then override
the overlay, and the result is validated.
"""

from __future__ import annotations

import dataclasses
import enum
import typing
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple

from .core import Pattern, SimParams, Strategy, ValidationError, validate_params

FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SimParams)}
_HINTS = typing.get_type_hints(SimParams)

FIXTURE_FILES = {
    Pattern.SPLIT_REUNION: "pattern_I.cfg",
    Pattern.SPLIT_TWO_GROUPS: "pattern_II.cfg",
    Pattern.SCATTERED: "pattern_III.cfg",
    Pattern.MAINTAIN_FORMATION: "pattern_IV.cfg",
}
SWEEP_FIXTURE = "sweep_default.cfg"
PRESET_NAMES = ("sweep-default",)


class ConfigError(ValidationError):
    def __init__(self, message: str, path=None, line: Optional[int] = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.line = line


def _convert(key: str, text: str):
    hint = _HINTS[key]
    optional = type(None) in typing.get_args(hint)
    if optional:
        hint = next(a for a in typing.get_args(hint) if a is not type(None))
        if text.lower() in ("none", ""):
            return None
    if hint is bool:
        low = text.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if hint is int:
        return int(text)
    if hint is float:
        return float(text)
    if hint is Strategy:
        return Strategy.parse(text)
    raise TypeError(f"unsupported field type for {key}")  # pragma: no cover


def parse_lines(text: str, path=None) -> Tuple[Dict[str, object], Dict[str, str]]:
    """Split config text into typed field values and overlay directives."""
    values: Dict[str, object] = {}
    directives: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in ("pattern", "preset"):
            directives[key] = value
            continue
        if key not in FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", path, lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", path, lineno)
        try:
            values[key] = _convert(key, value)
        except (ValueError, ValidationError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}", path, lineno) from None
    return values, directives


def _fixture_text(name: str) -> str:
    return resources.files("schoolsim.fixtures").joinpath(name).read_text(encoding="utf-8")


def fixture_params(name: "str | Pattern") -> SimParams:
    """Calibrated parameters for a pattern (``I``..``IV``) or ``sweep-default``."""
    if isinstance(name, str) and name.strip().lower() in PRESET_NAMES:
        fname = SWEEP_FIXTURE
    else:
        fname = FIXTURE_FILES[Pattern.parse(name)]
    values, _ = parse_lines(_fixture_text(fname), fname)
    return validate_params(dataclasses.replace(SimParams(), **values))


def overlay_label(directives: Dict[str, str]) -> Optional[str]:
    if "pattern" in directives and "preset" in directives:
        raise ConfigError("use either 'pattern' or 'preset', not both")
    if "pattern" in directives:
        value = directives["pattern"]
        if value.lower() == "custom":
            return None
        return Pattern.parse(value).roman
    if "preset" in directives:
        value = directives["preset"].lower()
        if value not in PRESET_NAMES:
            raise ConfigError(f"unknown preset {directives['preset']!r}")
        return value
    return None


def loads_config(text: str, base: Optional[SimParams] = None, path=None) -> SimParams:
    values, directives = parse_lines(text, path)
    label = overlay_label(directives)
    params = fixture_params(label) if label else (SimParams() if base is None else base)
    try:
        return validate_params(dataclasses.replace(params, **values))
    except ValidationError as exc:
        raise ConfigError(str(exc), path) from None


def load_config(path, base: Optional[SimParams] = None) -> SimParams:
    """Read a config file; ``base`` is used when the file names no overlay."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    return loads_config(text, base, path)


def config_label(path) -> Optional[str]:
    """Overlay label named inside a config file, if any."""
    _, directives = parse_lines(Path(path).read_text(encoding="utf-8"), path)
    return overlay_label(directives)


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps_config(params: SimParams) -> str:
    """Every field of ``params``, one per line; parses back to equal values."""
    lines = [f"{f.name} = {_format(getattr(params, f.name))}" for f in dataclasses.fields(SimParams)]
    return "\n".join(lines) + "\n"
