"""INI configuration files.

Three sections are recognised, each optional:

``[params]``
    Model parameters, one key per :class:`~bribery.equilibrium.ModelParams`
    field (``pi_N``, ``delta_pi0``, ``M``, ...).
``[calibration]``
    Panel calibration, one key per :class:`~bribery.panelgen.Calibration`
    field. Tuple fields (``years``, ``year_effects``) are comma separated.
``[grid]``
    Oracle grid: ``t_lo``, ``t_hi``, ``F_lo``, ``F_hi``, ``steps_t``, ``steps_F``.

Unknown sections and unknown keys are errors. Keys are case sensitive.
"""

from __future__ import annotations

import configparser
import typing
from dataclasses import fields
from pathlib import Path

from .equilibrium import ModelParams
from .errors import ConfigError
from .oracle import GridSpec
from .panelgen import Calibration

__all__ = ["read_config", "load_params", "load_calibration", "load_grid", "SECTIONS"]

SECTIONS = {"params": ModelParams, "calibration": Calibration, "grid": GridSpec}


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    return cp


def read_config(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = _parser()
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"{path}: unknown section(s) {', '.join(unknown)}; "
                          f"expected {', '.join(SECTIONS)}")
    return cp


def _convert(raw: str, hint, key: str):
    origin = typing.get_origin(hint)
    try:
        if hint is int:
            return int(raw)
        if hint is float:
            return float(raw)
        if origin is tuple:
            inner = typing.get_args(hint)[0]
            return tuple(inner(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r}") from None
    raise ConfigError(f"key {key!r}: unsupported type {hint}")


def _section(cp: configparser.ConfigParser, section: str, base=None):
    cls = SECTIONS[section]
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    items = dict(cp.items(section)) if cp.has_section(section) else {}
    unknown = sorted(set(items) - known)
    if unknown:
        raise ConfigError(f"[{section}] unknown key(s): {', '.join(unknown)}")
    values = {k: _convert(v, hints[k], f"{section}.{k}") for k, v in items.items()}
    try:
        if base is not None:
            from dataclasses import replace
            return replace(base, **values)
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(f"[{section}] {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def load_params(path) -> ModelParams:
    cp = read_config(path)
    if not cp.has_section("params"):
        raise ConfigError(f"{path}: no [params] section")
    return _section(cp, "params")


def load_calibration(path, base: Calibration | None = None) -> Calibration:
    """Calibration from ``path``; keys not given keep the defaults (or ``base``)."""
    cp = read_config(path)
    cal = _section(cp, "calibration", base or Calibration())
    problems = cal.problems()
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    return cal


def load_grid(path) -> GridSpec | None:
    cp = read_config(path)
    if not cp.has_section("grid"):
        return None
    return _section(cp, "grid")
