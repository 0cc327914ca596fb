"""Flat ``key = value`` experiment configuration.

Grammar, one setting per line::

    # comment (also allowed after a value)
    n_spins = 8
    g = 5, 10, 15, 20          # comma list: several curves / bars
    axis1_values = 0:20:60     # start:stop:count, inclusive linspace

Keys are case-sensitive. Unknown keys, repeated keys and out-of-range values
are rejected with the offending line number.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..operators import MAX_SPINS


class ConfigError(ValueError):
    pass


def _float(text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise ConfigError(f"expected a finite number, got {text!r}")
    return value


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ConfigError(f"expected one of {', '.join(options)}; got {text!r}")
        return text
    return parse


def _ranged(parse, lo=None, hi=None, lo_open=False):
    def check(text):
        value = parse(text)
        if lo is not None and (value <= lo if lo_open else value < lo):
            raise ConfigError(f"value {value} must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and value > hi:
            raise ConfigError(f"value {value} must be <= {hi}")
        return value
    return check


def _values(text):
    """Comma list of numbers or ``start:stop:count``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:count, got {text!r}")
        start, stop, count = _float(parts[0]), _float(parts[1]), _int(parts[2])
        if count < 1:
            raise ConfigError("range count must be >= 1")
        values = list(np.linspace(start, stop, count))
    else:
        values = [_float(t) for t in text.split(",") if t.strip()]
    if not values:
        raise ConfigError("empty value list")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("values must be strictly increasing")
    return values


SWEEPABLE = ("g", "gamma", "n_spins", "v", "omega")

# key -> (parser for one item, list allowed)
KEYS = {
    "n_spins": (_ranged(_int, 1, MAX_SPINS), True),
    "coupling": (_choice("nn", "lr"), True),
    "lr_exponent": (_ranged(_float, 0.0), False),
    "g": (_ranged(_float, 0.0), True),
    "gamma": (_ranged(_float, -1.0, 1.0), True),
    "b": (_float, False),
    "drive": (_choice("linear", "sin", "none"), True),
    "v": (_ranged(_float, 0.0), True),
    "omega": (_ranged(_float, 0.0, lo_open=True), True),
    "tau_max": (_ranged(_float, 0.0, lo_open=True), False),
    "n_samples": (_ranged(_int, 2), False),
    "rel_tol": (_ranged(_float, 0.0, lo_open=True), False),
    "dt_initial": (_ranged(_float, 0.0, lo_open=True), False),
    "max_halvings": (_ranged(_int, 0), False),
    "axis1": (_choice(*SWEEPABLE), False),
    "axis1_values": (_values, False),
    "axis2": (_choice(*SWEEPABLE), False),
    "axis2_values": (_values, False),
    "n_values": (_values, False),
    "n_jobs": (_ranged(_int, 1), False),
    "out": (str, False),
}

DEFAULTS = {
    "n_spins": 8,
    "coupling": "nn",
    "lr_exponent": 1.0,
    "g": 10.0,
    "gamma": 0.5,
    "b": 1.0,
    "drive": "linear",
    "v": 10.0,
    "omega": 4.0,
    "tau_max": 20.0,
    "rel_tol": 1e-8,
    "dt_initial": 1e-3,
    "max_halvings": 12,
    "n_jobs": 1,
    "out": ".",
}


def parse_value(key: str, text: str):
    if key not in KEYS:
        raise ConfigError(f"unknown key {key!r}")
    parse, list_ok = KEYS[key]
    text = text.strip()
    if not text:
        raise ConfigError(f"missing value for {key!r}")
    if parse in (_values, str):
        return parse(text)
    items = [t.strip() for t in text.split(",")]
    if len(items) > 1:
        if not list_ok:
            raise ConfigError(f"{key!r} takes a single value")
        if any(not t for t in items):
            raise ConfigError(f"empty item in list for {key!r}")
        values = [parse(t) for t in items]
        if len(set(values)) != len(values):
            raise ConfigError(f"repeated values in list for {key!r}")
        return values
    return parse(items[0])


def parse_text(text: str, source: str = "<config>") -> dict:
    settings = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in settings:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            settings[key] = parse_value(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    return settings


def parse_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read(), source=str(path))


@dataclass
class ExperimentConfig:
    """Resolved settings: defaults, then preset, then config file, then flags."""

    values: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, *layers: dict) -> "ExperimentConfig":
        merged = dict(DEFAULTS)
        for layer in layers:
            merged.update(layer)
        return cls(merged)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def describe(self) -> str:
        """Single-line ``key=value`` rendering in sorted key order (no output path)."""
        parts = []
        for key in sorted(self.values):
            if key == "out":
                continue
            value = self.values[key]
            if isinstance(value, list):
                text = ",".join(format_number(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                text = format_number(value)
            else:
                text = str(value)
            parts.append(f"{key}={text}")
        return " ".join(parts)


def format_number(x) -> str:
    """12 significant digits, locale independent, without negative zero."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return f"{x:.12g}"
