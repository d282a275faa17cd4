"""Line-oriented ``key = value`` run configuration.

``[section]`` headers prefix the keys that follow (``[solver]`` then
``rel_tol = 1e-9`` gives ``solver.rel_tol``); dotted keys may also be written
out in full. ``#`` starts a comment. Lists are comma separated; a numeric
range may be written ``linspace(start, stop, num)``.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .potentials import (
    Harmonic,
    IonTrap,
    SquareWell,
    SquareWellDelta,
    SquareWellFiniteBarrier,
    UnitSystem,
)

log = logging.getLogger(__name__)

COMMANDS = ("spectrum", "cycle", "tls", "classical-limit", "sweep-fig2", "sweep-fig3",
            "optimize-g", "audit")

_LINSPACE = re.compile(r"^linspace\(\s*([^,]+),\s*([^,]+),\s*([^,)]+)\)$")

SHAPES = {
    "square_well": (SquareWell, ("L",)),
    "square_well_delta": (SquareWellDelta, ("L", "g")),
    "square_well_barrier": (SquareWellFiniteBarrier, ("L", "V0", "eps")),
    "harmonic": (Harmonic, ("omega",)),
    "ion_trap": (IonTrap, ("omega", "kappa", "a")),
}


def parse_text(text: str) -> dict:
    """Flat ``{dotted.key: raw string}`` mapping; duplicate keys are rejected."""
    out = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise ConfigError(f"line {lineno}: empty section header")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        full = f"{section}.{key}" if section and key != "command" else key
        if full in out:
            raise ConfigError(f"line {lineno}: duplicate key {full!r}")
        out[full] = value
    return out


def _number(key, raw):
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {raw!r}")
    return v


@dataclass
class RunConfig:
    """Parsed configuration with typed accessors that record what was read."""

    command: str
    values: dict
    defaults_used: dict = field(default_factory=dict)
    accessed: set = field(default_factory=set, repr=False)

    def unused(self) -> list:
        return sorted(set(self.values) - self.accessed)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        vals = parse_text(text)
        cmd = vals.pop("command", None)
        if cmd is None:
            raise ConfigError("missing 'command'")
        if cmd not in COMMANDS:
            raise ConfigError(f"command: unknown {cmd!r}; choose from {', '.join(COMMANDS)}")
        return cls(cmd, vals)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def has(self, key):
        return key in self.values

    def _raw(self, key):
        # every typed accessor goes through here, so unread keys can be reported
        self.accessed.add(key)
        return self.values.get(key)

    def _default(self, key, default, notice=False):
        self.defaults_used[key] = default
        if notice:
            log.warning("%s not given; using default %r", key, default)
        return default

    def number(self, key, default=None, *, notice=False, positive=False):
        if self._raw(key) is None:
            if default is None:
                raise ConfigError(f"{key}: required")
            return self._default(key, default, notice)
        v = _number(key, self.values[key])
        if positive and not v > 0:
            raise ConfigError(f"{key}: must be positive, got {v}")
        return v

    def integer(self, key, default=None):
        if self._raw(key) is None:
            if default is None:
                raise ConfigError(f"{key}: required")
            return self._default(key, default)
        v = _number(key, self.values[key])
        if v != int(v):
            raise ConfigError(f"{key}: expected an integer, got {self.values[key]!r}")
        return int(v)

    def text(self, key, default=None, choices=None, *, notice=False):
        if self._raw(key) is None:
            if default is None:
                raise ConfigError(f"{key}: required")
            v = self._default(key, default, notice)
        else:
            v = self.values[key]
        if choices is not None and v not in choices:
            raise ConfigError(f"{key}: {v!r} not in {choices}")
        return v

    def flag(self, key, default=False):
        if self._raw(key) is None:
            return self._default(key, default)
        v = self.values[key].lower()
        if v not in ("true", "false", "yes", "no", "1", "0"):
            raise ConfigError(f"{key}: expected true/false, got {self.values[key]!r}")
        return v in ("true", "yes", "1")

    def numbers(self, key, default=None):
        if self._raw(key) is None:
            if default is None:
                raise ConfigError(f"{key}: required")
            return list(self._default(key, default))
        raw = self.values[key].strip()
        m = _LINSPACE.match(raw)
        if m:
            a, b = _number(key, m.group(1)), _number(key, m.group(2))
            n = _number(key, m.group(3))
            if n < 1 or n != int(n):
                raise ConfigError(f"{key}: linspace count must be a positive integer")
            return [float(x) for x in np.linspace(a, b, int(n))]
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if not items:
            raise ConfigError(f"{key}: empty list")
        return [_number(key, s) for s in items]

    # -- composite values -------------------------------------------------

    def units(self, prefix="units") -> UnitSystem:
        system = self.text(f"{prefix}.system", "natural", ("natural", "si", "custom"))
        if system == "natural":
            return UnitSystem()
        if system == "si":
            return UnitSystem.si(self.number(f"{prefix}.mass_amu", 174.0, positive=True))
        return UnitSystem(self.number(f"{prefix}.hbar", positive=True),
                          self.number(f"{prefix}.mass", positive=True))

    def potential(self, prefix, units=None):
        shape = self.text(f"{prefix}.shape", choices=tuple(SHAPES))
        cls, params = SHAPES[shape]
        kw = {p: self.number(f"{prefix}.{p}") for p in params}
        try:
            return cls(**kw, units=units or self.units())
        except ValueError as exc:
            raise ConfigError(f"{prefix}: {exc}") from exc

    def temperatures(self, prefix="bath"):
        T_h = self.number(f"{prefix}.T_h", positive=True)
        T_c = self.number(f"{prefix}.T_c", positive=True)
        if not T_h > T_c:
            raise ConfigError(f"{prefix}: T_h must exceed T_c (got T_h={T_h}, T_c={T_c})")
        return T_h, T_c

    def resolved(self) -> dict:
        """Every value read plus every default applied, for the metadata sidecar."""
        out = dict(self.values)
        for k, v in self.defaults_used.items():
            out.setdefault(k, v)
        return {"command": self.command, **dict(sorted(out.items()))}
