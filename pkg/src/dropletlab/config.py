"""Experiment configuration files.

Configs are TOML with one table per concern::

    seed = 0

    [profile]
    kind = "quadratic"          # or "power_law"
    hessian = [[10.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 10.0]]
    # rho1 = 1e6                # power_law only
    # exponent = 4.0            # power_law only
    # rho_max = 40.0            # optional, defaults to max deficit + 1
    density = "periodic"        # or "local"

    [droplets]
    masses = [0.01, 0.01]
    positions = [[0.05, 0.0, 0.0], [-0.05, 0.0, 0.0]]   # ansatz only

    [minimize]
    restarts = 32

    [ansatz]
    eta = 1e-3
    delta = "rule"              # or a number
    quad_order = 16

    [sweep]
    eta_values = [1e-2, 1e-3, 1e-4, 1e-5]
    mode = "fixed_delta_rule"   # or "optimize_delta"

Unknown keys are errors.  Errors carry the offending ``[table].key`` and its
line number.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .profiles import ConfinementProfile

SECTIONS = {
    "profile": {"kind", "hessian", "rho1", "exponent", "rho_max", "density"},
    "droplets": {"masses", "positions"},
    "minimize": {"restarts"},
    "ansatz": {"eta", "delta", "quad_order"},
    "sweep": {"eta_values", "mode", "restarts", "quad_order"},
}
TOP_LEVEL = {"seed"}


class ConfigError(ValueError):
    """Invalid configuration; ``str(err)`` names the field and line."""


def _locate(text: str, section: str | None, key: str) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        header = re.match(r"\[\s*([A-Za-z_][\w-]*)\s*\]", stripped)
        if header:
            current = header.group(1)
            continue
        if current == section and re.match(rf"{re.escape(key)}\s*=", stripped):
            return lineno
    return None


@dataclass
class ExperimentConfig:
    """Parsed configuration: raw tables plus the source text for error lines."""

    data: dict
    source: str = field(default="", repr=False)
    path: str | None = None

    @classmethod
    def from_text(cls, text: str, path: str | None = None) -> ExperimentConfig:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"{path or '<config>'}: parse error: {err}") from err
        cfg = cls(data, text, path)
        cfg._check_keys()
        return cfg

    @classmethod
    def from_file(cls, path) -> ExperimentConfig:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {p}: {err}") from err
        return cls.from_text(text, str(p))

    def error(self, section: str | None, key: str, message: str) -> ConfigError:
        where = f"[{section}].{key}" if section else key
        line = _locate(self.source, section, key)
        prefix = f"{self.path or '<config>'}"
        if line is not None:
            prefix += f":{line}"
        return ConfigError(f"{prefix}: {where}: {message}")

    def _check_keys(self):
        for key, value in self.data.items():
            if isinstance(value, dict):
                if key not in SECTIONS:
                    raise ConfigError(f"{self.path or '<config>'}: unknown table [{key}]")
                for sub in value:
                    if sub not in SECTIONS[key]:
                        raise self.error(key, sub, "unknown key")
            elif key not in TOP_LEVEL:
                raise self.error(None, key, "unknown key")

    def get(self, section: str | None, key: str, kind, default=...):
        table = self.data if section is None else self.data.get(section, {})
        if key not in table:
            if default is ...:
                raise self.error(section, key, "missing required field")
            return default
        value = table[key]
        try:
            return _coerce(value, kind)
        except (TypeError, ValueError) as err:
            raise self.error(section, key, str(err)) from err

    @property
    def seed(self) -> int:
        return self.get(None, "seed", int, 0)

    def profile(self) -> ConfinementProfile:
        kind = self.get("profile", "kind", str)
        density = self.get("profile", "density", str, "periodic")
        rho_max = self.get("profile", "rho_max", float, None)
        try:
            if kind == "quadratic":
                H = self.get("profile", "hessian", "matrix3")
                return ConfinementProfile.quadratic(H, rho_max=rho_max, density_mode=density)
            if kind == "power_law":
                return ConfinementProfile.power_law(
                    self.get("profile", "rho1", float),
                    self.get("profile", "exponent", float),
                    rho_max=rho_max,
                    density_mode=density,
                )
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise self.error("profile", "kind", str(err)) from err
        raise self.error("profile", "kind", f"expected 'quadratic' or 'power_law', got {kind!r}")

    def masses(self) -> list[float]:
        masses = self.get("droplets", "masses", "floats")
        if not masses or any(not m > 0 for m in masses):
            raise self.error("droplets", "masses", "masses must be positive")
        return masses

    def canonical(self) -> str:
        return dump_toml(self.data)


def _coerce(value, kind):
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ValueError("value must be finite")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise TypeError(f"expected a string, got {value!r}")
        return value
    if kind == "floats":
        if not isinstance(value, list):
            raise TypeError("expected a list of numbers")
        return [_coerce(v, float) for v in value]
    if kind == "matrix3":
        rows = [_coerce(r, "floats") for r in value] if isinstance(value, list) else None
        if rows is None or len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise TypeError("expected a 3x3 list of numbers")
        return np.array(rows)
    if kind == "points":
        if not isinstance(value, list):
            raise TypeError("expected a list of [x, y, z] points")
        pts = [_coerce(r, "floats") for r in value]
        if any(len(p) != 3 for p in pts):
            raise TypeError("each point needs three coordinates")
        return np.array(pts).reshape(-1, 3)
    raise AssertionError(kind)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("nan" if v != v else ("inf" if v > 0 else "-inf"))
    if isinstance(v, str):
        # JSON string escapes are valid TOML except surrogate pairs and raw DEL
        return json.dumps(v, ensure_ascii=False).replace("\x7f", "\\u007f")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_format_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def dump_toml(data: dict) -> str:
    """Canonical TOML: top-level scalars first, then tables, keys sorted."""
    lines = [f"{k} = {_format_value(v)}" for k, v in sorted(data.items()) if not isinstance(v, dict)]
    for name, table in sorted((k, v) for k, v in data.items() if isinstance(v, dict)):
        if lines:
            lines.append("")
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {_format_value(v)}" for k, v in sorted(table.items()))
    return "\n".join(lines) + "\n"
