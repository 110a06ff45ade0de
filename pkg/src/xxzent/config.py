"""Run configuration for the sweep commands.

A config file is plain INI with four sections; every key is optional and
command-line flags override whatever the file says::

    [model]
    n = 4
    topology = cyclic-nn
    v_sign = 1
    v_abs = 1.0
    b_bar = 0, 0.5

    [sweep]
    delta = -2:2:41          # start:stop:count (inclusive) or a comma list
    t_grid = 1e-3:50:400:log # start:stop:count[:log|lin] or a comma list
    partitions = all-global  # all-global, all-reduced, or labels "ab-cd, ac-bd"

    [numeric]
    tol = 1e-6
    eps_neg = 1e-10
    t_min = 1e-3
    t_max = 50
    scan_points = 400

    [output]
    directory = out
    formats = csv
    raw_units = false
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .entanglement import EPS_NEG, Bipartition
from .errors import XXZError
from .limits import SCAN_POINTS, T_MAX, T_MIN, TOL, all_global_bipartitions, all_reduced_bipartitions
from .spinchain import MAX_SITES, TOPOLOGIES

FORMATS = ("csv", "json")


class ConfigError(XXZError, ValueError):
    """Invalid run configuration (exit code 2)."""


def parse_grid(text: str, log_default: bool = False) -> tuple[float, ...]:
    """``"a, b, c"`` or ``"start:stop:count[:log|lin]"`` -> tuple of floats."""
    text = str(text).strip()
    if not text:
        return ()
    try:
        if ":" in text:
            parts = [p.strip() for p in text.split(":")]
            if len(parts) not in (3, 4):
                raise ConfigError(f"range {text!r} needs start:stop:count[:log|lin]")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            spacing = parts[3].lower() if len(parts) == 4 else ("log" if log_default else "lin")
            if count < 1:
                raise ConfigError(f"range {text!r} has no points")
            if spacing == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError(f"log range {text!r} needs positive ends")
                vals = np.geomspace(start, stop, count)
            elif spacing == "lin":
                vals = np.linspace(start, stop, count)
            else:
                raise ConfigError(f"unknown spacing {spacing!r}")
            return tuple(float(v) for v in vals)
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse number list {text!r}: {exc}") from None


def _parse_bool(text) -> bool:
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class RunConfig:
    n: int = 3
    topology: str = "cyclic-nn"
    v_sign: int = 1
    v_abs: float = 1.0
    b_bars: tuple = (0.0,)
    deltas: tuple = (0.0,)
    t_grid: tuple = field(default_factory=lambda: tuple(float(t) for t in np.geomspace(T_MIN, T_MAX, 200)))
    partitions: tuple = ("all-global",)
    tol: float = TOL
    eps_neg: float = EPS_NEG
    t_min: float = T_MIN
    t_max: float = T_MAX
    scan_points: int = SCAN_POINTS
    directory: str = "xxzent-out"
    formats: tuple = ("csv",)
    raw_units: bool = False

    def validate(self) -> "RunConfig":
        if not isinstance(self.n, int) or not 2 <= self.n <= MAX_SITES:
            raise ConfigError(f"n must be an integer in [2, {MAX_SITES}], got {self.n!r}")
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"unknown topology {self.topology!r}")
        if self.topology == "single-pair" and self.n != 2:
            raise ConfigError("single-pair topology requires n = 2")
        if self.v_sign not in (1, -1):
            raise ConfigError("v_sign must be 1 or -1")
        if not self.v_abs > 0:
            raise ConfigError("v_abs must be positive")
        if not self.b_bars:
            raise ConfigError("b_bar list is empty")
        if any(b < 0 for b in self.b_bars):
            raise ConfigError("b_bar values must be non-negative")
        if not self.deltas:
            raise ConfigError("delta list is empty")
        if not all(np.isfinite(self.deltas)) or not all(np.isfinite(self.b_bars)):
            raise ConfigError("delta and b_bar values must be finite")
        t = np.asarray(self.t_grid, dtype=float)
        if not len(t):
            raise ConfigError("t grid is empty")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ConfigError("t grid must be positive and strictly increasing")
        if not self.partitions:
            raise ConfigError("no partitions given")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not self.eps_neg > 0:
            raise ConfigError("eps_neg must be positive")
        if not 0 < self.t_min < self.t_max:
            raise ConfigError("need 0 < t_min < t_max")
        if self.scan_points < 2:
            raise ConfigError("scan_points must be at least 2")
        bad = set(self.formats) - set(FORMATS)
        if bad or not self.formats:
            raise ConfigError(f"formats must be a non-empty subset of {FORMATS}")
        self.bipartitions()  # raises on bad labels
        return self

    def bipartitions(self) -> list[Bipartition]:
        out = []
        for p in self.partitions:
            if p == "all-global":
                out += all_global_bipartitions(self.n, self.topology)
            elif p == "all-reduced":
                out += all_reduced_bipartitions(self.n, self.topology)
            else:
                try:
                    out.append(Bipartition.parse(p, self.n))
                except XXZError as exc:
                    raise ConfigError(str(exc)) from None
        seen, uniq = set(), []
        for b in out:
            if b.label not in seen:
                seen.add(b.label)
                uniq.append(b)
        return uniq

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


_KEYS = {
    "model": {"n": int, "topology": str, "v_sign": int, "v_abs": float, "b_bar": "grid"},
    "sweep": {"delta": "grid", "t_grid": "tgrid", "partitions": "list"},
    "numeric": {"tol": float, "eps_neg": float, "t_min": float, "t_max": float, "scan_points": int},
    "output": {"directory": str, "formats": "list", "raw_units": "bool"},
}
_FIELD = {"b_bar": "b_bars", "delta": "deltas"}


def _convert(key: str, kind, raw: str):
    try:
        if kind == "grid":
            return parse_grid(raw)
        if kind == "tgrid":
            return parse_grid(raw, log_default=True)
        if kind == "list":
            return tuple(p.strip() for p in raw.split(",") if p.strip())
        if kind == "bool":
            return _parse_bool(raw)
        return kind(raw.strip())
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the INI file at ``path``, then ``overrides`` (non-None values)."""
    values = {}
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        for section in cp.sections():
            if section not in _KEYS:
                raise ConfigError(f"unknown section [{section}]")
            for key, raw in cp.items(section):
                if key not in _KEYS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                values[_FIELD.get(key, key)] = _convert(key, _KEYS[section][key], raw)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    try:
        cfg = replace(RunConfig(), **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()
