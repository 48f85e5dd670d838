"""Run configuration: defaults, ``key = value`` files and command-line overrides.

Config file schema (one ``key = value`` per line, ``#`` starts a comment,
lists are comma-separated)::

    n_spins                  = 4
    j_coupling               = 1.0
    field_grid               = 0.2, 0.6, 1.0, 1.4, 1.8
    depth                    = 2
    parameter_mode           = per_gate          # or per_layer
    order_parameter_variant  = exclude_diagonal  # or include_diagonal
    shots                    = 4096
    restarts                 = 4
    max_evaluations          = 2000
    seed                     = 0
    noise_p1                 = 0.002
    noise_p2                 = 0.02
    noise_p_readout          = 0.03
    critical_window          = 0.8, 1.2
    workers                  = 1
    output_dir               = run               # default: $TFIM_BENCH_OUTPUT_DIR or ./run
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .ansatz import PARAMETER_MODES, OptimizerConfig
from .errors import MissingInputError, ValidationError
from .exact import ORDER_VARIANTS
from .spin_model import MAX_SPINS
from .statevector import NoiseSpec

OUTPUT_DIR_ENV = "TFIM_BENCH_OUTPUT_DIR"


def _default_output_dir():
    return os.environ.get(OUTPUT_DIR_ENV, "run")


@dataclass(frozen=True)
class RunConfig:
    n_spins: int = 4
    j_coupling: float = 1.0
    field_grid: tuple = (0.2, 0.6, 1.0, 1.4, 1.8)
    depth: int = 2
    parameter_mode: str = "per_gate"
    order_parameter_variant: str = "exclude_diagonal"
    shots: int = 4096
    restarts: int = 4
    max_evaluations: int = 2000
    seed: int = 0
    noise_p1: float = 0.002
    noise_p2: float = 0.02
    noise_p_readout: float = 0.03
    critical_window: tuple = (0.8, 1.2)
    workers: int = 1
    output_dir: str = dataclasses.field(default_factory=_default_output_dir)

    def validate(self) -> "RunConfig":
        if not 2 <= self.n_spins <= MAX_SPINS:
            raise ValidationError(f"n_spins must be in [2, {MAX_SPINS}], got {self.n_spins}")
        if not (math.isfinite(self.j_coupling) and self.j_coupling > 0):
            raise ValidationError(f"j_coupling must be finite and > 0, got {self.j_coupling}")
        grid = self.field_grid
        if not grid:
            raise ValidationError("field_grid is empty")
        if any(not math.isfinite(h) or h < 0 for h in grid):
            raise ValidationError(f"field_grid values must be finite and >= 0: {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError(f"field_grid must be strictly ascending: {grid}")
        if self.depth < 1:
            raise ValidationError(f"depth must be >= 1, got {self.depth}")
        if self.parameter_mode not in PARAMETER_MODES:
            raise ValidationError(f"parameter_mode must be one of {PARAMETER_MODES}")
        if self.order_parameter_variant not in ORDER_VARIANTS:
            raise ValidationError(f"order_parameter_variant must be one of {ORDER_VARIANTS}")
        if self.shots < 1:
            raise ValidationError(f"shots must be >= 1, got {self.shots}")
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_evaluations < 1:
            raise ValidationError(f"max_evaluations must be >= 1, got {self.max_evaluations}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        self.noise  # NoiseSpec validates the probabilities
        lo, hi = self.critical_window
        if hi < lo:
            raise ValidationError(f"critical_window must be [lo, hi] with lo <= hi, got {self.critical_window}")
        return self

    @property
    def noise(self) -> NoiseSpec:
        return NoiseSpec(self.noise_p1, self.noise_p2, self.noise_p_readout)

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(max_evaluations=self.max_evaluations, restarts=self.restarts)

    @property
    def run_dir(self) -> Path:
        return Path(self.output_dir)

    def canonical_lines(self):
        """``key=value`` lines for every setting except ``output_dir``."""
        lines = []
        for f in dataclasses.fields(self):
            if f.name == "output_dir":
                continue
            lines.append(f"{f.name}={format_value(getattr(self, f.name))}")
        return lines

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.canonical_lines()).encode()).hexdigest()


KEYS = tuple(f.name for f in dataclasses.fields(RunConfig))
_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def format_value(v):
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_value(key, text):
    if key not in _TYPES:
        raise ValidationError(f"unknown config key {key!r}")
    kind = _TYPES[key]
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "tuple":
            items = tuple(float(x) for x in text.replace(" ", "").split(",") if x)
            if key == "critical_window" and len(items) != 2:
                raise ValidationError("critical_window needs exactly two values")
            return items
    except ValueError as exc:
        raise ValidationError(f"bad value for {key}: {text!r} ({exc})") from None
    return text


def read_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"config file not found: {path}")
    out = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = parse_value(key, value)
    return out


def load_config(path=None, overrides=None) -> RunConfig:
    """Defaults, then the config file, then ``overrides`` (raw strings or typed values)."""
    values = {}
    if path is not None:
        values.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        values[key] = parse_value(key, value) if isinstance(value, str) else value
    unknown = set(values) - set(KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values).validate()
