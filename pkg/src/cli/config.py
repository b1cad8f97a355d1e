# src/cli/config.py

"""
config.py – Run Configuration for the holoflow CLI (HoloFlow)
----------------------------------------------------------------------
Builds a `RunConfig` from, in increasing precedence:

  1. dataclass defaults (window [−7, 8] × [−1, 30]i)
  2. environment (.env via python-dotenv): HOLOFLOW_THREADS
  3. a JSON document given with --config
  4. command-line flags

and resolves the function settings to a `HoloFunction`, computing
α for xi-approx so that max |h| over the window is 1 when no α is given.
"""

# ───────────────────────────────────────────────────────────────────────────────
# 📦 Imports
# ───────────────────────────────────────────────────────────────────────────────
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, List, Mapping, Optional

import numpy as np
from dotenv import load_dotenv

from src.catalog.holo_function import (
    HoloFunction,
    auto_scale,
    build_xi_approx,
    cosh_shift,
    generic_polynomial,
    linear,
)
from src.catalog.zero_table import PROJECT_ROOT, ZeroTable, default_zero_table, load_zero_table
from src.errors import ConfigError
from src.flows.flow_engine import FlowKind
from src.flows.integrator import Tolerance

logger = logging.getLogger("holoflow.cli")

KIND_ALIASES = {
    "cosh": "cosh",
    "cosh-shift": "cosh",
    "xi-approx": "xi-approx",
    "xi": "xi-approx",
    "linear": "linear",
    "polynomial": "polynomial",
    "generic-polynomial": "polynomial",
}
SUITES = ("geometry", "hamiltonian", "flows", "all")
COMPLEX_FIELDS = ("z0", "p0", "dz0", "dp0")


def env_workers(env_file: Optional[Path] = None) -> int:
    """Worker cap from HOLOFLOW_THREADS (default 1)."""
    load_dotenv(env_file or (PROJECT_ROOT / ".env"), override=False)
    raw = os.getenv("HOLOFLOW_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"❌ HOLOFLOW_THREADS must be an integer, got {raw!r}")


def _to_complex(value: Any) -> complex:
    """Accept 1.5, "1+2j" or [re, im]."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"❌ complex value as [re, im] needs two entries, got {value}")
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(value)
    except (TypeError, ValueError):
        raise ConfigError(f"❌ cannot read {value!r} as a complex number")


def _complex_json(value: complex) -> List[float]:
    return [value.real, value.imag]


# ───────────────────────────────────────────────────────────────────────────────
# 🧾 RunConfig
# ───────────────────────────────────────────────────────────────────────────────
@dataclass
class RunConfig:
    # function
    kind: str = "xi-approx"
    m: int = 4
    alpha: Optional[float] = None
    zero_table: Optional[str] = None
    coeffs: List[float] = field(default_factory=lambda: [1.0, 0.0])
    slope: float = 1.0
    # window and seed lattice
    re_min: float = -7.0
    re_max: float = 8.0
    im_min: float = -1.0
    im_max: float = 30.0
    density: int = 8
    seeds: Optional[List[List[float]]] = None
    # integration
    rtol: float = 1e-10
    atol: float = 1e-12
    flow: str = "holomorphic"
    theta: float = 0.0
    span: float = 10.0
    escape_radius: Optional[float] = None
    horizon: float = 1e3
    separatrix: bool = True
    # surface
    z0: complex = complex(2.0, 5.0)
    tau1: List[float] = field(default_factory=lambda: [-1.0, 1.0, 9])
    tau2: List[float] = field(default_factory=lambda: [-3.0, 3.0, 13])
    max_jump: float = 5.0
    # orbit study
    p0: List[complex] = field(default_factory=lambda: [1.0 + 0j])
    dz0: List[complex] = field(default_factory=list)
    dp0: List[complex] = field(default_factory=lambda: [1.0 + 0j, 1j])
    samples: int = 512
    # verify
    suite: str = "all"
    draws: int = 20
    # run
    output_dir: str = "outputs"
    seed: int = 0
    workers: int = 1

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(self.rtol, self.atol)

    @property
    def re_range(self):
        return (self.re_min, self.re_max)

    @property
    def im_range(self):
        return (self.im_min, self.im_max)

    @property
    def out_path(self) -> Path:
        return Path(self.output_dir)

    def lattice_axes(self):
        """(τ₁ values, τ₂ values) from [min, max, count] triples."""
        axes = []
        for name in ("tau1", "tau2"):
            lo, hi, count = getattr(self, name)
            axes.append(np.linspace(float(lo), float(hi), int(count)))
        return tuple(axes)

    # ───────────────────────────────────────────────────────────────────────
    # Merging
    # ───────────────────────────────────────────────────────────────────────
    def update(self, values: Mapping[str, Any]) -> "RunConfig":
        """Apply non-None values; unknown keys raise ConfigError."""
        known = {f.name for f in fields(self)}
        for key, value in values.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"❌ unknown configuration key {key!r}")
            if value is None:
                continue
            if key == "z0":
                value = _to_complex(value)
            elif key in COMPLEX_FIELDS:
                value = [_to_complex(v) for v in value]
            setattr(self, key, value)
        return self

    def to_dict(self) -> dict:
        data = asdict(self)
        data["z0"] = _complex_json(self.z0)
        for key in ("p0", "dz0", "dp0"):
            data[key] = [_complex_json(complex(v)) for v in getattr(self, key)]
        return data

    # ───────────────────────────────────────────────────────────────────────
    # Validation
    # ───────────────────────────────────────────────────────────────────────
    def validate(self) -> "RunConfig":
        """
        Check the configuration before any numerical work.

        Raises:
        -------
        ConfigError
            On the first violated constraint.
        """
        if self.kind not in KIND_ALIASES:
            raise ConfigError(f"❌ unknown function kind {self.kind!r}")
        self.kind = KIND_ALIASES[self.kind]
        if self.kind == "xi-approx" and int(self.m) < 1:
            raise ConfigError(f"❌ m must be ≥ 1 for xi-approx, got {self.m}")
        if self.alpha is not None and not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError(f"❌ alpha must be a positive real, got {self.alpha}")
        if self.kind == "polynomial" and not self.coeffs:
            raise ConfigError("❌ polynomial kind needs at least one coefficient")

        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ConfigError(
                f"❌ empty window [{self.re_min}, {self.re_max}] × [{self.im_min}, {self.im_max}]"
            )
        if int(self.density) < 2:
            raise ConfigError(f"❌ density must be ≥ 2 per axis, got {self.density}")
        if self.seeds is not None:
            try:
                self.seeds = [[float(s[0]), float(s[1])] for s in self.seeds]
            except (TypeError, ValueError, IndexError):
                raise ConfigError("❌ seeds must be a list of [re, im] pairs")

        try:
            Tolerance(self.rtol, self.atol)
        except ValueError as exc:
            raise ConfigError(f"❌ invalid tolerances: {exc}")
        try:
            FlowKind(self.flow)
        except ValueError:
            raise ConfigError(f"❌ unknown flow {self.flow!r}")
        if not (np.isfinite(self.span) and self.span > 0):
            raise ConfigError(f"❌ span must be positive, got {self.span}")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigError(f"❌ horizon must be positive, got {self.horizon}")

        for name in ("tau1", "tau2"):
            triple = getattr(self, name)
            if len(triple) != 3 or int(triple[2]) < 1 or float(triple[0]) > float(triple[1]):
                raise ConfigError(f"❌ {name} must be [min, max, count] with min ≤ max, count ≥ 1")
        if self.max_jump <= 0:
            raise ConfigError(f"❌ max_jump must be positive, got {self.max_jump}")
        if not self.p0 or not self.dp0:
            raise ConfigError("❌ p0 and dp0 need at least one value each")
        if int(self.samples) < 8:
            raise ConfigError(f"❌ samples must be ≥ 8, got {self.samples}")
        if self.suite not in SUITES:
            raise ConfigError(f"❌ unknown suite {self.suite!r}; expected one of {SUITES}")
        if int(self.draws) < 1:
            raise ConfigError(f"❌ draws must be ≥ 1, got {self.draws}")
        if int(self.workers) < 1:
            raise ConfigError(f"❌ workers must be ≥ 1, got {self.workers}")
        return self


def load_config_file(path) -> dict:
    """Read a JSON configuration document."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"❌ config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"❌ config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"❌ config file {path} must hold a JSON object")
    return data


def build_config(file_values: Optional[Mapping] = None, flag_values: Optional[Mapping] = None) -> RunConfig:
    config = RunConfig(workers=env_workers())
    config.update(file_values or {})
    config.update(flag_values or {})
    return config.validate()


# ───────────────────────────────────────────────────────────────────────────────
# 🧮 Function resolution
# ───────────────────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class ResolvedFunction:
    h: HoloFunction
    alpha: float
    table: Optional[ZeroTable] = None

    def metadata(self) -> dict:
        meta = {"label": self.h.label, "kind": self.h.kind.value, "alpha": self.alpha}
        if self.table is not None:
            meta["zero_table"] = {"source": self.table.source, "count": len(self.table)}
        return meta


def resolve_function(config: RunConfig) -> ResolvedFunction:
    """
    Build the configured HoloFunction.

    Raises:
    -------
    ParseError, MonotonicityError, FileNotFoundError, InsufficientZeros
        From loading the zero table (the CLI maps these to exit code 2).
    """
    if config.kind == "cosh":
        alpha = config.alpha or 1.0
        return ResolvedFunction(cosh_shift(alpha), alpha)
    if config.kind == "linear":
        return ResolvedFunction(linear(config.slope), 1.0)
    if config.kind == "polynomial":
        alpha = config.alpha or 1.0
        return ResolvedFunction(generic_polynomial(config.coeffs, alpha), alpha)

    table = load_zero_table(config.zero_table) if config.zero_table else default_zero_table()
    alpha = config.alpha
    if alpha is None:
        alpha = auto_scale(build_xi_approx(table, config.m), config.re_range, config.im_range)
        logger.info(f"📏 auto α = {alpha:.6e} for m={config.m} over the window")
    return ResolvedFunction(build_xi_approx(table, config.m, alpha), float(alpha), table)
