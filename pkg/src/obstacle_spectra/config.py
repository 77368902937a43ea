"""Experiment configuration files (TOML)."""
from __future__ import annotations

import hashlib
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .constants import ConstantsProfile, analytic_2d
from .geometry import GeometryError, Shape

OUT_ENV = "OBSTACLE_SPECTRA_OUT"


class ConfigError(ValueError):
    pass


def _number(value: Any, key: str) -> float:
    """Accept numbers and fraction strings such as ``"1/96"``."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{key}: cannot read {value!r} as a number") from None
    else:
        raise ConfigError(f"{key}: expected a number, got {type(value).__name__}")
    if not out > 0:
        raise ConfigError(f"{key}: must be positive, got {out}")
    return out


def _count(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{key}: expected a positive integer, got {value!r}")
    return value


def _shape(data: Any, key: str) -> Shape:
    if not isinstance(data, dict):
        raise ConfigError(f"{key}: expected a table describing a shape")
    try:
        return Shape.from_dict(data)
    except GeometryError as exc:
        raise ConfigError(f"{key}: {exc}") from None


@dataclass
class ExperimentConfig:
    domain: Optional[Shape] = None
    obstacle: Optional[Shape] = None
    obstacle_offset: tuple[float, float] = (0.0, 0.0)
    h: float = 1 / 64
    lattice_step: float = 0.05
    tol: float = 1e-8
    n_directions: int = 360
    heart_tol: float = 1e-3
    n_boundary: int = 200
    n_radii: int = 20
    n_samples: int = 4000
    seed: int = 42
    output: str = "out"
    constants: str = "analytic-2d"
    family: list = field(default_factory=list)
    cases: list = field(default_factory=list)
    source: bytes = b""
    base_dir: Path = Path(".")

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.source).hexdigest()

    def profile(self) -> ConstantsProfile:
        if self.constants == "analytic-2d":
            return analytic_2d()
        path = Path(self.constants)
        if not path.is_absolute():
            path = self.base_dir / path
        try:
            return ConstantsProfile.load(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"constants: cannot load profile {str(path)!r}: {exc}") from None

    def require_domain(self) -> Shape:
        if self.domain is None:
            raise ConfigError("domain: this command needs a [domain] table")
        return self.domain


def parse_config(text: str, base_dir: Path = Path(".")) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    cfg = ExperimentConfig(source=text.encode(), base_dir=base_dir)
    if "domain" in data:
        cfg.domain = _shape(data["domain"], "domain")
    if "obstacle" in data:
        cfg.obstacle = _shape(data["obstacle"], "obstacle")
        off = data["obstacle"].get("offset", [0.0, 0.0])
        if not (isinstance(off, list) and len(off) == 2):
            raise ConfigError("obstacle.offset: expected [x, y]")
        cfg.obstacle_offset = (float(off[0]), float(off[1]))
    grid = data.get("grid", {})
    if "h" in grid:
        cfg.h = _number(grid["h"], "grid.h")
    solver = data.get("solver", {})
    if "tol" in solver:
        cfg.tol = _number(solver["tol"], "solver.tol")
        if cfg.tol > 1e-4:
            raise ConfigError("solver.tol: must not exceed 1e-4")
    sw = data.get("sweep", {})
    if "lattice_step" in sw:
        cfg.lattice_step = _number(sw["lattice_step"], "sweep.lattice_step")
    ht = data.get("heart", {})
    if "n_directions" in ht:
        cfg.n_directions = _count(ht["n_directions"], "heart.n_directions")
    if "tol" in ht:
        cfg.heart_tol = _number(ht["tol"], "heart.tol")
    asym = data.get("asymmetry", {})
    for key in ("n_boundary", "n_radii", "n_samples"):
        if key in asym:
            setattr(cfg, key, _count(asym[key], f"asymmetry.{key}"))
    if "seed" in data:
        if isinstance(data["seed"], bool) or not isinstance(data["seed"], int):
            raise ConfigError("seed: expected an integer")
        cfg.seed = data["seed"]
    if "output" in data:
        cfg.output = str(data["output"])
    if "constants" in data:
        cfg.constants = str(data["constants"])
    cfg.family = [_shape(s, f"family[{i}]") for i, s in enumerate(data.get("family", []))]
    for i, case in enumerate(data.get("cases", [])):
        for key in ("domain", "obstacle"):
            if key not in case:
                raise ConfigError(f"cases[{i}]: missing required key '{key}'")
        cfg.cases.append({
            "domain": _shape(case["domain"], f"cases[{i}].domain"),
            "obstacle": _shape(case["obstacle"], f"cases[{i}].obstacle"),
            "lattice_step": _number(case.get("lattice_step", cfg.lattice_step), f"cases[{i}].lattice_step"),
        })
    return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(p)!r}: {exc.strerror}") from None
    return parse_config(text, base_dir=p.parent)


def output_dir(cfg: ExperimentConfig, override: Optional[str] = None) -> Path:
    """``--out`` beats the environment override, which beats the config file."""
    return Path(override or os.environ.get(OUT_ENV) or cfg.output)
