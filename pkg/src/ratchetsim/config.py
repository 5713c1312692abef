"""Experiment configuration: INI files with strict key validation.

One experiment per file. Sections: [experiment] (what to run), [params]
(shared physical parameters), [quantum] (quantum engine extras, required
when engine = quantum). Unknown sections or keys are errors.

Grid values accept either a comma list ("0, 0.05, 0.1") or an inclusive
range "lo:hi:npoints".
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import (
    QuantumParams,
    SimulationParams,
    ValidationError,
    validate,
    validate_quantum,
)

ENGINES = ("classical", "quantum")
KINDS = ("bifurcation", "current", "asymptotic-scan", "portrait", "husimi")


class ConfigError(ValueError):
    pass


_PARAM_KEYS = {
    "K": float, "a": float, "phi": float, "gamma": float,
    "temperature": float, "seed": int, "noise_distribution": str,
}

_QUANTUM_KEYS = {
    "hbar_eff": float, "n_max": int, "substeps": int, "temperature_scale": float,
    "coupling_g": float, "diagonal_dissipator": bool, "kick_last": bool,
    "tail_threshold": float, "tail_margin": int, "grid_factor": int,
    "p_span": float, "husimi_squeeze": float,
}

_EXPERIMENT_KEYS = {
    "engine": str, "kind": str, "output_prefix": str,
    "steps": int, "transient": int, "window": int, "count": int, "retained": int,
    "gamma_grid": "grid", "temperature_grid": "grid", "hbar_grid": "grid",
    "inset_gamma_grid": "grid", "inset_transient": int, "inset_window": int,
    "inset_count": int,
    "include_classical": bool, "classical_temperatures": "grid",
    "max_total_samples": int,
    "x_bins": int, "p_bins": int, "p_lo": float, "p_hi": float,
    "init_x_lo": float, "init_x_hi": float, "init_p_lo": float, "init_p_hi": float,
    "checkpoint_every": int,
}


@dataclass
class ExperimentConfig:
    engine: str
    kind: str
    output_prefix: str
    params: SimulationParams
    quantum: QuantumParams | None = None
    husimi_squeeze: float = 1.0

    steps: int = 100
    transient: int | None = None
    window: int | None = None
    count: int = 5000
    retained: int | None = None
    gamma_grid: np.ndarray | None = None
    temperature_grid: np.ndarray | None = None
    hbar_grid: np.ndarray | None = None
    inset_gamma_grid: np.ndarray | None = None
    inset_transient: int = 1000
    inset_window: int = 1000
    inset_count: int | None = None
    include_classical: bool = False
    classical_temperatures: np.ndarray | None = None
    max_total_samples: int | None = 50_000
    x_bins: int = 400
    p_bins: int = 300
    p_lo: float = -4.0
    p_hi: float = 8.0
    init_region: tuple[float, float, float, float] = (0.0, math.pi, -math.pi, math.pi)
    checkpoint_every: int = 0


def _parse_grid(text: str) -> np.ndarray:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid range must be lo:hi:npoints, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ConfigError(f"grid needs at least one point, got {n}")
        return np.linspace(lo, hi, n)
    return np.asarray([float(v) for v in text.split(",")], dtype=float)


def _parse_value(kind, key: str, text: str):
    try:
        if kind is bool:
            low = text.strip().lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind == "grid":
            return _parse_grid(text)
        return kind(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _read_section(cp: configparser.ConfigParser, name: str, schema: dict) -> dict:
    if not cp.has_section(name):
        return {}
    out = {}
    for key, raw in cp.items(name):
        if key not in schema:
            raise ConfigError(f"unknown key '{key}' in section [{name}]")
        out[key] = _parse_value(schema[key], f"[{name}] {key}", raw)
    return out


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep case: K vs k matters
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    known_sections = {"experiment", "params", "quantum"}
    for section in cp.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]")
    if not cp.has_section("experiment") or not cp.has_section("params"):
        raise ConfigError("config needs [experiment] and [params] sections")

    exp = _read_section(cp, "experiment", _EXPERIMENT_KEYS)
    par = _read_section(cp, "params", _PARAM_KEYS)
    qua = _read_section(cp, "quantum", _QUANTUM_KEYS)

    for key in ("engine", "kind", "output_prefix"):
        if key not in exp:
            raise ConfigError(f"[experiment] {key} is required")
    engine, kind = exp["engine"], exp["kind"]
    if engine not in ENGINES:
        raise ConfigError(f"engine must be one of {ENGINES}, got {engine!r}")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    if kind == "husimi" and engine != "quantum":
        raise ConfigError("husimi requires engine = quantum")
    if kind == "bifurcation" and engine != "classical":
        raise ConfigError("bifurcation requires engine = classical")

    noise = par.pop("noise_distribution", "gaussian")
    if noise != "gaussian":
        raise ConfigError(f"noise_distribution: only 'gaussian' is supported, got {noise!r}")
    missing = [k for k in ("K", "a", "phi", "gamma", "temperature", "seed") if k not in par]
    if missing:
        raise ConfigError(f"[params] missing required keys: {', '.join(missing)}")
    try:
        params = validate(SimulationParams(**par))
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc

    quantum = None
    if engine == "quantum":
        if "hbar_eff" not in qua:
            raise ConfigError("[quantum] hbar_eff is required for engine = quantum")
        squeeze = qua.pop("husimi_squeeze", 1.0)
        try:
            quantum = validate_quantum(QuantumParams(base=params, **qua))
        except (ValidationError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
    else:
        if qua:
            raise ConfigError("[quantum] section is only valid for engine = quantum")
        squeeze = 1.0

    region = (
        exp.pop("init_x_lo", 0.0),
        exp.pop("init_x_hi", math.pi),
        exp.pop("init_p_lo", -math.pi),
        exp.pop("init_p_hi", math.pi),
    )
    cfg = ExperimentConfig(
        engine=engine,
        kind=kind,
        output_prefix=exp.pop("output_prefix"),
        params=params,
        quantum=quantum,
        husimi_squeeze=squeeze,
        init_region=region,
    )
    exp.pop("engine"), exp.pop("kind")
    for key, val in exp.items():
        setattr(cfg, key, val)
    _validate_experiment(cfg)
    return cfg


def _validate_experiment(cfg: ExperimentConfig) -> None:
    if cfg.kind == "asymptotic-scan":
        has_g = cfg.gamma_grid is not None
        has_t = cfg.temperature_grid is not None
        if has_g == has_t:
            raise ConfigError("asymptotic-scan needs exactly one of gamma_grid or temperature_grid")
    if cfg.kind == "bifurcation" and cfg.gamma_grid is None:
        raise ConfigError("bifurcation needs gamma_grid")
    if cfg.include_classical and cfg.engine != "quantum":
        raise ConfigError("include_classical only makes sense for engine = quantum")
    if cfg.count < 1:
        raise ConfigError("count must be >= 1")
    if cfg.steps < 0:
        raise ConfigError("steps must be >= 0")
    x_lo, x_hi, p_lo, p_hi = cfg.init_region
    if not (x_lo < x_hi) or not (p_lo < p_hi):
        raise ConfigError("initial region must have positive extent")


def resolved_dict(cfg: ExperimentConfig) -> dict:
    """JSON-ready view of the fully resolved configuration (for manifests)."""
    def conv(v):
        if isinstance(v, np.ndarray):
            return [float(x) for x in v]
        return v

    out = {
        "engine": cfg.engine, "kind": cfg.kind, "output_prefix": cfg.output_prefix,
        "params": {
            "K": cfg.params.K, "a": cfg.params.a, "phi": cfg.params.phi,
            "gamma": cfg.params.gamma, "temperature": cfg.params.temperature,
            "seed": cfg.params.seed, "noise_distribution": "gaussian",
        },
        "protocol": {
            "steps": cfg.steps, "transient": cfg.transient, "window": cfg.window,
            "count": cfg.count, "retained": cfg.retained,
            "gamma_grid": conv(cfg.gamma_grid),
            "temperature_grid": conv(cfg.temperature_grid),
            "hbar_grid": conv(cfg.hbar_grid),
            "inset_gamma_grid": conv(cfg.inset_gamma_grid),
            "include_classical": cfg.include_classical,
            "classical_temperatures": conv(cfg.classical_temperatures),
            "max_total_samples": cfg.max_total_samples,
            "x_bins": cfg.x_bins, "p_bins": cfg.p_bins,
            "p_lo": cfg.p_lo, "p_hi": cfg.p_hi,
            "init_region": list(cfg.init_region),
            "checkpoint_every": cfg.checkpoint_every,
        },
    }
    if cfg.quantum is not None:
        out["quantum"] = {
            "hbar_eff": cfg.quantum.hbar_eff,
            "n_max": cfg.quantum.resolved_n_max,
            "substeps": cfg.quantum.resolved_substeps,
            "temperature_scale": cfg.quantum.temperature_scale,
            "coupling_g": cfg.quantum.g,
            "diagonal_dissipator": cfg.quantum.diagonal_dissipator,
            "kick_last": cfg.quantum.kick_last,
            "tail_threshold": cfg.quantum.tail_threshold,
            "tail_margin": cfg.quantum.resolved_tail_margin,
            "grid_factor": cfg.quantum.grid_factor,
            "husimi_squeeze": cfg.husimi_squeeze,
        }
    return out
