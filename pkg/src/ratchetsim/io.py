"""Artifact I/O: the CSV dialect, binary checkpoints and run manifests.

CSV dialect: comma-separated values, with '#'-prefixed header lines that
carry column names, units and key: value metadata. Floats are written with
17 significant digits so files round-trip float64 exactly and reruns are
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import struct
import time
from pathlib import Path

import numpy as np

from .observables import CurrentSeries, HusimiGrid, PoincareHistogram
from .params import QuantumParams, SimulationParams

CHECKPOINT_MAGIC = b"DKRCKPT1"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _header_lines(columns: list[str], units: list[str] | None, meta: dict | None) -> list[str]:
    lines = [f"# columns: {', '.join(columns)}"]
    if units:
        lines.append(f"# units: {', '.join(units)}")
    for key, val in (meta or {}).items():
        lines.append(f"# {key}: {val}")
    return lines


def write_table(path, columns: list[str], arrays: list[np.ndarray],
                units: list[str] | None = None, meta: dict | None = None) -> None:
    rows = zip(*arrays)
    with open(path, "w") as fh:
        for line in _header_lines(columns, units, meta):
            fh.write(line + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_table(path) -> tuple[dict, dict]:
    """Read a dialect CSV; returns (columns dict of arrays, metadata dict)."""
    meta: dict = {}
    columns: list[str] = []
    data: list[list[float]] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, val = body.split(":", 1)
                    key, val = key.strip(), val.strip()
                    if key == "columns":
                        columns = [c.strip() for c in val.split(",")]
                    else:
                        meta[key] = val
                continue
            data.append([float(v) for v in line.split(",")])
    if not columns:
        raise ValueError(f"{path}: missing '# columns:' header")
    arr = np.asarray(data, dtype=float) if data else np.empty((0, len(columns)))
    if data and arr.shape[1] != len(columns):
        raise ValueError(f"{path}: row width does not match the declared columns")
    return {c: arr[:, i] for i, c in enumerate(columns)}, meta


def write_current_series(path, series: CurrentSeries, meta: dict | None = None) -> None:
    stderr = series.stderr
    if stderr is None:
        stderr = np.full(len(series), np.nan)
    write_table(path, ["t", "J", "stderr"], [series.t, series.J, stderr],
                units=["kicks", "momentum", "momentum"], meta=meta)


def read_current_series(path) -> tuple[CurrentSeries, dict]:
    cols, meta = read_table(path)
    series = CurrentSeries(t=cols["t"].astype(int), J=cols["J"], stderr=cols.get("stderr"))
    return series, meta


def write_bifurcation_samples(path, gamma_values: np.ndarray, p_values: np.ndarray,
                              meta: dict | None = None) -> None:
    write_table(path, ["gamma", "p"], [gamma_values, p_values],
                units=["dimensionless", "momentum"], meta=meta)


def write_scan(path, axis_name: str, axis: np.ndarray, j_inf: np.ndarray,
               stderr: np.ndarray, meta: dict | None = None) -> None:
    meta = dict(meta or {})
    meta.setdefault("axis", axis_name)
    write_table(path, ["gamma_or_T", "J_inf", "stderr"], [axis, j_inf, stderr],
                units=["dimensionless", "momentum", "momentum"], meta=meta)


def write_matrix(path, values: np.ndarray, meta: dict | None = None) -> None:
    """Portrait raster: one CSV row per momentum bin."""
    with open(path, "w") as fh:
        for line in _header_lines([f"x_bin_{i}" for i in range(values.shape[1])], None, meta):
            fh.write(line + "\n")
        for row in values:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_matrix(path) -> tuple[np.ndarray, dict]:
    cols, meta = read_table(path)
    names = sorted(cols, key=lambda c: int(c.rsplit("_", 1)[1]))
    return np.column_stack([cols[c] for c in names]), meta


def write_portrait(path_prefix, raster, meta: dict) -> tuple[Path, Path]:
    """Matrix CSV plus a JSON sidecar with window/resolution/parameters."""
    if isinstance(raster, PoincareHistogram):
        values = raster.density
        sidecar = {
            "kind": "poincare",
            "x_edges": [raster.x_edges[0], raster.x_edges[-1]],
            "p_edges": [raster.p_edges[0], raster.p_edges[-1]],
            "shape": list(values.shape),
        }
    elif isinstance(raster, HusimiGrid):
        values = raster.values
        sidecar = {
            "kind": "husimi",
            "x_edges": [0.0, 2.0 * float(np.pi)],
            "p_edges": [float(2 * raster.p_grid[0] - raster.p_grid[1]) if len(raster.p_grid) > 1 else 0.0,
                        float(2 * raster.p_grid[-1] - raster.p_grid[-2]) if len(raster.p_grid) > 1 else 0.0],
            "width_ratio": raster.width_ratio,
            "shape": list(values.shape),
        }
    else:
        raise TypeError(f"unsupported raster type {type(raster)!r}")
    sidecar.update(meta)
    csv_path = Path(f"{path_prefix}.csv")
    meta_path = Path(f"{path_prefix}.meta.json")
    write_matrix(csv_path, values, meta={"kind": sidecar["kind"]})
    meta_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


# -- checkpoints ------------------------------------------------------------

def params_hash(params: SimulationParams, qp: QuantumParams | None = None,
                extra: dict | None = None) -> bytes:
    """sha256 over the physics parameters (protocol lengths excluded)."""
    payload = {
        "K": params.K, "a": params.a, "phi": params.phi, "gamma": params.gamma,
        "temperature": params.temperature, "seed": params.seed,
    }
    if qp is not None:
        payload.update({
            "hbar_eff": qp.hbar_eff, "n_max": qp.resolved_n_max,
            "substeps": qp.resolved_substeps, "temperature_scale": qp.temperature_scale,
            "coupling_g": qp.g, "diagonal_dissipator": qp.diagonal_dissipator,
            "kick_last": qp.kick_last, "grid_factor": qp.grid_factor,
        })
    payload.update(extra or {})
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).digest()


def write_checkpoint(path, rho_mat: np.ndarray, hbar_eff: float, step_count: int,
                     phash: bytes) -> None:
    """Binary state dump: magic, dimension, hbar_eff, step count, params
    hash, then the row-major complex matrix as little-endian float64 pairs.
    Written atomically (temp file + rename)."""
    dim = rho_mat.shape[0]
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", dim))
        fh.write(struct.pack("<d", hbar_eff))
        fh.write(struct.pack("<Q", step_count))
        fh.write(phash)
        data = np.ascontiguousarray(rho_mat, dtype="<c16")
        fh.write(data.tobytes())
    tmp.replace(path)


def read_checkpoint(path) -> tuple[np.ndarray, float, int, bytes]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        (dim,) = struct.unpack("<I", fh.read(4))
        (hbar_eff,) = struct.unpack("<d", fh.read(8))
        (step_count,) = struct.unpack("<Q", fh.read(8))
        phash = fh.read(32)
        raw = fh.read(dim * dim * 16)
        if len(raw) != dim * dim * 16:
            raise ValueError(f"{path}: truncated checkpoint")
        mat = np.frombuffer(raw, dtype="<c16").reshape(dim, dim).copy()
    return mat, hbar_eff, step_count, phash


# -- manifests ----------------------------------------------------------------

def write_manifest(path, config: dict, seed: int, version: str,
                   artifacts: list[str], complete: bool,
                   wall_time_s: float | None = None) -> None:
    doc = {
        "config": config,
        "seed": seed,
        "code_version": version,
        "complete": complete,
        "artifacts": sorted(artifacts),
        "wall_time_s": wall_time_s,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
