"""Standalone reader for the simulator's CSV dialect.

Comma-separated rows under '#'-prefixed header lines; the headers carry
'columns:' plus key: value metadata. Kept free of simulator imports so the
figure scripts depend only on the artifact format.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class ArtifactError(RuntimeError):
    pass


def read_table(path) -> tuple[dict, dict]:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"missing input file {path}")
    meta: dict = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, val = body.split(":", 1)
                    if key.strip() == "columns":
                        columns = [c.strip() for c in val.split(",")]
                    else:
                        meta[key.strip()] = val.strip()
                continue
            rows.append([float(v) for v in line.split(",")])
    if not columns:
        raise ArtifactError(f"{path}: no '# columns:' header")
    if not rows:
        raise ArtifactError(f"{path}: no data rows")
    arr = np.asarray(rows)
    if arr.shape[1] != len(columns):
        raise ArtifactError(f"{path}: row width differs from the declared columns")
    return {c: arr[:, i] for i, c in enumerate(columns)}, meta


def require_columns(cols: dict, names: tuple[str, ...], path) -> None:
    missing = [n for n in names if n not in cols]
    if missing:
        raise ArtifactError(f"{path}: missing columns {', '.join(missing)}")


def read_portrait(prefix) -> tuple[np.ndarray, dict]:
    """Matrix CSV plus its JSON sidecar; `prefix` omits the extensions."""
    csv_path = Path(f"{prefix}.csv")
    meta_path = Path(f"{prefix}.meta.json")
    if not meta_path.exists():
        raise ArtifactError(f"missing sidecar {meta_path}")
    cols, _ = read_table(csv_path)
    names = sorted(cols, key=lambda c: int(c.rsplit("_", 1)[1]))
    values = np.column_stack([cols[c] for c in names])
    sidecar = json.loads(meta_path.read_text())
    return values, sidecar
