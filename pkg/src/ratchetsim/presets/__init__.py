"""Bundled experiment configs (INI files shipped with the package)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def preset_names() -> list[str]:
    files = resources.files(__package__)
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".ini"))


def preset_path(name: str) -> Path | None:
    files = resources.files(__package__)
    candidate = files / f"{name}.ini"
    if candidate.is_file():
        return Path(str(candidate))
    return None
