"""Stationary current vs temperature: one panel per dissipation value,
each carrying the classical baseline plus the quantum series (markers by
coarse-graining rank: triangles, diamonds, squares from smallest hbar_eff).

Inputs (fig2-g* presets): {prefix}_classical.csv plus {prefix}_hbar{v}.csv
scan files, one prefix per panel.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import style
from .csvio import ArtifactError, read_table, require_columns

PREFIX = "fig2"


@dataclass
class Series:
    label: str
    engine: str
    hbar_eff: float | None
    axis: np.ndarray
    j_inf: np.ndarray


@dataclass
class Panel:
    gamma: float
    series: list[Series]


def collect_panels(in_dir) -> list[Panel]:
    in_dir = Path(in_dir)
    panels = []
    for classical_path in sorted(in_dir.glob(f"{PREFIX}*_classical.csv")):
        prefix = classical_path.name[: -len("_classical.csv")]
        cols, meta = read_table(classical_path)
        require_columns(cols, ("gamma_or_T", "J_inf"), classical_path)
        gamma = float(meta.get("gamma", "nan"))
        series = [Series("classical", "classical", None,
                         cols["gamma_or_T"], cols["J_inf"])]
        quantum_paths = sorted(in_dir.glob(f"{prefix}_hbar*.csv"),
                               key=lambda p: float(p.stem.rsplit("hbar", 1)[1]))
        for qp in quantum_paths:
            qcols, qmeta = read_table(qp)
            require_columns(qcols, ("gamma_or_T", "J_inf"), qp)
            hbar = float(qmeta.get("hbar_eff", qp.stem.rsplit("hbar", 1)[1]))
            series.append(Series(f"hbar_eff = {hbar:g}", "quantum", hbar,
                                 qcols["gamma_or_T"], qcols["J_inf"]))
        panels.append(Panel(gamma=gamma, series=series))
    if not panels:
        raise ArtifactError(f"no {PREFIX}*_classical.csv files in {in_dir}")
    panels.sort(key=lambda p: p.gamma)
    return panels


def render(in_dir, out_file) -> None:
    import matplotlib.pyplot as plt

    style.apply_defaults()
    panels = collect_panels(in_dir)

    fig, axes = plt.subplots(len(panels), 1, figsize=(5.2, 2.6 * len(panels)),
                             sharex=True, squeeze=False)
    for ax, panel in zip(axes[:, 0], panels):
        quantum_rank = 0
        for s in panel.series:
            if s.engine == "classical":
                st = style.CLASSICAL_STYLE
            else:
                st = style.quantum_style(quantum_rank)
                quantum_rank += 1
            ax.plot(s.axis, s.j_inf, marker=st["marker"], color=st["color"],
                    markersize=4, linewidth=0.8, label=s.label)
        ax.set_ylabel("stationary J")
        ax.set_title(f"dissipation = {panel.gamma:g}", fontsize=9)
        ax.legend(fontsize=6, frameon=False)
    axes[-1, 0].set_xlabel("temperature")
    fig.tight_layout()
    style.save(fig, out_file)


def main(argv=None) -> int:
    args = style.cli_parser(__doc__).parse_args(argv)
    try:
        render(args.in_dir, args.out_file)
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(args.out_file)
    return 0


if __name__ == "__main__":
    sys.exit(main())
