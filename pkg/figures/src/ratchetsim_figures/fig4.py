"""Current vs time overlay: thin black classical curves next to thick
green quantum curves; within each engine, dot-dashed marks the smaller
temperature / coarse-graining and solid the larger.

Inputs (fig4 preset): fig4_classical_T{t}.csv and fig4_hbar{v}_T{t}.csv
current series.
"""

from __future__ import annotations

import sys
from pathlib import Path

from . import style
from .csvio import ArtifactError, read_table, require_columns

PREFIX = "fig4"
LINESTYLES = ["-.", "-", ":", "--"]


def collect(in_dir: Path):
    classical = sorted(in_dir.glob(f"{PREFIX}_classical_T*.csv"),
                       key=lambda p: float(p.stem.rsplit("_T", 1)[1]))
    quantum = sorted(in_dir.glob(f"{PREFIX}_hbar*_T*.csv"),
                     key=lambda p: float(p.stem.split("hbar", 1)[1].split("_T", 1)[0]))
    if not classical and not quantum:
        raise ArtifactError(f"no {PREFIX} current series in {in_dir}")
    return classical, quantum


def render(in_dir, out_file) -> None:
    import matplotlib.pyplot as plt

    style.apply_defaults()
    in_dir = Path(in_dir)
    classical, quantum = collect(in_dir)

    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    for rank, path in enumerate(classical):
        cols, meta = read_table(path)
        require_columns(cols, ("t", "J"), path)
        ax.plot(cols["t"], cols["J"], LINESTYLES[rank % len(LINESTYLES)],
                color="black", linewidth=0.9,
                label=f"classical, T = {meta.get('temperature', '?')}")
    for rank, path in enumerate(quantum):
        cols, meta = read_table(path)
        require_columns(cols, ("t", "J"), path)
        ax.plot(cols["t"], cols["J"], LINESTYLES[rank % len(LINESTYLES)],
                color="tab:green", linewidth=1.8,
                label=f"quantum, hbar_eff = {meta.get('hbar_eff', '?')}")
    ax.set_xlabel("t (kicks)")
    ax.set_ylabel("J")
    ax.legend(fontsize=7, frameon=False)
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
