"""Bifurcation overview: retained momentum vs dissipation at two
temperatures, with the stationary-current inset over the transport window.

Inputs (written by the fig1 preset): fig1_T{t}.csv bifurcation samples and
fig1_jinf_T{t}.csv stationary-current scans for the two temperatures.
"""

from __future__ import annotations

import sys
from pathlib import Path

from . import style
from .csvio import ArtifactError, read_table, require_columns

PREFIX = "fig1"


def find_temperatures(in_dir: Path) -> list[str]:
    tags = sorted(p.name[len(PREFIX) + 2:-4]
                  for p in in_dir.glob(f"{PREFIX}_T*.csv")
                  if "_jinf_" not in p.name)
    if not tags:
        raise ArtifactError(f"no {PREFIX}_T*.csv files in {in_dir}")
    return tags


def render(in_dir, out_file) -> None:
    import matplotlib.pyplot as plt

    style.apply_defaults()
    in_dir = Path(in_dir)
    tags = find_temperatures(in_dir)

    fig, axes = plt.subplots(len(tags), 1, figsize=(6.0, 3.2 * len(tags)),
                             sharex=True, squeeze=False)
    for ax, tag in zip(axes[:, 0], tags):
        cols, _ = read_table(in_dir / f"{PREFIX}_T{tag}.csv")
        require_columns(cols, ("gamma", "p"), f"{PREFIX}_T{tag}.csv")
        ax.plot(cols["gamma"], cols["p"], ",", color="black", markersize=0.3,
                rasterized=True)
        ax.set_ylabel("p")
        ax.set_title(f"T = {tag}", fontsize=9)
    axes[-1, 0].set_xlabel("dissipation parameter")

    inset = axes[0, 0].inset_axes([0.08, 0.58, 0.36, 0.36])
    markers = {tags[0]: "o", tags[-1]: "D"}
    for tag in tags:
        path = in_dir / f"{PREFIX}_jinf_T{tag}.csv"
        if not path.exists():
            raise ArtifactError(f"missing inset data {path}")
        cols, _ = read_table(path)
        require_columns(cols, ("gamma_or_T", "J_inf"), path)
        inset.plot(cols["gamma_or_T"], cols["J_inf"], markers.get(tag, "o"),
                   markersize=2.5, linestyle="-", linewidth=0.6,
                   label=f"T = {tag}")
    inset.set_xlabel("dissipation", fontsize=6)
    inset.set_ylabel("stationary J", fontsize=6)
    inset.tick_params(labelsize=6)

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
