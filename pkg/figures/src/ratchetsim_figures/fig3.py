"""Phase-space portraits: classical snapshot histograms (left column) next
to coherent-state rasters (right column), one row per temperature.

Inputs (fig3 preset): fig3_poincare_T{t} and fig3_husimi_T{t} matrix CSVs
with their JSON sidecars.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from . import style
from .csvio import ArtifactError, read_portrait

PREFIX = "fig3"


def find_temperatures(in_dir: Path) -> list[str]:
    tags = sorted(p.name[:-4].split("_T", 1)[1]
                  for p in in_dir.glob(f"{PREFIX}_poincare_T*.csv"))
    if not tags:
        raise ArtifactError(f"no {PREFIX}_poincare_T*.csv files in {in_dir}")
    return tags


def render(in_dir, out_file) -> None:
    import matplotlib.pyplot as plt

    style.apply_defaults()
    in_dir = Path(in_dir)
    tags = find_temperatures(in_dir)

    fig, axes = plt.subplots(len(tags), 2, figsize=(7.4, 3.0 * len(tags)),
                             squeeze=False)
    for row, tag in enumerate(tags):
        for col, kind in enumerate(("poincare", "husimi")):
            prefix = in_dir / f"{PREFIX}_{kind}_T{tag}"
            values, sidecar = read_portrait(prefix)
            extent = [sidecar["x_edges"][0], sidecar["x_edges"][1],
                      sidecar["p_edges"][0], sidecar["p_edges"][1]]
            ax = axes[row][col]
            ax.imshow(np.sqrt(np.maximum(values, 0.0)), origin="lower",
                      extent=extent, aspect="auto", cmap="inferno",
                      interpolation="nearest")
            label = "classical" if kind == "poincare" else "quantum"
            ax.set_title(f"{label}, T = {tag}", fontsize=9)
            if col == 0:
                ax.set_ylabel("p")
            if row == len(tags) - 1:
                ax.set_xlabel("x")
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
