"""Deterministic rendering defaults and the series style conventions."""

from __future__ import annotations

import argparse

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

DPI = 150

# quantum series roles, smallest coarse-graining first
QUANTUM_STYLES = [
    dict(color="tab:blue", marker="^", label_fmt="hbar_eff = {v:g}"),
    dict(color="tab:green", marker="D", label_fmt="hbar_eff = {v:g}"),
    dict(color="tab:red", marker="s", label_fmt="hbar_eff = {v:g}"),
]
CLASSICAL_STYLE = dict(color="black", marker="o", label_fmt="classical")


def apply_defaults() -> None:
    plt.rcParams.update({
        "figure.dpi": DPI,
        "savefig.dpi": DPI,
        "font.family": "DejaVu Sans",
        "font.size": 9,
        "axes.linewidth": 0.8,
        "lines.linewidth": 1.2,
        "svg.hashsalt": "ratchetsim-figures",
    })


def save(fig, out_file) -> None:
    """Write the image without volatile metadata so reruns are identical."""
    fig.savefig(out_file, dpi=DPI, metadata={"Software": "ratchetsim-figures"})
    plt.close(fig)


def cli_parser(description: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the experiment CSV artifacts")
    parser.add_argument("--out", dest="out_file", required=True,
                        help="output image path")
    return parser


def quantum_style(rank: int) -> dict:
    return QUANTUM_STYLES[min(rank, len(QUANTUM_STYLES) - 1)]
