"""Figure scripts over the simulator's CSV artifacts.

Each module renders one bundled experiment's outputs into an image:
`python -m ratchetsim_figures.fig1 --in DIR --out FILE`. The scripts never
recompute physics; they read only the CSV dialect (and portrait sidecars)
written by the experiment runner, and rendering is deterministic: the same
inputs produce byte-identical images.
"""

__version__ = "0.1.0"
