"""Fixtures: miniature artifact sets produced through the simulator CLI.

The figure scripts consume only CSV artifacts, so the fixtures generate
schema-identical (but tiny) versions of each bundled experiment's outputs
by invoking the CLI, the same external interface the real presets use.
"""

import subprocess
import sys

import pytest

PARAMS = """
[params]
K = 7.0
a = 0.7
phi = 1.5707963267948966
gamma = {gamma}
temperature = {temperature}
seed = 101
"""

FIG1_MINI = """
[experiment]
engine = classical
kind = bifurcation
output_prefix = fig1
gamma_grid = 0.7, 0.8
temperature_grid = 0, 0.05
transient = 200
retained = 20
count = 80
inset_gamma_grid = 0.7, 0.75, 0.8
inset_transient = 50
inset_window = 50
inset_count = 80
""" + PARAMS.format(gamma=0.75, temperature=0)

FIG2_MINI = """
[experiment]
engine = quantum
kind = asymptotic-scan
output_prefix = fig2-g{tag}
temperature_grid = 0, 0.1
hbar_grid = 0.9, 1.2, 1.5
include_classical = true
count = 400
transient = 30
window = 20
""" + PARAMS.format(gamma="{gamma}", temperature=0) + """
[quantum]
hbar_eff = 0.9
p_span = {p_span}
"""

FIG3_MINI = """
[experiment]
engine = quantum
kind = portrait
output_prefix = fig3
temperature_grid = 0, 0.1
include_classical = true
steps = 5
count = 400
x_bins = 24
p_bins = 18
p_lo = -4
p_hi = 8
""" + PARAMS.format(gamma=0.75, temperature=0) + """
[quantum]
hbar_eff = 0.9
p_span = 30
"""

FIG4_MINI = """
[experiment]
engine = quantum
kind = current
output_prefix = fig4
hbar_grid = 0.9, 1.2
include_classical = true
classical_temperatures = 0.1, 0.85
steps = 20
count = 500
init_x_lo = 0
init_x_hi = 6.283185307179586
""" + PARAMS.format(gamma=0.75, temperature=0) + """
[quantum]
hbar_eff = 0.9
p_span = 30
"""


def run_cli(config_text, name, out_dir, tmp_dir):
    cfg = tmp_dir / name
    cfg.write_text(config_text)
    proc = subprocess.run(
        [sys.executable, "-m", "ratchetsim.cli", "run", str(cfg),
         "--out", str(out_dir), "--workers", "2"],
        capture_output=True, text=True, timeout=1200,
    )
    assert proc.returncode == 0, proc.stderr


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("configs")
    out = tmp_path_factory.mktemp("artifacts")
    run_cli(FIG1_MINI, "fig1.ini", out, tmp)
    # the weak-dissipation attractor is much wider in momentum
    for tag, gamma, span in (("070", 0.7, 30), ("075", 0.75, 30), ("090", 0.9, 45)):
        run_cli(FIG2_MINI.format(tag=tag, gamma=gamma, p_span=span),
                f"fig2-{tag}.ini", out, tmp)
    run_cli(FIG3_MINI, "fig3.ini", out, tmp)
    run_cli(FIG4_MINI, "fig4.ini", out, tmp)
    return out
