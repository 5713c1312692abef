"""Directed-transport simulator for a dissipative kicked asymmetric potential.

Two engines over shared parameters and analysis tooling:

- `classical`: stochastic-map ensembles (bifurcation diagrams, currents,
  phase-space portraits);
- `quantum`: density-matrix evolution on the momentum lattice with exact
  kick unitaries and a finite-temperature momentum-ladder dissipator.

See the CLI (`ratchetsim --help`) and the bundled presets for the
standard experiments.
"""

__version__ = "0.1.0"

from .params import (
    QuantumParams,
    SimulationParams,
    ValidationError,
    coupling_constant,
    noise_std,
    validate,
    validate_quantum,
)

__all__ = [
    "__version__",
    "SimulationParams",
    "QuantumParams",
    "ValidationError",
    "validate",
    "validate_quantum",
    "coupling_constant",
    "noise_std",
]
