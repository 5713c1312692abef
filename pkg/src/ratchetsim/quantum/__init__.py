"""Quantum engine: density-matrix evolution on the truncated momentum
lattice with exact kick unitaries and a finite-temperature dissipator."""

from .basis import (
    DensityMatrix,
    MomentumBasis,
    build_initial_cell_state,
    quantum_current,
    tail_population,
)
from .bath import DissipatorContext, dissipator_rhs, ladder_amplitude, thermal_occupations
from .evolve import (
    NumericalQualityError,
    PeriodDiagnostics,
    SubstepStabilityError,
    TailOverflowError,
    TraceDriftError,
    evolve,
    evolve_one_period,
)
from .kick import KickUnitary, build_kick_unitary, free_phase

__all__ = [
    "DensityMatrix",
    "MomentumBasis",
    "build_initial_cell_state",
    "quantum_current",
    "tail_population",
    "DissipatorContext",
    "dissipator_rhs",
    "ladder_amplitude",
    "thermal_occupations",
    "KickUnitary",
    "build_kick_unitary",
    "free_phase",
    "evolve",
    "evolve_one_period",
    "PeriodDiagnostics",
    "NumericalQualityError",
    "TailOverflowError",
    "TraceDriftError",
    "SubstepStabilityError",
]
