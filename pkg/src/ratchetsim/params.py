"""Shared physical parameters, unit conventions and derived constants.

All quantities are in the scaled map units: the kick period is absorbed
into the momentum, k_B = 1, and temperatures are energies. The classical
map evolves (x, p); the quantum engine works on the integer momentum
lattice with p = hbar_eff * n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


class ValidationError(ValueError):
    """Parameter validation failure; `field` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class SimulationParams:
    """Physical parameters shared by both engines.

    K            scaled kick strength (> 0)
    a            asymmetry amplitude of the second harmonic
    phi          asymmetry phase (radians)
    gamma        dissipation parameter, per-kick momentum retention in [0, 1]
    temperature  scaled temperature (k_B = 1, energy units, >= 0)
    seed         RNG seed for the per-trajectory Philox streams
    """

    K: float
    a: float
    phi: float
    gamma: float
    temperature: float
    seed: int


@dataclass(frozen=True)
class QuantumParams:
    """Quantum engine parameters on top of :class:`SimulationParams`.

    hbar_eff          effective Planck constant (= kick period in map units)
    n_max             momentum basis spans integers n in [-n_max, n_max]
    substeps          RK4 substeps for the dissipative stretch of one period
    temperature_scale multiplier applied to `temperature` before it enters
                      the bath occupations (default 1)
    coupling_g        dissipator coupling; None derives -ln(gamma)/2 so that
                      one dissipative period contracts <p> by exactly gamma
                      (the generator's momentum decay rate is 2g)
    diagonal_dissipator  restrict the bath double sum to n = n'
    kick_last         apply the kick at the end of the period instead of the start
    tail_threshold    abort threshold for population near the basis edge
    tail_margin       number of edge levels monitored (None: max(2, n_max // 10))
    grid_factor       position grid size is the next power of two >= grid_factor * N
    """

    base: SimulationParams
    hbar_eff: float
    n_max: int | None = None
    substeps: int | None = None
    temperature_scale: float = 1.0
    coupling_g: float | None = None
    diagonal_dissipator: bool = False
    kick_last: bool = False
    tail_threshold: float = 1e-6
    tail_margin: int | None = None
    grid_factor: int = 4
    p_span: float = 40.0

    @property
    def k(self) -> float:
        """Bare kick strength k = K / hbar_eff."""
        return self.base.K / self.hbar_eff

    @property
    def n_levels(self) -> int:
        nmax = self.resolved_n_max
        return 2 * nmax + 1

    @property
    def resolved_n_max(self) -> int:
        if self.n_max is not None:
            return self.n_max
        # The basis must hold the attractor (p_span) plus one kick's
        # spectral reach, k (1 + a) levels with its Bessel tail; otherwise
        # edge truncation bleeds trace every period.
        kick_reach = int(math.ceil(1.5 * self.k * (1.0 + abs(self.base.a)))) + 14
        return int(math.ceil(self.p_span / self.hbar_eff)) + kick_reach

    @property
    def resolved_substeps(self) -> int:
        if self.substeps is not None:
            return self.substeps
        return 100 * max(1, int(math.ceil(self.g)))

    @property
    def resolved_tail_margin(self) -> int:
        if self.tail_margin is not None:
            return self.tail_margin
        return max(2, self.resolved_n_max // 10)

    @property
    def g(self) -> float:
        """Dissipator coupling actually used by the engine."""
        if self.coupling_g is not None:
            return self.coupling_g
        gamma = self.base.gamma
        if gamma <= 0.0 or gamma > 1.0:
            raise ValidationError("gamma", "derived coupling needs 0 < gamma <= 1; "
                                           "set coupling_g explicitly otherwise")
        # One dissipative stretch of unit time must contract <p> by gamma;
        # the generator's ladder terms decay <p> at rate 2g.
        return -0.5 * math.log(gamma)

    @property
    def bath_temperature(self) -> float:
        return self.base.temperature * self.temperature_scale


def validate(params: SimulationParams) -> SimulationParams:
    """Check the invariants and return `params` unchanged if they hold."""
    if not (params.K > 0.0) or not math.isfinite(params.K):
        raise ValidationError("K", f"kick strength must be positive and finite, got {params.K}")
    if not math.isfinite(params.a):
        raise ValidationError("a", f"asymmetry amplitude must be finite, got {params.a}")
    if not math.isfinite(params.phi):
        raise ValidationError("phi", f"asymmetry phase must be finite, got {params.phi}")
    if not (0.0 <= params.gamma <= 1.0):
        raise ValidationError("gamma", f"gamma out of [0, 1], got {params.gamma}")
    if not (params.temperature >= 0.0):
        raise ValidationError("temperature", f"negative temperature: {params.temperature}")
    if not isinstance(params.seed, (int,)) or isinstance(params.seed, bool):
        raise ValidationError("seed", f"seed must be an integer, got {params.seed!r}")
    return params


def validate_quantum(qp: QuantumParams) -> QuantumParams:
    """Validate a QuantumParams bundle (including its base)."""
    validate(qp.base)
    if not (qp.hbar_eff > 0.0) or not math.isfinite(qp.hbar_eff):
        raise ValidationError("hbar_eff", f"must be positive and finite, got {qp.hbar_eff}")
    if qp.resolved_n_max < 1:
        raise ValidationError("n_max", f"must be >= 1, got {qp.resolved_n_max}")
    if qp.resolved_substeps < 1:
        raise ValidationError("substeps", f"must be >= 1, got {qp.resolved_substeps}")
    if qp.temperature_scale < 0.0:
        raise ValidationError("temperature_scale", "must be non-negative")
    if qp.grid_factor < 1:
        raise ValidationError("grid_factor", "must be >= 1")
    k = qp.k
    if not math.isfinite(k) or not (k > 0.0):
        raise ValidationError("hbar_eff", f"derived k = K/hbar_eff not positive/finite: {k}")
    return qp


def coupling_constant(gamma: float) -> float:
    """Bath coupling constant -ln(1 - gamma) for 0 <= gamma < 1.

    Diverges as gamma -> 1; that limit must be requested as an explicit
    coupling instead.
    """
    if not (0.0 <= gamma < 1.0):
        if gamma == 1.0:
            raise ValidationError("gamma", "coupling constant diverges at gamma = 1; "
                                           "pass an explicit coupling instead")
        raise ValidationError("gamma", f"gamma out of [0, 1), got {gamma}")
    return -math.log1p(-gamma)


def noise_std(gamma: float, temperature: float) -> float:
    """Thermal noise standard deviation sqrt(2 (1 - gamma) T).

    The per-kick noise is a zero-mean Gaussian with this width, tying the
    fluctuation strength to the damping (fluctuation-dissipation form).
    """
    if not (0.0 <= gamma <= 1.0):
        raise ValidationError("gamma", f"gamma out of [0, 1], got {gamma}")
    if temperature < 0.0:
        raise ValidationError("temperature", f"negative temperature: {temperature}")
    return math.sqrt(2.0 * (1.0 - gamma) * temperature)


def with_overrides(params: SimulationParams, **kwargs) -> SimulationParams:
    """Copy of `params` with selected fields replaced, re-validated."""
    return validate(replace(params, **kwargs))
