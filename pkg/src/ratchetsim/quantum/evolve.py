"""Kick-cycle driver: exact kick, split free rotation, RK4 dissipator.

One period is (i) the kick unitary, (ii) half-period free phases wrapped
around a full dissipative stretch integrated with classic RK4 over unit
dimensionless time. With `kick_last` the kick moves to the period end.
Per-period quality guards: truncation-tail population, trace drift and
RK4 step-size stability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..observables import CurrentSeries
from ..params import QuantumParams, validate_quantum
from .basis import DensityMatrix, quantum_current, tail_population
from .bath import DissipatorContext, build_dissipator_context
from .kick import KickUnitary, build_kick_unitary, free_phase


class NumericalQualityError(RuntimeError):
    """Run rejected by a numerical quality guard."""


class TailOverflowError(NumericalQualityError):
    pass


class TraceDriftError(NumericalQualityError):
    pass


class SubstepStabilityError(NumericalQualityError):
    pass


@dataclass
class PeriodDiagnostics:
    """Per-period quality record (values measured before any correction)."""

    trace_drifts: list[float] = field(default_factory=list)
    herm_residuals: list[float] = field(default_factory=list)
    tails: list[float] = field(default_factory=list)
    renormalizations: int = 0

    def worst(self) -> dict:
        return {
            "max_trace_drift": max(self.trace_drifts, default=0.0),
            "max_herm_residual": max(self.herm_residuals, default=0.0),
            "max_tail": max(self.tails, default=0.0),
            "renormalizations": self.renormalizations,
        }


def _rk4_dissipative(mat: np.ndarray, ctx: DissipatorContext, substeps: int) -> np.ndarray:
    h = 1.0 / substeps
    for _ in range(substeps):
        k1 = ctx.rhs(mat)
        k2 = ctx.rhs(mat + 0.5 * h * k1)
        k3 = ctx.rhs(mat + 0.5 * h * k2)
        k4 = ctx.rhs(mat + h * k3)
        mat = mat + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return mat


def check_substep_stability(qp: QuantumParams, ctx: DissipatorContext) -> None:
    """Reject step sizes outside the RK4 real-axis stability region."""
    substeps = qp.resolved_substeps
    rate = ctx.max_rate()
    if rate / substeps > 2.5:
        needed = int(np.ceil(rate / 2.5))
        raise SubstepStabilityError(
            f"dissipator rate {rate:.1f} exceeds RK4 stability at {substeps} "
            f"substeps; use at least {needed}"
        )


def evolve_one_period(
    rho: DensityMatrix,
    qp: QuantumParams,
    context: DissipatorContext,
    kick: KickUnitary | None = None,
    diagnostics: PeriodDiagnostics | None = None,
) -> DensityMatrix:
    """Advance the state by one kick period.

    Guards: the truncation tail must stay below qp.tail_threshold and the
    pre-renormalization trace drift below 1e-6; the trace is renormalized
    (and the event recorded) when the drift exceeds 1e-10.
    """
    if kick is None:
        kick = build_kick_unitary(qp)
    substeps = qp.resolved_substeps

    if not qp.kick_last:
        rho = kick.apply_to(rho)
    rho = free_phase(rho, qp, 0.5)
    rho = DensityMatrix(_rk4_dissipative(rho.mat, context, substeps), rho.hbar_eff)
    rho = free_phase(rho, qp, 0.5)
    if qp.kick_last:
        rho = kick.apply_to(rho)

    trace = float(np.real(np.trace(rho.mat)))
    drift = abs(trace - 1.0)
    herm = rho.hermiticity_residual()
    if not (drift <= 1e-6):
        raise TraceDriftError(
            f"trace drift {drift:.3e} after one period; increase substeps "
            f"(currently {substeps}) or enlarge the basis"
        )
    if drift > 1e-10:
        rho = DensityMatrix(rho.mat / trace, rho.hbar_eff)
        if diagnostics is not None:
            diagnostics.renormalizations += 1
    # Re-symmetrize to stop eps-level asymmetry from random-walking over
    # thousands of substeps; the measured residual is recorded first.
    rho = DensityMatrix(0.5 * (rho.mat + rho.mat.conj().T), rho.hbar_eff)

    tail = tail_population(rho, qp.resolved_tail_margin)
    if tail > qp.tail_threshold:
        raise TailOverflowError(
            f"tail population {tail:.3e} exceeds {qp.tail_threshold:.1e}; "
            f"increase n_max (currently {qp.resolved_n_max})"
        )
    if diagnostics is not None:
        diagnostics.trace_drifts.append(drift)
        diagnostics.herm_residuals.append(herm)
        diagnostics.tails.append(tail)
    return rho


def evolve(
    rho: DensityMatrix,
    qp: QuantumParams,
    periods: int,
    start_period: int = 0,
    current_history: list[float] | None = None,
    on_period=None,
) -> tuple[DensityMatrix, CurrentSeries, PeriodDiagnostics]:
    """Run `periods` total kick cycles, recording J after each.

    `start_period` > 0 continues an interrupted run: `current_history`
    must then hold J(0..start_period). `on_period(t, rho)` is called after
    each completed period (checkpoint hook).
    """
    validate_quantum(qp)
    ctx = build_dissipator_context(qp)
    check_substep_stability(qp, ctx)
    kick = build_kick_unitary(qp)
    diag = PeriodDiagnostics()

    if start_period == 0:
        J = [quantum_current(rho)]
    else:
        if current_history is None or len(current_history) != start_period + 1:
            raise ValueError("resume requires J history up to the start period")
        J = list(current_history)

    for t in range(start_period, periods):
        rho = evolve_one_period(rho, qp, ctx, kick=kick, diagnostics=diag)
        J.append(quantum_current(rho))
        if on_period is not None:
            on_period(t + 1, rho, J)

    series = CurrentSeries(
        t=np.arange(periods + 1),
        J=np.asarray(J),
        stderr=np.full(periods + 1, np.nan),
    )
    return rho, series, diag
