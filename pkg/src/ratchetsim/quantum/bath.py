"""Thermal bath: occupation factors and the momentum-ladder dissipator.

The jump operators lower the momentum modulus by one level on both sides
of n = 0:

    L_m = sqrt(m + 1) (|m><m+1| + |-m><-m-1|),   m = 0 .. n_max - 1

with transition frequencies Omega_m = m + 1/2. The generator couples every
(m, m') pair with weight g sqrt(w_m w_m'), where w is the bath occupation
at the respective frequency. That coefficient matrix is rank one, so the
double sum collapses to two effective jump operators

    A = sum_m sqrt(n+_th(Omega_m)) L_m        (emission into the bath)
    B = sum_m sqrt(n-_th(Omega_m)) L_m^dag    (absorption from the bath)

and the right-hand side is

    D[rho] = g (2 A rho A+ - {A+A, rho}) + g (2 B rho B+ - {B+B, rho}).

A and B are applied with strided slice arithmetic (two axpy passes each),
never materialized as matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..params import QuantumParams
from .basis import DensityMatrix


def thermal_occupations(omega: float, temperature: float) -> tuple[float, float]:
    """Bath population factors (n_plus, n_minus) at frequency omega.

    n_minus = 1 / (exp(omega / T) - 1) for T > 0, and 0 at T = 0;
    n_plus = n_minus + 1 always.
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if temperature < 0.0:
        raise ValueError(f"negative temperature: {temperature}")
    if temperature == 0.0:
        return 1.0, 0.0
    ratio = omega / temperature
    n_minus = 1.0 / np.expm1(ratio) if ratio < 700.0 else 0.0
    return float(n_minus + 1.0), float(n_minus)


def ladder_amplitude(m: np.ndarray | int):
    """Amplitude of L_m, isolated so alternatives are a one-line change."""
    return np.sqrt(np.asarray(m, dtype=float) + 1.0)


@dataclass
class DissipatorContext:
    """Precomputed dissipator data for one (gamma, T, basis) combination."""

    n_max: int
    g: float
    temperature: float
    diagonal: bool = False

    omegas: np.ndarray = field(init=False)
    occ_plus: np.ndarray = field(init=False)
    occ_minus: np.ndarray = field(init=False)
    amp_plus: np.ndarray = field(init=False)    # entries of A (lowering)
    amp_minus: np.ndarray = field(init=False)   # entries of B (raising)
    diag_plus: np.ndarray = field(init=False)   # diagonal of A+A
    diag_minus: np.ndarray = field(init=False)  # diagonal of B+B
    cross_plus: float = field(init=False)       # (A+A)_{+1,-1} element

    def __post_init__(self):
        m = np.arange(self.n_max)
        self.omegas = m + 0.5
        if self.temperature > 0.0:
            ratio = np.minimum(self.omegas / self.temperature, 700.0)
            occ_minus = 1.0 / np.expm1(ratio)
            occ_minus[self.omegas / self.temperature >= 700.0] = 0.0
        else:
            occ_minus = np.zeros(self.n_max)
        self.occ_minus = occ_minus
        self.occ_plus = occ_minus + 1.0
        lam = ladder_amplitude(m)
        self.amp_plus = np.sqrt(self.occ_plus) * lam
        self.amp_minus = np.sqrt(self.occ_minus) * lam

        N = 2 * self.n_max + 1
        c = self.n_max
        levels = np.abs(np.arange(N) - c)
        # (A+A)_{jj} = occ_plus[|j|-1] * |j| for j != 0; (B+B)_{jj}:
        # occ_minus[|j|] * (|j|+1) for 0 < |j| < n_max, 2*occ_minus[0] at 0.
        dp = np.zeros(N)
        dm = np.zeros(N)
        nz = levels > 0
        dp[nz] = self.occ_plus[levels[nz] - 1] * levels[nz]
        inner = levels < self.n_max
        dm[inner & nz] = self.occ_minus[levels[inner & nz]] * (levels[inner & nz] + 1.0)
        dm[c] = 2.0 * self.occ_minus[0]
        self.diag_plus = dp
        self.diag_minus = dm
        # L_0 maps both |1> and |-1> onto |0>, which leaves one coherent
        # cross element in A+A between levels +1 and -1.
        self.cross_plus = float(self.occ_plus[0])

    # -- strided applications of A, B and their adjoints ------------------

    def _lower_left(self, rho: np.ndarray) -> np.ndarray:
        """A @ rho."""
        c, N = self.n_max, rho.shape[0]
        out = np.zeros_like(rho)
        out[c:N - 1, :] += self.amp_plus[:, None] * rho[c + 1:N, :]
        out[1:c + 1, :] += self.amp_plus[::-1][:, None] * rho[0:c, :]
        return out

    def _lower_right(self, rho: np.ndarray) -> np.ndarray:
        """rho @ A+."""
        c, N = self.n_max, rho.shape[0]
        out = np.zeros_like(rho)
        out[:, c:N - 1] += self.amp_plus[None, :] * rho[:, c + 1:N]
        out[:, 1:c + 1] += self.amp_plus[::-1][None, :] * rho[:, 0:c]
        return out

    def _raise_left(self, rho: np.ndarray) -> np.ndarray:
        """B @ rho."""
        c, N = self.n_max, rho.shape[0]
        out = np.zeros_like(rho)
        out[c + 1:N, :] += self.amp_minus[:, None] * rho[c:N - 1, :]
        out[0:c, :] += self.amp_minus[::-1][:, None] * rho[1:c + 1, :]
        return out

    def _raise_right(self, rho: np.ndarray) -> np.ndarray:
        """rho @ B+."""
        c, N = self.n_max, rho.shape[0]
        out = np.zeros_like(rho)
        out[:, c + 1:N] += self.amp_minus[None, :] * rho[:, c:N - 1]
        out[:, 0:c] += self.amp_minus[::-1][None, :] * rho[:, 1:c + 1]
        return out

    def _anticommutators(self, rho: np.ndarray) -> np.ndarray:
        """{A+A, rho} + {B+B, rho} using the near-diagonal structure."""
        d = self.diag_plus + self.diag_minus
        out = d[:, None] * rho + rho * d[None, :]
        c = self.n_max
        cp = self.cross_plus
        if cp != 0.0 and c >= 1:
            iu, il = c + 1, c - 1
            out[iu, :] += cp * rho[il, :]
            out[il, :] += cp * rho[iu, :]
            out[:, iu] += cp * rho[:, il]
            out[:, il] += cp * rho[:, iu]
        return out

    def _jumps_full(self, rho: np.ndarray) -> np.ndarray:
        return self._lower_right(self._lower_left(rho)) + \
            self._raise_right(self._raise_left(rho))

    def _jumps_diagonal(self, rho: np.ndarray) -> np.ndarray:
        """Jump part with the (m, m') sum restricted to m = m'."""
        c = self.n_max
        out = np.zeros_like(rho)
        m = np.arange(self.n_max)
        iu, il = c + m + 1, c - m - 1   # source levels +-(m+1)
        tu, tl = c + m, c - m           # target levels +-m
        wp = self.amp_plus ** 2
        out[tu, tu] += wp * rho[iu, iu]
        out[tl, tl] += wp * rho[il, il]
        out[tu, tl] += wp * rho[iu, il]
        out[tl, tu] += wp * rho[il, iu]
        wm = self.amp_minus ** 2
        out[iu, iu] += wm * rho[tu, tu]
        out[il, il] += wm * rho[tl, tl]
        out[iu, il] += wm * rho[tu, tl]
        out[il, iu] += wm * rho[tl, tu]
        return out

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """Dissipative right-hand side on a raw matrix."""
        if self.diagonal:
            jumps = self._jumps_diagonal(rho)
        else:
            jumps = self._jumps_full(rho)
        return self.g * (2.0 * jumps - self._anticommutators(rho))

    def max_rate(self) -> float:
        """Largest diagonal decay rate, for RK4 step-size safety checks."""
        return float(2.0 * self.g * np.max(self.diag_plus + self.diag_minus))


def build_dissipator_context(qp: QuantumParams) -> DissipatorContext:
    return DissipatorContext(
        n_max=qp.resolved_n_max,
        g=qp.g,
        temperature=qp.bath_temperature,
        diagonal=qp.diagonal_dissipator,
    )


def dissipator_rhs(rho: DensityMatrix, context: DissipatorContext) -> DensityMatrix:
    """Non-Hamiltonian part of d rho / dt for the current state."""
    if rho.n_max != context.n_max:
        raise ValueError("state and context bases differ")
    return DensityMatrix(context.rhs(rho.mat), rho.hbar_eff)
