"""Exact kick unitary and free-rotation phases.

The kick multiplies the wavefunction by exp(-i k [cos x + (a/2) cos(2x + phi)])
in position space. States live on the integer momentum lattice; the kick is
applied by zero-padding onto a position grid of M >= grid_factor * N points
(next power of two), multiplying by the diagonal phase, and transforming
back. M is large enough that the aliased Fourier coefficients are below
machine precision (they decay like Bessel functions past order ~k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import QuantumParams
from .basis import DensityMatrix

TWO_PI = 2.0 * np.pi


@dataclass
class KickUnitary:
    """One-kick unitary for a fixed basis and parameter set."""

    hbar_eff: float
    k: float
    a: float
    phi: float
    n_max: int
    grid_size: int

    def __post_init__(self):
        x = TWO_PI * np.arange(self.grid_size) / self.grid_size
        self._phase = np.exp(-1j * self.k * (np.cos(x) + 0.5 * self.a * np.cos(2.0 * x + self.phi)))
        n = np.arange(-self.n_max, self.n_max + 1)
        self._bins = np.mod(n, self.grid_size)

    @property
    def dimension(self) -> int:
        return 2 * self.n_max + 1

    def _apply_rows(self, mat: np.ndarray) -> np.ndarray:
        """U @ mat for an (N, ...) array of momentum-space kets in rows."""
        pad = np.zeros((self.grid_size, mat.shape[1]), dtype=complex)
        pad[self._bins, :] = mat
        position = np.fft.ifft(pad, axis=0)
        position *= self._phase[:, None]
        back = np.fft.fft(position, axis=0)
        return back[self._bins, :]

    def apply_to(self, rho: DensityMatrix) -> DensityMatrix:
        """Conjugation rho -> U rho U+."""
        left = self._apply_rows(rho.mat)
        both = self._apply_rows(left.conj().T).conj().T
        return DensityMatrix(both, rho.hbar_eff)

    def apply_adjoint_to(self, rho: DensityMatrix) -> DensityMatrix:
        """Conjugation rho -> U+ rho U (round-trip checks)."""
        inv = KickUnitary(self.hbar_eff, -self.k, self.a, self.phi, self.n_max, self.grid_size)
        return inv.apply_to(rho)

    def matrix(self) -> np.ndarray:
        """Dense matrix elements <n'|U|n> (Toeplitz in n' - n)."""
        coeff = np.fft.fft(self._phase) / self.grid_size
        n = np.arange(-self.n_max, self.n_max + 1)
        diff = np.mod(n[:, None] - n[None, :], self.grid_size)
        return coeff[diff]


def build_kick_unitary(qp: QuantumParams) -> KickUnitary:
    n_max = qp.resolved_n_max
    N = 2 * n_max + 1
    M = 1
    while M < qp.grid_factor * N:
        M *= 2
    return KickUnitary(qp.hbar_eff, qp.k, qp.base.a, qp.base.phi, n_max, M)


def free_phase(rho: DensityMatrix, qp: QuantumParams, fraction: float) -> DensityMatrix:
    """Free-rotor phases over `fraction` of one period.

    rho_{nn'} picks up exp(-i fraction hbar (n^2 - n'^2) / 2); populations
    are untouched, trace and Hermiticity are preserved exactly.
    """
    if not (0.0 < fraction <= 1.0):
        raise ValueError("fraction must lie in (0, 1]")
    n = rho.basis.levels.astype(float)
    ph = np.exp(-1j * fraction * qp.hbar_eff * n * n / 2.0)
    out = (ph[:, None] * rho.mat) * ph.conj()[None, :]
    # populations are mathematically untouched; keep them bit-exact rather
    # than multiplied by |ph|^2 = 1 - ulp
    np.fill_diagonal(out, np.diag(rho.mat))
    return DensityMatrix(out, rho.hbar_eff)
