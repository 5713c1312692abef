"""Momentum basis and density-matrix state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import QuantumParams


@dataclass(frozen=True)
class MomentumBasis:
    """Integer momentum lattice n in [-n_max, n_max]; p = hbar_eff * n."""

    n_max: int

    @property
    def dimension(self) -> int:
        return 2 * self.n_max + 1

    @property
    def levels(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)


@dataclass
class DensityMatrix:
    """State rho on the truncated momentum basis.

    `mat` is a (N, N) complex array indexed so that row/column i holds
    level n = i - n_max.
    """

    mat: np.ndarray
    hbar_eff: float

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=complex)
        if self.mat.ndim != 2 or self.mat.shape[0] != self.mat.shape[1]:
            raise ValueError("rho must be a square matrix")
        if self.mat.shape[0] % 2 == 0:
            raise ValueError("dimension must be odd (levels -n_max..n_max)")

    @property
    def n_max(self) -> int:
        return (self.mat.shape[0] - 1) // 2

    @property
    def basis(self) -> MomentumBasis:
        return MomentumBasis(self.n_max)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.mat))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.mat.copy(), self.hbar_eff)


def build_initial_cell_state(qp: QuantumParams) -> DensityMatrix:
    """Diagonal state with equal weight on every level with |n| hbar <= pi.

    The basis must contain the cell: hbar_eff * n_max >= pi.
    """
    n_max = qp.resolved_n_max
    if qp.hbar_eff * n_max < np.pi:
        raise ValueError(
            f"basis too small for the initial cell: hbar_eff * n_max = "
            f"{qp.hbar_eff * n_max:.4f} < pi; increase n_max"
        )
    levels = np.arange(-n_max, n_max + 1)
    inside = np.abs(levels) * qp.hbar_eff <= np.pi
    n_in = int(inside.sum())
    mat = np.zeros((2 * n_max + 1, 2 * n_max + 1), dtype=complex)
    mat[inside, inside] = 1.0 / n_in
    return DensityMatrix(mat, qp.hbar_eff)


def quantum_current(rho: DensityMatrix) -> float:
    """J = tr(rho p) = sum_n hbar n rho_nn (real; imaginary part checked).

    Summed over +-n pairs so a population-symmetric state gives exactly 0.
    """
    diag = np.diag(rho.mat)
    c = rho.n_max
    m = np.arange(1, c + 1, dtype=float)
    j = rho.hbar_eff * np.sum(m * (diag[c + 1:] - diag[c - 1::-1]))
    if abs(j.imag) > 1e-10:
        raise ValueError(f"current has imaginary part {j.imag:.3e}; state is not Hermitian")
    return float(j.real)


def tail_population(rho: DensityMatrix, margin: int) -> float:
    """Total population on levels with |n| > n_max - margin."""
    if margin >= rho.mat.shape[0]:
        raise ValueError("margin must be smaller than the basis size")
    levels = np.abs(rho.basis.levels)
    mask = levels > rho.n_max - margin
    return float(np.real(np.diag(rho.mat))[mask].sum())
