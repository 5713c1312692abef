import math

import numpy as np
import pytest

from ratchetsim.params import QuantumParams, SimulationParams
from ratchetsim.quantum import DensityMatrix, build_kick_unitary, free_phase


def make_qp(K=7.0, a=0.7, hbar=5.0, n_max=8, phi=math.pi / 2):
    base = SimulationParams(K=K, a=a, phi=phi, gamma=0.75, temperature=0.0, seed=1)
    return QuantumParams(base=base, hbar_eff=hbar, n_max=n_max)


def random_state(n_max, seed=0, hbar=0.5):
    rng = np.random.default_rng(seed)
    N = 2 * n_max + 1
    m = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(rho, hbar)


def bessel_series(m: int, x: float) -> float:
    """Independent power-series evaluation of J_m(x)."""
    if m < 0:
        return (-1.0) ** (-m) * bessel_series(-m, x)
    total = 0.0
    term_sign = 1.0
    for j in range(0, 60):
        num = (x / 2.0) ** (m + 2 * j)
        den = math.factorial(j) * math.factorial(m + j)
        term = term_sign * num / den
        total += term
        term_sign = -term_sign
        if abs(term) < 1e-20:
            break
    return total


class TestKickUnitary:
    def test_zero_kick_is_identity(self):
        base = SimulationParams(K=0.0, a=0.7, phi=math.pi / 2, gamma=0.75,
                                temperature=0.0, seed=1)
        qp = QuantumParams(base=base, hbar_eff=0.5, n_max=8)
        kick = build_kick_unitary(qp)
        rho = random_state(8)
        out = kick.apply_to(rho)
        assert np.max(np.abs(out.mat - rho.mat)) < 1e-13

    def test_unitary_round_trip(self):
        # random state supported away from the truncation edge: the round
        # trip must reproduce it to machine precision
        qp = make_qp(hbar=2.0, n_max=40)
        kick = build_kick_unitary(qp)
        inner = random_state(12, seed=3)
        N = 2 * 40 + 1
        mat = np.zeros((N, N), dtype=complex)
        mat[40 - 12:40 + 13, 40 - 12:40 + 13] = inner.mat
        rho = DensityMatrix(mat, 2.0)
        back = kick.apply_adjoint_to(kick.apply_to(rho))
        assert np.max(np.abs(back.mat - rho.mat)) < 1e-10

    def test_matrix_elements_match_bessel_expansion(self):
        # a = 0: <n'|U|n> = (-i)^(n'-n) J_{n'-n}(k), from the plane-wave
        # expansion of exp(-i k cos x); the oracle is an independent series
        qp = make_qp(a=0.0, hbar=5.0, n_max=8)
        k = qp.k
        U = build_kick_unitary(qp).matrix()
        n = np.arange(-8, 9)
        for i, ni in enumerate(n):
            for j, nj in enumerate(n):
                m = ni - nj
                expected = (-1j) ** m * bessel_series(m, k)
                assert abs(U[i, j] - expected) < 1e-8

    def test_trace_preserved_inside_basis(self):
        qp = make_qp(hbar=2.0, n_max=30)
        kick = build_kick_unitary(qp)
        N = 61
        rho = np.zeros((N, N), dtype=complex)
        rho[30, 30] = 1.0
        out = kick.apply_to(DensityMatrix(rho, 2.0))
        assert abs(np.trace(out.mat) - 1.0) < 1e-12


class TestFreePhase:
    def test_diagonal_state_unchanged(self):
        qp = make_qp()
        N = 17
        rho = np.diag(np.linspace(0.0, 1.0, N)).astype(complex)
        rho /= np.trace(rho)
        out = free_phase(DensityMatrix(rho, qp.hbar_eff), qp, 1.0)
        assert np.array_equal(out.mat, rho)

    def test_phase_additivity(self):
        qp = make_qp()
        rho = random_state(8, seed=7)
        once = free_phase(rho, qp, 1.0)
        twice = free_phase(free_phase(rho, qp, 0.5), qp, 0.5)
        assert np.max(np.abs(once.mat - twice.mat)) < 1e-14

    def test_trace_and_hermiticity_exact(self):
        qp = make_qp()
        rho = random_state(8, seed=9)
        out = free_phase(rho, qp, 0.7)
        assert out.trace == pytest.approx(rho.trace, abs=1e-14)
        assert out.hermiticity_residual() < 1e-14

    def test_fraction_validation(self):
        qp = make_qp()
        with pytest.raises(ValueError):
            free_phase(random_state(8), qp, 0.0)
