import math

import numpy as np
import pytest

from ratchetsim.params import QuantumParams, SimulationParams
from ratchetsim.quantum import (
    DensityMatrix,
    PeriodDiagnostics,
    SubstepStabilityError,
    TailOverflowError,
    build_initial_cell_state,
    build_kick_unitary,
    evolve,
    evolve_one_period,
    quantum_current,
    tail_population,
)
from ratchetsim.quantum.bath import build_dissipator_context


def make_qp(K=7.0, gamma=0.75, temperature=0.0, hbar=0.9, n_max=None, g=None,
            substeps=None, **kw):
    base = SimulationParams(K=K, a=0.7, phi=math.pi / 2, gamma=gamma,
                            temperature=temperature, seed=1)
    return QuantumParams(base=base, hbar_eff=hbar, n_max=n_max, coupling_g=g,
                         substeps=substeps, **kw)


def kickless_qp(**kw):
    # K = 0 bypasses validation on purpose: the kick-free limit is exercised
    # at the operation level (evolve_one_period), not through validated runs
    kw.setdefault("gamma", 0.75)
    base = SimulationParams(K=0.0, a=0.7, phi=math.pi / 2, gamma=kw.pop("gamma"),
                            temperature=kw.pop("temperature", 0.0), seed=1)
    return QuantumParams(base=base, hbar_eff=kw.pop("hbar", 0.9),
                         n_max=kw.pop("n_max", 8), coupling_g=kw.pop("g", None))


class TestCellState:
    def test_level_counts(self):
        qp = make_qp(hbar=0.494, n_max=60)
        rho = build_initial_cell_state(qp)
        pops = rho.populations()
        occupied = pops > 0
        assert occupied.sum() == 13
        assert np.allclose(pops[occupied], 1.0 / 13.0)

        qp = make_qp(hbar=0.055, n_max=80)
        rho = build_initial_cell_state(qp)
        assert (rho.populations() > 0).sum() == 115

    def test_initial_current_zero(self):
        qp = make_qp(hbar=0.494, n_max=60)
        assert quantum_current(build_initial_cell_state(qp)) == 0.0

    def test_basis_must_hold_cell(self):
        with pytest.raises(ValueError):
            build_initial_cell_state(make_qp(hbar=0.2, n_max=10))


class TestQuantumCurrent:
    def test_eigenstate_expectation(self):
        N = 21
        mat = np.zeros((N, N), dtype=complex)
        mat[10 + 5, 10 + 5] = 1.0
        assert quantum_current(DensityMatrix(mat, 0.494)) == pytest.approx(2.47, abs=1e-12)

    def test_symmetric_state_carries_no_current(self):
        N = 21
        pops = np.exp(-np.abs(np.arange(-10, 11)) / 2.0)
        mat = np.diag(pops / pops.sum()).astype(complex)
        assert quantum_current(DensityMatrix(mat, 0.4)) == 0.0


class TestTailPopulation:
    def test_fresh_cell_state_has_no_tail(self):
        qp = make_qp(hbar=0.494, n_max=60)
        rho = build_initial_cell_state(qp)
        assert tail_population(rho, margin=10) == 0.0

    def test_definition(self):
        N = 7
        mat = np.diag([0.1, 0.0, 0.2, 0.4, 0.2, 0.0, 0.1]).astype(complex)
        rho = DensityMatrix(mat, 1.0)
        # margin 1: levels |n| > 2, i.e. n = +-3
        assert tail_population(rho, 1) == pytest.approx(0.2)
        # margin n_max - 1 = 2: levels |n| > 1
        assert tail_population(rho, 2) == pytest.approx(0.2)
        assert tail_population(rho, 3) == pytest.approx(0.6)


class TestKicklessRelaxation:
    def test_bright_sector_relaxes_to_ground(self):
        # a parity-symmetric superposition state carries no dark component
        # and decays fully onto |0><0|, monotonically
        qp = kickless_qp(g=0.5, n_max=8, hbar=0.9)
        ctx = build_dissipator_context(qp)
        kick = build_kick_unitary(qp)
        N, c = 17, 8
        b = np.zeros(N, dtype=complex)
        b[c + 3] = b[c - 3] = 1.0 / math.sqrt(2.0)
        rho = DensityMatrix(np.outer(b, b.conj()), qp.hbar_eff)
        ground = []
        for _ in range(100):
            rho = evolve_one_period(rho, qp, ctx, kick=kick)
            ground.append(rho.populations()[c])
        assert all(b2 >= a2 - 1e-12 for a2, b2 in zip(ground, ground[1:]))
        assert ground[-1] > 0.999

    def test_cell_state_keeps_dark_mass(self):
        # the diagonal cell state holds 1/n_cell of dark mass per occupied
        # +-m pair, which the kick-free dynamics conserves: |0> saturates at
        # (1 + n_pairs) / n_cell instead of 1
        qp = kickless_qp(g=0.5, n_max=8, hbar=0.9)
        ctx = build_dissipator_context(qp)
        kick = build_kick_unitary(qp)
        rho = build_initial_cell_state(qp)   # 7 levels: |n| <= 3
        for _ in range(150):
            rho = evolve_one_period(rho, qp, ctx, kick=kick)
        assert rho.populations()[8] == pytest.approx(4.0 / 7.0, abs=1e-9)

    def test_kickless_momentum_contraction(self):
        # <p> contracts by exactly gamma per period regardless of the dark
        # sector (that sector carries no momentum)
        qp = kickless_qp(gamma=0.6, n_max=12, hbar=0.9)
        ctx = build_dissipator_context(qp)
        kick = build_kick_unitary(qp)
        N, c = 25, 12
        mat = np.zeros((N, N), dtype=complex)
        mat[c + 5, c + 5] = 1.0
        rho = DensityMatrix(mat, qp.hbar_eff)
        p0 = quantum_current(rho)
        for _ in range(3):
            rho = evolve_one_period(rho, qp, ctx, kick=kick)
        assert quantum_current(rho) / p0 == pytest.approx(0.6 ** 3, rel=1e-9)


class TestGuards:
    def test_tail_overflow_raises(self):
        # an absurdly strict threshold trips the guard on a healthy run
        qp = make_qp(hbar=0.9, tail_threshold=1e-30, tail_margin=20)
        rho = build_initial_cell_state(qp)
        with pytest.raises(TailOverflowError):
            evolve(rho, qp, 20)

    def test_substep_stability_guard(self):
        qp = make_qp(hbar=0.9, n_max=60, substeps=1, g=1.0)
        rho = build_initial_cell_state(qp)
        with pytest.raises(SubstepStabilityError):
            evolve(rho, qp, 2)


class TestEvolve:
    def test_invariants_along_trajectory(self):
        qp = make_qp(hbar=0.9, temperature=0.1)
        rho = build_initial_cell_state(qp)
        rho, series, diag = evolve(rho, qp, 15)
        worst = diag.worst()
        assert worst["max_trace_drift"] < 1e-8
        assert worst["max_herm_residual"] < 1e-12
        assert worst["max_tail"] < 1e-6
        assert len(series) == 16
        assert np.isnan(series.stderr).all()

    def test_positivity_spot_check(self):
        qp = make_qp(hbar=0.9)
        rho = build_initial_cell_state(qp)
        rho, _, _ = evolve(rho, qp, 10)
        assert np.linalg.eigvalsh(rho.mat).min() > -1e-8

    def test_substep_convergence_short(self):
        # halving the step changes J(t = 10) at the 1e-4 relative level
        qp1 = make_qp(hbar=0.9, substeps=100)
        qp2 = make_qp(hbar=0.9, substeps=200)
        r1, s1, _ = evolve(build_initial_cell_state(qp1), qp1, 10)
        r2, s2, _ = evolve(build_initial_cell_state(qp2), qp2, 10)
        assert abs(s1.J[-1] - s2.J[-1]) / abs(s2.J[-1]) < 1e-4

    def test_kick_last_variant_runs(self):
        qp = make_qp(hbar=0.9, kick_last=True)
        rho = build_initial_cell_state(qp)
        rho, series, _ = evolve(rho, qp, 5)
        qp2 = make_qp(hbar=0.9)
        rho2, series2, _ = evolve(build_initial_cell_state(qp2), qp2, 5)
        # the phase convention shifts the transient but both must be finite
        assert np.isfinite(series.J).all() and np.isfinite(series2.J).all()

    def test_resume_matches_straight_run(self):
        qp = make_qp(hbar=0.9)
        rho0 = build_initial_cell_state(qp)
        rho_a, series_a, _ = evolve(rho0.copy(), qp, 8)

        rho_mid, series_mid, _ = evolve(rho0.copy(), qp, 4)
        rho_b, series_b, _ = evolve(rho_mid, qp, 8, start_period=4,
                                    current_history=list(series_mid.J))
        assert np.max(np.abs(series_a.J - series_b.J)) < 1e-12
        assert np.max(np.abs(rho_a.mat - rho_b.mat)) < 1e-12
