import math

import numpy as np
import pytest

from ratchetsim.params import (
    QuantumParams,
    SimulationParams,
    ValidationError,
    coupling_constant,
    noise_std,
    validate,
    validate_quantum,
)


def make_params(**over):
    base = dict(K=7.0, a=0.7, phi=math.pi / 2, gamma=0.75, temperature=0.0, seed=1)
    base.update(over)
    return SimulationParams(**base)


class TestValidate:
    def test_standard_set_is_valid(self):
        p = make_params(gamma=0.75, temperature=0.0)
        assert validate(p) is p

    def test_gamma_out_of_range(self):
        with pytest.raises(ValidationError) as err:
            validate(make_params(gamma=1.2))
        assert err.value.field == "gamma"

    def test_negative_temperature(self):
        with pytest.raises(ValidationError) as err:
            validate(make_params(temperature=-0.1))
        assert err.value.field == "temperature"

    def test_nonpositive_kick(self):
        for bad in (0.0, -1.0):
            with pytest.raises(ValidationError) as err:
                validate(make_params(K=bad))
            assert err.value.field == "K"

    def test_idempotent(self):
        p = make_params()
        assert validate(validate(p)) is p

    def test_gamma_endpoints_allowed(self):
        validate(make_params(gamma=0.0))
        validate(make_params(gamma=1.0))


class TestCouplingConstant:
    def test_zero_dissipation(self):
        assert coupling_constant(0.0) == 0.0

    def test_value_at_three_quarters(self):
        assert coupling_constant(0.75) == pytest.approx(math.log(4.0), rel=1e-15)

    def test_divergence_at_one(self):
        with pytest.raises(ValidationError):
            coupling_constant(1.0)

    def test_monotone_increasing(self):
        grid = np.linspace(0.0, 0.99, 250)
        vals = [coupling_constant(g) for g in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestNoiseStd:
    def test_reference_variance_values(self):
        assert noise_std(0.75, 0.25) ** 2 == pytest.approx(0.125, rel=1e-12)
        assert noise_std(0.7, 0.05) ** 2 == pytest.approx(0.03, rel=1e-12)

    def test_zero_temperature(self):
        assert noise_std(0.75, 0.0) == 0.0

    def test_hamiltonian_limit(self):
        for T in (0.1, 1.0, 10.0):
            assert noise_std(1.0, T) == 0.0


class TestQuantumParams:
    def test_derived_quantities(self):
        qp = QuantumParams(base=make_params(), hbar_eff=0.494)
        assert qp.k == pytest.approx(7.0 / 0.494)
        assert qp.n_levels == 2 * qp.resolved_n_max + 1
        validate_quantum(qp)

    def test_damping_matches_retention(self):
        # one dissipative period must contract <p> by gamma: decay rate 2g
        qp = QuantumParams(base=make_params(gamma=0.75), hbar_eff=0.494)
        assert math.exp(-2.0 * qp.g) == pytest.approx(0.75, rel=1e-12)

    def test_explicit_coupling_override(self):
        qp = QuantumParams(base=make_params(), hbar_eff=0.494, coupling_g=0.3)
        assert qp.g == 0.3

    def test_invalid_hbar(self):
        with pytest.raises(ValidationError):
            validate_quantum(QuantumParams(base=make_params(), hbar_eff=0.0))

    def test_substeps_default_rule(self):
        qp = QuantumParams(base=make_params(), hbar_eff=0.494, coupling_g=2.3)
        assert qp.resolved_substeps == 100 * 3
