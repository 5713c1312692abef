import json
import math
from pathlib import Path

import numpy as np
import pytest

from ratchetsim import io
from ratchetsim.config import ConfigError, parse_config, resolved_dict
from ratchetsim.observables import CurrentSeries
from ratchetsim.params import QuantumParams, SimulationParams
from ratchetsim.presets import preset_names, preset_path

GOOD_CONFIG = """
[experiment]
engine = classical
kind = current
output_prefix = demo
steps = 20
count = 50

[params]
K = 7.0
a = 0.7
phi = 1.5707963267948966
gamma = 0.75
temperature = 0.1
seed = 42
"""


def write_config(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestCsvDialect:
    def test_float_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        vals = np.concatenate([rng.standard_normal(50) * 10.0 ** rng.integers(-8, 8, 50),
                               [0.0, 1.0, -1.0, math.pi]])
        path = tmp_path / "t.csv"
        io.write_table(path, ["v"], [vals])
        cols, _ = io.read_table(path)
        assert np.array_equal(cols["v"], vals)

    def test_headers_and_meta(self, tmp_path):
        path = tmp_path / "t.csv"
        series = CurrentSeries(t=np.arange(3), J=np.array([0.0, 1.0, 2.0]),
                               stderr=np.array([0.1, 0.1, 0.1]))
        io.write_current_series(path, series, meta={"engine": "classical", "gamma": "0.75"})
        text = path.read_text()
        assert text.startswith("# columns: t, J, stderr\n# units: kicks, momentum, momentum\n")
        got, meta = io.read_current_series(path)
        assert meta["engine"] == "classical"
        assert meta["gamma"] == "0.75"
        assert np.array_equal(got.J, series.J)

    def test_quantum_series_nan_stderr(self, tmp_path):
        path = tmp_path / "q.csv"
        series = CurrentSeries(t=np.arange(3), J=np.zeros(3), stderr=np.full(3, np.nan))
        io.write_current_series(path, series)
        got, _ = io.read_current_series(path)
        assert np.isnan(got.stderr).all()

    def test_matrix_round_trip(self, tmp_path):
        vals = np.random.default_rng(2).standard_normal((6, 4))
        io.write_matrix(tmp_path / "m.csv", vals, meta={"kind": "poincare"})
        got, meta = io.read_matrix(tmp_path / "m.csv")
        assert np.array_equal(got, vals)
        assert meta["kind"] == "poincare"

    def test_missing_columns_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2,3\n")
        with pytest.raises(ValueError):
            io.read_table(p)


class TestCheckpoints:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        mat = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        h = bytes(range(32))
        path = tmp_path / "state.ck"
        io.write_checkpoint(path, mat, 0.494, 17, h)
        mat2, hbar, step, h2 = io.read_checkpoint(path)
        assert np.array_equal(mat2, mat)
        assert hbar == 0.494
        assert step == 17
        assert h2 == h

    def test_rejects_garbage(self, tmp_path):
        p = tmp_path / "x.ck"
        p.write_bytes(b"not a checkpoint")
        with pytest.raises(ValueError):
            io.read_checkpoint(p)

    def test_params_hash_tracks_physics_only(self):
        base = SimulationParams(K=7.0, a=0.7, phi=1.0, gamma=0.75, temperature=0.0, seed=1)
        qp = QuantumParams(base=base, hbar_eff=0.5, n_max=10)
        h1 = io.params_hash(base, qp)
        assert io.params_hash(base, qp) == h1
        qp2 = QuantumParams(base=base, hbar_eff=0.6, n_max=10)
        assert io.params_hash(base, qp2) != h1


class TestConfig:
    def test_good_config(self, tmp_path):
        cfg = parse_config(write_config(tmp_path, GOOD_CONFIG))
        assert cfg.engine == "classical"
        assert cfg.params.K == 7.0
        assert cfg.params.seed == 42
        assert cfg.steps == 20
        doc = resolved_dict(cfg)
        json.dumps(doc)  # manifest-ready

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(write_config(tmp_path, ""))

    def test_unknown_key_rejected(self, tmp_path):
        bad = GOOD_CONFIG.replace("count = 50", "count = 50\nbogus_knob = 1")
        with pytest.raises(ConfigError) as err:
            parse_config(write_config(tmp_path, bad))
        assert "bogus_knob" in str(err.value)

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(write_config(tmp_path, GOOD_CONFIG + "\n[mystery]\nx = 1\n"))

    def test_field_level_error_message(self, tmp_path):
        bad = GOOD_CONFIG.replace("gamma = 0.75", "gamma = 1.5")
        with pytest.raises(ConfigError) as err:
            parse_config(write_config(tmp_path, bad))
        assert "gamma" in str(err.value)

    def test_husimi_requires_quantum(self, tmp_path):
        bad = GOOD_CONFIG.replace("kind = current", "kind = husimi")
        with pytest.raises(ConfigError):
            parse_config(write_config(tmp_path, bad))

    def test_bifurcation_requires_classical(self, tmp_path):
        bad = GOOD_CONFIG.replace("engine = classical", "engine = quantum")
        bad = bad.replace("kind = current", "kind = bifurcation")
        bad += "\n[quantum]\nhbar_eff = 0.5\n"
        with pytest.raises(ConfigError):
            parse_config(bad and write_config(tmp_path, bad))

    def test_quantum_needs_hbar(self, tmp_path):
        bad = GOOD_CONFIG.replace("engine = classical", "engine = quantum")
        with pytest.raises(ConfigError) as err:
            parse_config(write_config(tmp_path, bad))
        assert "hbar_eff" in str(err.value)

    def test_grid_syntax(self, tmp_path):
        text = GOOD_CONFIG.replace("kind = current", "kind = asymptotic-scan")
        text = text.replace("steps = 20", "temperature_grid = 0:1:5")
        cfg = parse_config(write_config(tmp_path, text))
        assert np.allclose(cfg.temperature_grid, np.linspace(0, 1, 5))

    def test_non_gaussian_noise_rejected(self, tmp_path):
        bad = GOOD_CONFIG.replace("seed = 42", "seed = 42\nnoise_distribution = cauchy")
        with pytest.raises(ConfigError):
            parse_config(write_config(tmp_path, bad))


class TestPresets:
    def test_expected_names_present(self):
        names = preset_names()
        for required in ("fig1", "fig2-g070", "fig2-g075", "fig2-g090", "fig3", "fig4"):
            assert required in names
            assert f"{required}-small" in names or required == "fig1" and "fig1-small" in names

    def test_all_presets_validate(self):
        for name in preset_names():
            cfg = parse_config(preset_path(name))
            assert cfg.output_prefix
