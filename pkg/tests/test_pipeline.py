import json

import pytest

from mimowaveforms.exceptions import ConfigurationError, SingularFilterError
from mimowaveforms.pipeline import RunManifest, SimConfig, load_config, new_simulation_run, validate_config


class TestValidation:
    def test_defaults_are_the_desk_preset(self):
        config = validate_config({"gfdm_npi_calibration": "analytic"})
        assert isinstance(config, SimConfig)
        assert (config.K, config.M, config.B, config.U) == (64, 14, 8, 8)
        assert config.pam_subsymbols == 28
        assert config.psd_active == 48
        assert config.psd_segment_length == 512

    def test_full_preset(self):
        config = validate_config({"preset": "full", "waveforms": ["ofdm", "fbmc"]})
        assert (config.K, config.M, config.M_pam) == (1200, 14, 28)

    def test_explicit_values_override_the_preset(self):
        config = validate_config({"preset": "full", "K": 128, "waveforms": "ofdm"})
        assert config.K == 128
        assert config.waveforms == ("ofdm",)

    def test_coercion(self):
        config = validate_config({"waveforms": ["ofdm"], "snr_db": 5, "antennas": [8.0, 16], "trials": 10.0})
        assert config.snr_db == (5.0,)
        assert config.antennas == (8, 16)
        assert config.trials == 10

    @pytest.mark.parametrize(
        "params",
        [
            {"unknown_key": 1},
            {"schema_version": 2},
            {"preset": "huge"},
            {"waveforms": ["ofdm", "wavelet"]},
            {"waveforms": ["fbmc"], "K": 63},
            {"waveforms": ["ofdm"], "B": 4, "U": 8},
            {"waveforms": ["ofdm"], "modulation_order": 32},
            {"waveforms": ["ofdm"], "snr_db": [300.0]},
            {"waveforms": ["ofdm"], "trials": 2.5},
            {"waveforms": ["ofdm"], "papr_oversample": 3},
            {"waveforms": ["ofdm"], "output_format": "xlsx"},
            {"waveforms": ["ofdm"], "K_active": 65},
            {"waveforms": ["gfdm"], "M": 1},
            {"waveforms": ["ofdm"], "antennas": [8, 8.5]},
            {"waveforms": ["ofdm"], "log_level": "LOUD"},
        ],
    )
    def test_rejected(self, params):
        with pytest.raises(ConfigurationError):
            validate_config(params)

    def test_singular_gfdm_prototype(self, monkeypatch):
        def singular(*args, **kwargs):
            raise SingularFilterError("zero bin")

        monkeypatch.setattr("mimowaveforms.waveforms.gfdm.make_prototype", singular)
        with pytest.raises(ConfigurationError):
            validate_config({"waveforms": ["gfdm"]})
        validate_config({"waveforms": ["ofdm"]})

    def test_config_is_hashable(self):
        a = validate_config({"waveforms": ["ofdm"], "snr_db": [0, 10]})
        b = validate_config({"waveforms": ("ofdm",), "snr_db": (0.0, 10.0)})
        assert a == b
        assert hash(a) == hash(b)


class TestLoading:
    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"waveforms": ["ofdm"], "trials": 7, "master_seed": 3}))
        config = load_config(path, master_seed=9, trials=None)
        assert config.trials == 7
        assert config.master_seed == 9

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "missing.json")

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_json_echo_round_trip(self):
        config = validate_config({"waveforms": ["ofdm", "scfdma"], "snr_db": [0, 5]})
        assert validate_config(json.loads(config.to_json())) == config


class TestRun:
    def test_debug_run_id(self, tmp_path):
        config = validate_config({"waveforms": ["ofdm"], "debug": True, "output_dir": str(tmp_path)})
        run = new_simulation_run(config)
        assert run.run_id == "00000000-0000-0000-0000-000000000000"
        assert run.output_dir == tmp_path

    def test_random_run_ids(self):
        config = validate_config({"waveforms": ["ofdm"]})
        assert new_simulation_run(config).run_id != new_simulation_run(config).run_id

    def test_manifest_round_trip(self):
        manifest = RunManifest(
            config_hash="ab" * 32,
            seed=5,
            version="0.1.0",
            checksums={"errors.csv": "cd" * 32},
            wall_clock={"simulate": 1.25},
            failures=["antennas=4.0: Channel requires B >= U >= 1"],
            counts={"link_shards": 4, "link_trials": 12},
        )
        text = manifest.to_text()
        assert "seed = 5\n" in text
        assert "count.link_trials = 12\n" in text
        assert RunManifest.from_text(text) == manifest
