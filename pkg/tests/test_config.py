"""Flat config files, presets, and the experiment builder."""

import pytest

from guardbeam import config as cfgmod
from guardbeam.errors import InvalidConfigError


def test_defaults_load_without_file():
    values = cfgmod.load_config(None)
    assert values["scene.frequency_ghz"] == 26.0
    assert values["scene.noise_avg_dbm"] == -93.8
    assert values["beam.guard.hpbw_deg"] is None
    assert values["detector.sigma_th"] == 0.03


def test_parse_overrides_and_comments():
    text = "\n".join(
        [
            "# comment line",
            "scene.tx_power_mw = 2.5   # trailing comment",
            "",
            "detector.beams = main,guard",
            "beam.guard.hpbw_deg = 7",
            "beam.guard.steering_deg = 14",
        ]
    )
    values = cfgmod.parse_config_text(text)
    assert values["scene.tx_power_mw"] == 2.5
    assert values["detector.beams"] == "main,guard"
    assert values["beam.guard.steering_deg"] == 14.0


def test_unknown_key_reports_line_number():
    with pytest.raises(InvalidConfigError, match="line 2"):
        cfgmod.parse_config_text("run.seed = 1\nbogus.key = 3\n")


def test_malformed_line_reports_line_number():
    with pytest.raises(InvalidConfigError, match="line 1"):
        cfgmod.parse_config_text("just words\n")


def test_bad_value_rejected():
    with pytest.raises(InvalidConfigError):
        cfgmod.parse_config_text("run.seed = not_a_number\n")


def test_none_accepted_for_optional_floats():
    values = cfgmod.parse_config_text("beam.guard.hpbw_deg = none\n")
    assert values["beam.guard.hpbw_deg"] is None


def test_config_round_trip_is_canonical():
    values = cfgmod.preset_values("guard13_7")
    text = cfgmod.config_to_text(values)
    assert cfgmod.parse_config_text(text) == values
    assert cfgmod.config_to_text(cfgmod.parse_config_text(text)) == text


def test_round_trip_builds_identical_experiment():
    values = cfgmod.preset_values("guard7_14")
    rebuilt = cfgmod.parse_config_text(cfgmod.config_to_text(values))
    assert cfgmod.build_experiment(values) == cfgmod.build_experiment(rebuilt)


def test_presets_cover_reference_configurations():
    assert set(cfgmod.PRESETS) == {
        "main7",
        "main13",
        "guard7_7",
        "guard13_7",
        "guard7_14",
        "guard13_14",
    }
    main13 = cfgmod.preset_values("main13")
    assert main13["detector.sigma_th"] == 0.1
    for name in ("guard7_7", "guard13_7", "guard7_14", "guard13_14"):
        values = cfgmod.preset_values(name)
        assert values["detector.beams"] == "main,guard"
        assert values["detector.sigma_th"] == 0.03


def test_unknown_preset_rejected():
    with pytest.raises(InvalidConfigError):
        cfgmod.preset_values("mystery")


def test_build_experiment_defaults():
    cfg = cfgmod.build_experiment(cfgmod.load_config(None))
    assert cfg.geometry.d_o == 5.0
    assert cfg.scene.frequency_hz == 26.0e9
    assert cfg.detector.beam_subset == ("main",)
    assert len(cfg.trajectories) == 3
    starts = [t.start for t in cfg.trajectories]
    assert starts == [(1.25, 2.0), (2.5, 2.0), (3.75, 2.0)]
    assert all(t.direction == (0.0, -1.0) for t in cfg.trajectories)


def test_build_experiment_guard_requires_both_fields():
    values = cfgmod.load_config(None, {"beam.guard.hpbw_deg": "7"})
    with pytest.raises(InvalidConfigError):
        cfgmod.build_experiment(values)


def test_build_experiment_rejects_bad_trajectory_fraction():
    values = cfgmod.load_config(None, {"run.trajectories": "0.5,1.5"})
    with pytest.raises(InvalidConfigError):
        cfgmod.build_experiment(values)


def test_build_experiment_rejects_bad_start_distance():
    values = cfgmod.load_config(None, {"run.start_distance_m": "-1"})
    with pytest.raises(InvalidConfigError):
        cfgmod.build_experiment(values)
