"""Flat key-value configuration files and named parameter presets.

A config file is plain text, one ``dotted.key = value`` per line, ``#``
comments allowed.  Unknown keys are a hard error; missing keys fall back to
the defaults below and are included in the effective-config echo.
"""

from __future__ import annotations

import math
from typing import Mapping

from .beampattern import BeamSpec
from .channel import SceneConfig
from .detector import DetectorConfig
from .errors import InvalidConfigError
from .geometry import LinkGeometry
from .scenario import ExperimentConfig, Trajectory

# key -> (kind, default).  kind "ofloat" accepts "none" for an absent value.
_SCHEMA: dict[str, tuple[str, object]] = {
    "scene.frequency_ghz": ("float", 26.0),
    "scene.tx_power_mw": ("float", 1.0),
    "scene.reflection_coeff": ("float", 0.62),
    "scene.noise_avg_dbm": ("float", -93.8),
    "scene.n_reflectors": ("int", 1),
    "link.distance_m": ("float", 5.0),
    "blocker.radius_m": ("float", 0.15),
    "beam.tx.hpbw_deg": ("float", 7.0),
    "beam.main.hpbw_deg": ("float", 7.0),
    "beam.guard.hpbw_deg": ("ofloat", None),
    "beam.guard.steering_deg": ("ofloat", None),
    "detector.window_ms": ("int", 100),
    "detector.sample_interval_ms": ("int", 10),
    "detector.sigma_th": ("float", 0.03),
    "detector.beams": ("str", "main"),
    "run.duration_s": ("float", 5.0),
    "run.monte_carlo": ("int", 200),
    "run.seed": ("int", 1),
    "run.speed_mps": ("float", 1.0),
    "run.speed_jitter": ("float", 0.2),
    "run.start_distance_m": ("float", 2.0),
    "run.trajectories": ("str", "0.25,0.5,0.75"),
}

# Beam configurations and simulation thresholds of the reference parameter
# table: main-only at two widths plus four guard variants.
PRESETS: dict[str, dict[str, str]] = {
    "main7": {"detector.sigma_th": "0.03"},
    "main13": {"beam.main.hpbw_deg": "13", "detector.sigma_th": "0.1"},
    "guard7_7": {
        "beam.guard.hpbw_deg": "7",
        "beam.guard.steering_deg": "7",
        "detector.beams": "main,guard",
        "detector.sigma_th": "0.03",
    },
    "guard13_7": {
        "beam.guard.hpbw_deg": "13",
        "beam.guard.steering_deg": "7",
        "detector.beams": "main,guard",
        "detector.sigma_th": "0.03",
    },
    "guard7_14": {
        "beam.guard.hpbw_deg": "7",
        "beam.guard.steering_deg": "14",
        "detector.beams": "main,guard",
        "detector.sigma_th": "0.03",
    },
    "guard13_14": {
        "beam.guard.hpbw_deg": "13",
        "beam.guard.steering_deg": "14",
        "detector.beams": "main,guard",
        "detector.sigma_th": "0.03",
    },
}


def _parse_value(key: str, raw):
    kind, _ = _SCHEMA[key]
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "ofloat":
            if raw is None or (isinstance(raw, str) and raw.lower() == "none"):
                return None
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_config_text(text: str) -> dict[str, object]:
    """Parse config file text into a fully-populated typed key-value dict."""
    values = {key: default for key, (_, default) in _SCHEMA.items()}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise InvalidConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise InvalidConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def load_config(
    path: str | None = None, overrides: Mapping[str, str] | None = None
) -> dict[str, object]:
    """Defaults, then the config file (if any), then explicit overrides."""
    if path is None:
        values = {key: default for key, (_, default) in _SCHEMA.items()}
    else:
        with open(path, "r", encoding="utf-8") as fh:
            values = parse_config_text(fh.read())
    for key, raw in (overrides or {}).items():
        if key not in _SCHEMA:
            raise InvalidConfigError(f"unknown key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def config_to_text(values: Mapping[str, object]) -> str:
    """Canonical effective-config echo; re-parsing yields the same dict."""
    lines = [f"{key} = {_format_value(values[key])}" for key in sorted(_SCHEMA)]
    return "\n".join(lines) + "\n"


def preset_values(name: str) -> dict[str, object]:
    if name not in PRESETS:
        raise InvalidConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return load_config(None, PRESETS[name])


def build_experiment(values: Mapping[str, object]) -> ExperimentConfig:
    """Turn a typed config dict into an ExperimentConfig."""
    scene = SceneConfig(
        frequency_hz=values["scene.frequency_ghz"] * 1e9,
        tx_power_mw=values["scene.tx_power_mw"],
        reflection_coeff=values["scene.reflection_coeff"],
        noise_avg_dbm=values["scene.noise_avg_dbm"],
        n_reflectors=values["scene.n_reflectors"],
    )
    d_o = values["link.distance_m"]
    geometry = LinkGeometry(tx_position=(0.0, 0.0), rx_position=(d_o, 0.0))
    tx_spec = BeamSpec(hpbw_deg=values["beam.tx.hpbw_deg"], role="tx")
    beam_specs: list[tuple[str, BeamSpec]] = [
        ("main", BeamSpec(hpbw_deg=values["beam.main.hpbw_deg"], role="rx_main"))
    ]
    guard_hpbw = values["beam.guard.hpbw_deg"]
    guard_phi = values["beam.guard.steering_deg"]
    if (guard_hpbw is None) != (guard_phi is None):
        raise InvalidConfigError("guard beam needs both beam.guard.hpbw_deg and .steering_deg")
    if guard_hpbw is not None:
        beam_specs.append(
            ("guard", BeamSpec(hpbw_deg=guard_hpbw, steering_deg=guard_phi, role="rx_guard"))
        )
    subset = tuple(part.strip() for part in str(values["detector.beams"]).split(",") if part.strip())
    detector = DetectorConfig(
        threshold=values["detector.sigma_th"],
        window_ms=values["detector.window_ms"],
        sample_interval_ms=values["detector.sample_interval_ms"],
        beam_subset=subset,
    )
    fractions = []
    for part in str(values["run.trajectories"]).split(","):
        part = part.strip()
        if not part:
            continue
        f = float(part)
        if not 0.0 < f < 1.0:
            raise InvalidConfigError(f"trajectory fraction {f} outside (0, 1)")
        fractions.append(f)
    if not fractions:
        raise InvalidConfigError("run.trajectories must name at least one crossing fraction")
    start_r = values["run.start_distance_m"]
    trajectories = tuple(
        Trajectory(start=(f * d_o, start_r), direction=(0.0, -1.0), speed_mps=values["run.speed_mps"])
        for f in fractions
    )
    if math.isnan(start_r) or start_r <= 0.0:
        raise InvalidConfigError("run.start_distance_m must be positive")
    return ExperimentConfig(
        scene=scene,
        geometry=geometry,
        tx_spec=tx_spec,
        beam_specs=tuple(beam_specs),
        detector=detector,
        trajectories=trajectories,
        blocker_radius_m=values["blocker.radius_m"],
        duration_s=values["run.duration_s"],
        sample_interval_ms=values["detector.sample_interval_ms"],
        monte_carlo_runs=values["run.monte_carlo"],
        seed=values["run.seed"],
        speed_jitter=values["run.speed_jitter"],
    )
