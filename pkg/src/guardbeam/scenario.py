"""End-to-end experiments: trajectory runs, field-of-view grids, range and
threshold sweeps.

Monte-Carlo runs are independent work units; per-run noise substreams are
derived from (experiment seed, run index), so results are bit-identical for
a fixed config regardless of worker count.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .beampattern import BeamPattern, BeamSpec, synthesize
from .channel import (
    NoiseModel,
    SceneConfig,
    amplitude_gain,
    los_component,
    main_beam_baseline,
)
from .detector import (
    DetectionOutcome,
    DetectorConfig,
    OutcomeClass,
    calibrate_threshold,
    classify,
    detect,
)
from .errors import InvalidConfigError, InvalidScenarioError
from .geometry import BlockerBody, LinkGeometry, segment_distance

# Testbed-reported mean prediction times (ms) per receive configuration,
# kept for report annotation only; desk-scale simulation is not expected to
# reproduce them.
MEASURED_REFERENCE_MEAN_TP_MS = {
    "main_only": 110.6,
    "guard_phi7": 166.97,
    "guard_phi14": 119.8,
}


@dataclass(frozen=True)
class Trajectory:
    """Straight blocker path: start point, direction, nominal speed."""

    start: tuple[float, float]
    direction: tuple[float, float]
    speed_mps: float = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment."""

    scene: SceneConfig
    geometry: LinkGeometry
    tx_spec: BeamSpec
    beam_specs: tuple[tuple[str, BeamSpec], ...]
    detector: DetectorConfig
    trajectories: tuple[Trajectory, ...]
    blocker_radius_m: float = 0.15
    duration_s: float = 5.0
    sample_interval_ms: int = 10
    monte_carlo_runs: int = 200
    seed: int = 1
    speed_jitter: float = 0.2
    eligibility_range_m: float = 2.0

    def __post_init__(self) -> None:
        ids = [bid for bid, _ in self.beam_specs]
        if "main" not in ids:
            raise InvalidConfigError("a 'main' beam is required")
        if len(set(ids)) != len(ids):
            raise InvalidConfigError("duplicate beam ids")
        missing = set(self.detector.beam_subset) - set(ids)
        if missing:
            raise InvalidConfigError(f"detector references undeclared beams: {sorted(missing)}")
        if self.detector.sample_interval_ms != self.sample_interval_ms:
            raise InvalidConfigError("detector and experiment sample intervals differ")
        n_samples = round(self.duration_s * 1000.0 / self.sample_interval_ms)
        if n_samples < self.detector.window_samples:
            raise InvalidConfigError("duration shorter than one detection window")

    @property
    def beam_ids(self) -> tuple[str, ...]:
        return tuple(bid for bid, _ in self.beam_specs)


@functools.lru_cache(maxsize=64)
def _patterns_cached(
    tx_spec: BeamSpec, beam_specs: tuple[tuple[str, BeamSpec], ...]
) -> tuple[BeamPattern, tuple[tuple[str, BeamPattern], ...]]:
    tx = synthesize(tx_spec)
    rx = tuple((bid, synthesize(spec)) for bid, spec in beam_specs)
    return tx, rx


def build_patterns(cfg: ExperimentConfig) -> tuple[BeamPattern, dict[str, BeamPattern]]:
    """Synthesized Tx pattern and per-beam Rx patterns (cached per spec)."""
    tx, rx = _patterns_cached(cfg.tx_spec, cfg.beam_specs)
    return tx, dict(rx)


def run_seed_for(cfg_seed: int, run_index: int) -> int:
    """Stable 64-bit per-run noise seed derived from the experiment seed."""
    ss = np.random.SeedSequence(entropy=(cfg_seed, run_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _nlos_array(
    geom: LinkGeometry,
    points: np.ndarray,
    tx: BeamPattern,
    rx: BeamPattern,
    scene: SceneConfig,
    body: BlockerBody | None,
) -> np.ndarray:
    """Vectorized reflected-path sum for an (N, 2) array of blocker centers."""
    if scene.reflection_coeff == 0.0 or scene.n_reflectors == 0:
        return np.zeros(points.shape[0], dtype=complex)
    offsets = [np.zeros(2)]
    if scene.n_reflectors > 1:
        if body is None:
            raise InvalidConfigError("n_reflectors > 1 requires a blocker body")
        ang = 2.0 * np.pi * np.arange(scene.n_reflectors - 1) / (scene.n_reflectors - 1)
        offsets += [body.radius * np.array([math.cos(a), math.sin(a)]) for a in ang]
    lam = scene.wavelength_m
    total = np.zeros(points.shape[0], dtype=complex)
    for off in offsets:
        s, r = geom.to_local(points + off[None, :])
        sign = np.sign(r)
        theta_t = sign * np.arctan2(np.abs(r), s)
        theta_r = sign * np.arctan2(np.abs(r), geom.d_o - s)
        d_n = np.hypot(s, r) + np.hypot(geom.d_o - s, r)
        g = amplitude_gain(tx, theta_t) * amplitude_gain(rx, theta_r)
        total += g * scene.reflection_coeff * (lam / (4.0 * np.pi * d_n)) * np.exp(
            -2j * np.pi * d_n / lam
        )
    return total


@dataclass(frozen=True)
class SimulationRun:
    """Per-beam normalized complex traces plus scene truth for one run."""

    t_ms: np.ndarray
    samples: dict[str, np.ndarray]
    t_s_ms: int | None
    r_signed: np.ndarray
    positions: np.ndarray
    baseline: float
    trajectory_index: int
    speed_mps: float
    noise_seed: int
    eligibility_start_ms: int | None


def simulate_trajectory(
    cfg: ExperimentConfig,
    trajectory_index: int,
    noise_seed: int,
    speed_mps: float | None = None,
    noiseless: bool = False,
) -> SimulationRun:
    """Advance a blocker along one trajectory, sampling every beam per step.

    The simulation stops at the shadowing time t_s (exclusive): the
    shadowing-period channel is out of model.  Traces are complex received
    values normalized by the unblocked main-beam amplitude.
    """
    traj = cfg.trajectories[trajectory_index]
    speed = traj.speed_mps if speed_mps is None else speed_mps
    body = BlockerBody(
        radius=cfg.blocker_radius_m, speed=speed, start=traj.start, direction=traj.direction
    )
    dt_ms = cfg.sample_interval_ms
    n = round(cfg.duration_s * 1000.0 / dt_ms)
    t_ms = np.arange(n) * dt_ms
    pos = body.position(t_ms / 1000.0)
    dist = segment_distance(cfg.geometry, pos)
    inside = np.nonzero(dist <= body.radius)[0]
    t_s_ms: int | None = None
    if inside.size:
        if inside[0] == 0:
            raise InvalidScenarioError("trajectory starts inside the shadowing area")
        t_s_ms = int(t_ms[inside[0]])
        keep = int(inside[0])
    else:
        keep = n
    t_ms = t_ms[:keep]
    pos = pos[:keep]
    dist = dist[:keep]

    tx, rx_patterns = build_patterns(cfg)
    baseline = main_beam_baseline(cfg.geometry, tx, rx_patterns["main"], cfg.scene)
    amp = math.sqrt(cfg.scene.tx_power_mw)
    noise = NoiseModel(avg_power_mw=cfg.scene.noise_avg_mw, seed=noise_seed)
    samples: dict[str, np.ndarray] = {}
    for beam_index, (beam_id, rx) in enumerate(rx_patterns.items()):
        h = los_component(cfg.geometry, tx, rx, cfg.scene) + _nlos_array(
            cfg.geometry, pos, tx, rx, cfg.scene, body
        )
        y = amp * h
        if not noiseless:
            y = y + noise.block(beam_index, keep)
        samples[beam_id] = y / baseline

    _, r_signed = cfg.geometry.to_local(pos)
    eligible = np.nonzero(dist <= cfg.eligibility_range_m)[0]
    elig_ms = int(t_ms[eligible[0]]) if eligible.size else None
    return SimulationRun(
        t_ms=t_ms,
        samples=samples,
        t_s_ms=t_s_ms,
        r_signed=r_signed,
        positions=pos,
        baseline=baseline,
        trajectory_index=trajectory_index,
        speed_mps=speed,
        noise_seed=noise_seed,
        eligibility_start_ms=elig_ms,
    )


def combined_levels(run: SimulationRun, beam_subset: tuple[str, ...]) -> np.ndarray:
    """z_t = |sum of normalized complex samples| over the configured beams."""
    if not beam_subset:
        raise InvalidConfigError("beam subset must be non-empty")
    total = np.zeros_like(run.samples[beam_subset[0]])
    for beam_id in beam_subset:
        total = total + run.samples[beam_id]
    return np.abs(total)


@dataclass(frozen=True)
class RangeRow:
    """One Monte-Carlo run of a detection-range experiment."""

    run_id: int
    trajectory_index: int
    noise_seed: int
    speed_mps: float
    triggered: bool
    r_det_mm: float | None
    t_d_ms: int | None
    t_s_ms: int | None
    t_p_ms: int | None
    outcome_class: OutcomeClass


@dataclass(frozen=True)
class RangeEstimate:
    """Detection-range distribution over runs; censored runs excluded from stats."""

    rows: tuple[RangeRow, ...]
    mean_r_det_mm: float | None
    max_r_det_mm: float | None
    q25_r_det_mm: float | None
    median_r_det_mm: float | None
    q75_r_det_mm: float | None
    censored: int
    accuracy: float | None


def _run_once(cfg: ExperimentConfig, run_index: int) -> RangeRow:
    traj_index = run_index % len(cfg.trajectories)
    traj = cfg.trajectories[traj_index]
    jitter_rng = np.random.default_rng(np.random.SeedSequence(entropy=(cfg.seed, run_index, 74)))
    factor = 1.0 + cfg.speed_jitter * jitter_rng.uniform(-1.0, 1.0)
    noise_seed = run_seed_for(cfg.seed, run_index)
    run = simulate_trajectory(cfg, traj_index, noise_seed, speed_mps=traj.speed_mps * factor)
    z = combined_levels(run, cfg.detector.beam_subset)
    raw = detect(z, cfg.detector)
    outcome = classify(raw.triggered, raw.t_d_ms, run.t_s_ms, run.eligibility_start_ms)
    r_det_mm = None
    if raw.triggered:
        idx = raw.t_d_ms // cfg.sample_interval_ms
        r_det_mm = float(abs(run.r_signed[idx]) * 1000.0)
    return RangeRow(
        run_id=run_index,
        trajectory_index=traj_index,
        noise_seed=noise_seed,
        speed_mps=run.speed_mps,
        triggered=raw.triggered,
        r_det_mm=r_det_mm,
        t_d_ms=raw.t_d_ms,
        t_s_ms=run.t_s_ms,
        t_p_ms=outcome.t_p_ms,
        outcome_class=outcome.outcome_class,
    )


def _range_worker(args: tuple[ExperimentConfig, int]) -> RangeRow:
    return _run_once(*args)


def detection_range(cfg: ExperimentConfig, threads: int = 1) -> RangeEstimate:
    """Monte-Carlo detection-range estimate over the configured trajectories.

    r_det is the blocker's perpendicular distance at the detection time of
    each true detection; non-triggering runs are counted as censored.
    """
    indices = range(cfg.monte_carlo_runs)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_range_worker, [(cfg, i) for i in indices], chunksize=8))
    else:
        rows = [_run_once(cfg, i) for i in indices]
    return summarize_range(rows)


def summarize_range(rows: list[RangeRow]) -> RangeEstimate:
    true_r = [
        row.r_det_mm
        for row in rows
        if row.outcome_class is OutcomeClass.TRUE_DETECTION and row.r_det_mm is not None
    ]
    censored = sum(1 for row in rows if not row.triggered)
    with_event = [row for row in rows if row.t_s_ms is not None]
    accuracy = None
    if with_event:
        n_true = sum(
            1 for row in with_event if row.outcome_class is OutcomeClass.TRUE_DETECTION
        )
        accuracy = n_true / len(with_event)
    if true_r:
        arr = np.asarray(true_r)
        stats = (
            float(arr.mean()),
            float(arr.max()),
            float(np.percentile(arr, 25)),
            float(np.percentile(arr, 50)),
            float(np.percentile(arr, 75)),
        )
    else:
        stats = (None, None, None, None, None)
    return RangeEstimate(
        rows=tuple(rows),
        mean_r_det_mm=stats[0],
        max_r_det_mm=stats[1],
        q25_r_det_mm=stats[2],
        median_r_det_mm=stats[3],
        q75_r_det_mm=stats[4],
        censored=censored,
        accuracy=accuracy,
    )


def fov_grid(
    cfg: ExperimentConfig,
    xmin: float,
    xmax: float,
    ymin: float,
    ymax: float,
    resolution: float,
    beam_subset: tuple[str, ...] | None = None,
):
    """Noiseless combined level z(p) on a grid; shadowing-area cells masked.

    Returns (x, y, Z) where Z is a masked (len(y), len(x)) array of levels
    normalized to the unblocked main-beam baseline.
    """
    if resolution <= 0.0:
        raise InvalidConfigError("grid resolution must be positive")
    subset = beam_subset or cfg.detector.beam_subset
    x = np.arange(xmin, xmax + resolution / 2, resolution)
    y = np.arange(ymin, ymax + resolution / 2, resolution)
    if x.size == 0 or y.size == 0:
        raise InvalidConfigError("empty grid")
    xx, yy = np.meshgrid(x, y)
    points = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    body = BlockerBody(
        radius=cfg.blocker_radius_m, speed=1.0, start=(0.0, 0.0), direction=(1.0, 0.0)
    )
    mask = segment_distance(cfg.geometry, points) <= body.radius

    tx, rx_patterns = build_patterns(cfg)
    baseline = main_beam_baseline(cfg.geometry, tx, rx_patterns["main"], cfg.scene)
    amp = math.sqrt(cfg.scene.tx_power_mw)
    total = np.zeros(points.shape[0], dtype=complex)
    for beam_id in subset:
        rx = rx_patterns[beam_id]
        total += los_component(cfg.geometry, tx, rx, cfg.scene) + _nlos_array(
            cfg.geometry, points, tx, rx, cfg.scene, body
        )
    z = np.abs(amp * total) / baseline
    Z = np.ma.masked_array(z.reshape(yy.shape), mask=mask.reshape(yy.shape))
    return x, y, Z


@dataclass(frozen=True)
class SweepRow:
    sigma_th: float
    mean_t_p_ms: float | None
    accuracy: float | None
    n_true: int
    n_false: int
    n_miss: int


def _cached_runs(cfg: ExperimentConfig) -> list[SimulationRun]:
    runs = []
    for i in range(cfg.monte_carlo_runs):
        traj_index = i % len(cfg.trajectories)
        traj = cfg.trajectories[traj_index]
        jitter_rng = np.random.default_rng(np.random.SeedSequence(entropy=(cfg.seed, i, 74)))
        factor = 1.0 + cfg.speed_jitter * jitter_rng.uniform(-1.0, 1.0)
        runs.append(
            simulate_trajectory(
                cfg, traj_index, run_seed_for(cfg.seed, i), speed_mps=traj.speed_mps * factor
            )
        )
    return runs


def threshold_sweep(
    cfg: ExperimentConfig, thresholds: list[float], runs: list[SimulationRun] | None = None
) -> list[SweepRow]:
    """Re-run detection over one cached trace ensemble for each threshold.

    All thresholds see identical noise, so mean prediction time and accuracy
    differences are attributable to the threshold alone.
    """
    if not thresholds:
        raise InvalidConfigError("threshold list must be non-empty")
    if any(th <= 0.0 for th in thresholds):
        raise InvalidConfigError("thresholds must be positive")
    if runs is None:
        runs = _cached_runs(cfg)
    traces = [combined_levels(run, cfg.detector.beam_subset) for run in runs]
    out = []
    for th in thresholds:
        det_cfg = replace(cfg.detector, threshold=th)
        outcomes = []
        for run, z in zip(runs, traces):
            raw = detect(z, det_cfg)
            outcomes.append(
                classify(raw.triggered, raw.t_d_ms, run.t_s_ms, run.eligibility_start_ms)
            )
        n_true = sum(1 for o in outcomes if o.outcome_class is OutcomeClass.TRUE_DETECTION)
        n_false = sum(1 for o in outcomes if o.outcome_class is OutcomeClass.FALSE_DETECTION)
        n_miss = sum(1 for o in outcomes if o.outcome_class is OutcomeClass.MISDETECTION)
        n_event = sum(1 for o in outcomes if o.t_s_ms is not None)
        tps = [o.t_p_ms for o in outcomes if o.outcome_class is OutcomeClass.TRUE_DETECTION]
        out.append(
            SweepRow(
                sigma_th=th,
                mean_t_p_ms=float(np.mean(tps)) if tps else None,
                accuracy=n_true / n_event if n_event else None,
                n_true=n_true,
                n_false=n_false,
                n_miss=n_miss,
            )
        )
    return out


@dataclass(frozen=True)
class PredictionTimeStats:
    """Distribution of t_p over true detections; count 0 marks an empty summary."""

    count: int
    mean_ms: float | None = None
    max_ms: float | None = None
    q25_ms: float | None = None
    median_ms: float | None = None
    q75_ms: float | None = None


def prediction_time_stats(outcomes: list[DetectionOutcome]) -> PredictionTimeStats:
    """Summary of prediction times over the true detections in outcomes."""
    tps = np.asarray(
        [o.t_p_ms for o in outcomes if o.outcome_class is OutcomeClass.TRUE_DETECTION],
        dtype=float,
    )
    if tps.size == 0:
        return PredictionTimeStats(count=0)
    return PredictionTimeStats(
        count=int(tps.size),
        mean_ms=float(tps.mean()),
        max_ms=float(tps.max()),
        q25_ms=float(np.percentile(tps, 25)),
        median_ms=float(np.percentile(tps, 50)),
        q75_ms=float(np.percentile(tps, 75)),
    )


def quiescent_levels(
    cfg: ExperimentConfig, n_samples: int, beam_subset: tuple[str, ...] | None = None,
    noise_seed: int | None = None,
) -> np.ndarray:
    """Blocker-free combined level trace (LOS plus noise) for calibration."""
    subset = beam_subset or cfg.detector.beam_subset
    tx, rx_patterns = build_patterns(cfg)
    baseline = main_beam_baseline(cfg.geometry, tx, rx_patterns["main"], cfg.scene)
    amp = math.sqrt(cfg.scene.tx_power_mw)
    seed = run_seed_for(cfg.seed, cfg.monte_carlo_runs + 1) if noise_seed is None else noise_seed
    noise = NoiseModel(avg_power_mw=cfg.scene.noise_avg_mw, seed=seed)
    total = np.zeros(n_samples, dtype=complex)
    for beam_index, (beam_id, rx) in enumerate(rx_patterns.items()):
        if beam_id not in subset:
            continue
        y = amp * los_component(cfg.geometry, tx, rx, cfg.scene) + noise.block(
            beam_index, n_samples
        )
        total += y
    return np.abs(total) / baseline


def calibrate_config(
    cfg: ExperimentConfig, n_windows: int = 200, multiplier: float = 1.2
) -> float:
    """Calibrated sigma_th for this config's beam subset from quiescent noise."""
    w = cfg.detector.window_samples
    levels = quiescent_levels(cfg, n_windows * w)
    return calibrate_threshold(levels, w, multiplier)
