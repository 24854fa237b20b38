"""Command-line front end: fov, range, detect, simulate, sweep.

Every command is deterministic given (config, flags, seed) and writes
plot-ready CSV; ``--plot`` additionally renders a matplotlib figure next to
the CSV output.  Exit codes: 0 success, 1 user/config error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import config as cfgmod
from . import scenario, traceio
from .detector import classify, sliding_std
from .errors import GuardBeamError, InsufficientDataError, InvalidConfigError
from .scenario import run_seed_for


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _load_values(args) -> dict[str, object]:
    overrides = {}
    if getattr(args, "preset", None):
        overrides.update(cfgmod.PRESETS[args.preset] if args.preset in cfgmod.PRESETS else {})
        if args.preset not in cfgmod.PRESETS:
            raise InvalidConfigError(
                f"unknown preset {args.preset!r}; choose from {sorted(cfgmod.PRESETS)}"
            )
    values = cfgmod.load_config(args.config, overrides)
    if args.seed is not None:
        values["run.seed"] = int(args.seed)
    return values


def _write_rows(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _figure_path(out: str) -> str:
    stem, _ = os.path.splitext(out)
    return stem + ".png"


def cmd_fov(args) -> int:
    values = _load_values(args)
    cfg = cfgmod.build_experiment(values)
    if args.xmax <= args.xmin or args.ymax <= args.ymin:
        print("error: empty grid", file=sys.stderr)
        return 1
    if args.res > cfg.scene.wavelength_m / 2:
        print(
            "warning: grid resolution coarser than half a wavelength; "
            "fringes will alias",
            file=sys.stderr,
        )
    x, y, Z = scenario.fov_grid(cfg, args.xmin, args.xmax, args.ymin, args.ymax, args.res)
    rows = []
    for j, yv in enumerate(y):
        for i, xv in enumerate(x):
            z = None if Z.mask[j, i] else float(Z[j, i])
            rows.append([float(xv), float(yv), z])
    _write_rows(args.out, ["x_m", "y_m", "z_level"], rows)
    if args.plot:
        from . import plots

        plots.save_fov_figure(x, y, Z, _figure_path(args.out))
    return 0


def cmd_range(args) -> int:
    values = _load_values(args)
    if args.runs is not None:
        values["run.monte_carlo"] = int(args.runs)
    if args.beams is not None:
        values["detector.beams"] = args.beams
    cfg = cfgmod.build_experiment(values)
    estimate = scenario.detection_range(cfg, threads=args.threads)
    rows = [
        [
            row.run_id,
            row.trajectory_index,
            row.noise_seed,
            row.triggered,
            row.r_det_mm,
            row.t_d_ms,
            row.t_s_ms,
            row.t_p_ms,
            row.outcome_class.value,
        ]
        for row in estimate.rows
    ]
    for key, value in [
        ("summary.mean_r_det_mm", estimate.mean_r_det_mm),
        ("summary.max_r_det_mm", estimate.max_r_det_mm),
        ("summary.q25_r_det_mm", estimate.q25_r_det_mm),
        ("summary.median_r_det_mm", estimate.median_r_det_mm),
        ("summary.q75_r_det_mm", estimate.q75_r_det_mm),
        ("summary.censored", estimate.censored),
        ("summary.accuracy", estimate.accuracy),
    ]:
        rows.append([key, "", "", "", value, "", "", "", ""])
    _write_rows(
        args.out,
        ["run_id", "trajectory_id", "seed", "triggered", "r_det_mm", "t_d_ms", "t_s_ms", "t_p_ms", "class"],
        rows,
    )
    if args.plot:
        from . import plots

        plots.save_range_figure(estimate.rows, _figure_path(args.out))
    return 0


def cmd_simulate(args) -> int:
    values = _load_values(args)
    cfg = cfgmod.build_experiment(values)
    if not 0 <= args.trajectory < len(cfg.trajectories):
        raise InvalidConfigError(
            f"trajectory index {args.trajectory} out of range (have {len(cfg.trajectories)})"
        )
    noise_seed = run_seed_for(cfg.seed, args.trajectory)
    run = scenario.simulate_trajectory(cfg, args.trajectory, noise_seed)
    traceio.write_trace(args.out, run.t_ms, run.samples)
    traceio.write_meta(
        args.out,
        traceio.TraceMeta(
            config=values,
            t_s_ms=run.t_s_ms,
            trajectory_index=run.trajectory_index,
            seed=cfg.seed,
            noise_seed=run.noise_seed,
            speed_mps=run.speed_mps,
            baseline=run.baseline,
            eligibility_start_ms=run.eligibility_start_ms,
        ),
    )
    if args.plot:
        from . import plots

        plots.save_trace_figure(run.t_ms, run.samples, _figure_path(args.out))
    return 0


def cmd_detect(args) -> int:
    t_ms, samples = traceio.read_trace(args.trace)
    meta = traceio.read_meta(args.trace)
    if meta is not None and args.config is None:
        values = {key: cfgmod._parse_value(key, raw) for key, raw in meta.config.items()}
    else:
        values = _load_values(args)
    cfg = cfgmod.build_experiment(values)
    det = cfg.detector
    missing = set(det.beam_subset) - set(samples)
    if missing:
        raise InvalidConfigError(f"trace lacks beams required by the detector: {sorted(missing)}")
    if t_ms.size > 1:
        stride = int(t_ms[1] - t_ms[0])
        if stride != det.sample_interval_ms:
            raise InvalidConfigError(
                f"trace stride {stride} ms differs from detector interval {det.sample_interval_ms} ms"
            )
    if t_ms.size < det.window_samples:
        raise InsufficientDataError("insufficient data: trace shorter than one window")
    z = np.abs(sum(samples[b] for b in det.beam_subset))
    sigma = sliding_std(z, det.window_samples)
    crossed = ~np.isnan(sigma) & (sigma >= det.threshold)
    t_d_ms = int(t_ms[np.nonzero(crossed)[0][0]]) if crossed.any() else None
    t_s_ms = meta.t_s_ms if meta is not None else None
    elig = meta.eligibility_start_ms if meta is not None else None
    outcome = classify(t_d_ms is not None, t_d_ms, t_s_ms, elig)

    rows = [
        [int(t), float(z[i]), None if np.isnan(sigma[i]) else float(sigma[i]), bool(crossed[i])]
        for i, t in enumerate(t_ms)
    ]
    rows.append(["summary.t_d_ms", t_d_ms, "", ""])
    rows.append(["summary.t_s_ms", t_s_ms, "", ""])
    rows.append(["summary.t_p_ms", outcome.t_p_ms, "", ""])
    rows.append(["summary.class", outcome.outcome_class.value, "", ""])
    _write_rows(args.out, ["t_ms", "z", "sigma", "crossed"], rows)
    if t_d_ms is None:
        print("no detection")
    else:
        print(f"detected at t_d={t_d_ms} ms ({outcome.outcome_class.value})")
    if args.plot:
        from . import plots

        plots.save_detect_figure(t_ms, z, sigma, det.threshold, t_d_ms, _figure_path(args.out))
    return 0


def cmd_sweep(args) -> int:
    values = _load_values(args)
    if args.runs is not None:
        values["run.monte_carlo"] = int(args.runs)
    cfg = cfgmod.build_experiment(values)
    thresholds = [float(part) for part in args.thresholds.split(",") if part.strip()]
    if not thresholds:
        raise InvalidConfigError("empty threshold list")
    if any(th <= 0 for th in thresholds):
        raise InvalidConfigError("thresholds must be positive")
    rows = scenario.threshold_sweep(cfg, thresholds)
    _write_rows(
        args.out,
        ["sigma_th", "mean_tp_ms", "accuracy", "n_true", "n_false", "n_miss"],
        [
            [row.sigma_th, row.mean_t_p_ms, row.accuracy, row.n_true, row.n_false, row.n_miss]
            for row in rows
        ],
    )
    if args.plot:
        from . import plots

        plots.save_sweep_figure(rows, _figure_path(args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="config file (flat key = value text)")
    common.add_argument("--seed", type=int, default=None, help="override run.seed")
    common.add_argument("--threads", type=int, default=1, help="Monte-Carlo worker count")
    common.add_argument("--out", required=True, help="output CSV path")
    common.add_argument("--plot", action="store_true", help="also render a figure next to the CSV")
    common.add_argument("--preset", default=None, help="named beam/threshold preset")

    parser = argparse.ArgumentParser(prog="guardbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fov", parents=[common], help="field-of-view grid CSV")
    p.add_argument("--xmin", type=float, default=0.0)
    p.add_argument("--xmax", type=float, default=5.0)
    p.add_argument("--ymin", type=float, default=-1.2)
    p.add_argument("--ymax", type=float, default=1.2)
    p.add_argument("--res", type=float, default=0.005, help="grid resolution in meters")
    p.set_defaults(func=cmd_fov)

    p = sub.add_parser("range", parents=[common], help="Monte-Carlo detection-range runs")
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--beams", default=None, help="comma-separated detector beam subset")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("simulate", parents=[common], help="write one run as a trace file")
    p.add_argument("--trajectory", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", parents=[common], help="run the detector over a trace file")
    p.add_argument("trace", help="trace CSV produced by simulate (or hardware capture)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", parents=[common], help="threshold sweep over cached traces")
    p.add_argument("--thresholds", required=True, help="comma-separated sigma_th values")
    p.add_argument("--runs", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GuardBeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
