"""Rectangular CSV traces and their JSON metadata sidecars.

Trace rows are (t_ms, beam, i, q): one row per beam per time step, with a
strictly increasing constant-stride time grid shared by every beam.  The
stored i/q values are the normalized complex received samples.  The sidecar
(path + ".meta") records the effective config echo and the run truth, so a
trace file round-trips through the detector without a simulation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import TraceFormatError

TRACE_HEADER = ["t_ms", "beam", "i", "q"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trace(path: str, t_ms: np.ndarray, samples: Mapping[str, np.ndarray]) -> None:
    """Write a rectangular trace CSV (one row per beam per time step)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for idx, t in enumerate(t_ms):
            for beam_id, values in samples.items():
                v = values[idx]
                writer.writerow([int(t), beam_id, _fmt(v.real), _fmt(v.imag)])


def read_trace(path: str) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Read and validate a trace CSV; names the first offending line on error."""
    per_beam: dict[str, list[tuple[int, complex]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise TraceFormatError(f"line 1: expected header {','.join(TRACE_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise TraceFormatError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                t = int(row[0])
                value = complex(float(row[2]), float(row[3]))
            except ValueError as exc:
                raise TraceFormatError(f"line {lineno}: {exc}") from exc
            per_beam.setdefault(row[1], []).append((t, value))
    if not per_beam:
        raise TraceFormatError("line 2: trace contains no samples")

    grids = {}
    for beam_id, rows in per_beam.items():
        ts = np.asarray([t for t, _ in rows], dtype=int)
        diffs = np.diff(ts)
        if ts.size > 1 and (np.any(diffs <= 0) or np.any(diffs != diffs[0])):
            bad = int(np.nonzero((diffs <= 0) | (diffs != diffs[0]))[0][0])
            raise TraceFormatError(
                f"beam {beam_id!r}: non-monotone or ragged time grid near t_ms={ts[bad + 1]}"
            )
        grids[beam_id] = ts
    first = next(iter(grids.values()))
    for beam_id, ts in grids.items():
        if ts.shape != first.shape or np.any(ts != first):
            raise TraceFormatError(f"beam {beam_id!r}: time grid differs from the other beams")
    samples = {
        beam_id: np.asarray([v for _, v in rows], dtype=complex)
        for beam_id, rows in per_beam.items()
    }
    return first, samples


@dataclass(frozen=True)
class TraceMeta:
    """Sidecar payload: effective config plus the simulated run truth."""

    config: dict[str, object]
    t_s_ms: int | None
    trajectory_index: int
    seed: int
    noise_seed: int
    speed_mps: float
    baseline: float
    eligibility_start_ms: int | None


def meta_path(trace_path: str) -> str:
    return trace_path + ".meta"


def write_meta(trace_path: str, meta: TraceMeta) -> None:
    payload = {
        "config": meta.config,
        "t_s_ms": meta.t_s_ms,
        "trajectory_index": meta.trajectory_index,
        "seed": meta.seed,
        "noise_seed": meta.noise_seed,
        "speed_mps": meta.speed_mps,
        "baseline": meta.baseline,
        "eligibility_start_ms": meta.eligibility_start_ms,
    }
    with open(meta_path(trace_path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_meta(trace_path: str) -> TraceMeta | None:
    try:
        with open(meta_path(trace_path), "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        return None
    return TraceMeta(
        config=payload["config"],
        t_s_ms=payload["t_s_ms"],
        trajectory_index=payload["trajectory_index"],
        seed=payload["seed"],
        noise_seed=payload["noise_seed"],
        speed_mps=payload["speed_mps"],
        baseline=payload["baseline"],
        eligibility_start_ms=payload["eligibility_start_ms"],
    )
