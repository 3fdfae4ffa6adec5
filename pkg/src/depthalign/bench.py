"""Per-stage runtime benchmark harness.

Each stage is timed in isolation on precomputed inputs: a stage function is
called `warmup` times untimed, then `runs` times on the monotonic clock.
File I/O is excluded everywhere except the depth_source stage, which is
defined as delivering the prediction (from disk or a generator).
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from typing import Callable

from .core import ClampProfile, DepthFrame, InverseDepthMap, SparsePoints, from_inverse
from .metrics import frame_metrics
from .pipeline import align_frame
from .scaffold import build_scaffold, compute_anchors
from .align import apply_global, fit_global
from .sml import ScaleMapLearner, apply_residual, sml_forward, stack_inputs

STAGES = (
    "depth_source",
    "global_alignment",
    "scale_map_scaffolding",
    "sml_inference",
    "metrics",
)
DEFAULT_WARMUP = 20
DEFAULT_RUNS = 100


@dataclass(frozen=True)
class StageTiming:
    stage: str
    mean_ms: float
    std_ms: float
    runs: int


def time_stage(
    stage: str, fn: Callable[[], object], warmup: int = DEFAULT_WARMUP, runs: int = DEFAULT_RUNS
) -> StageTiming:
    """Call fn exactly `warmup` + `runs` times; only the last `runs` are timed."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(runs):
        start = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - start) * 1000.0)
    mean = statistics.fmean(samples)
    std = statistics.pstdev(samples) if runs > 1 else 0.0
    return StageTiming(stage, mean, std, runs)


def run_benchmark(
    depth_source: Callable[[], InverseDepthMap],
    sparse: SparsePoints,
    model: ScaleMapLearner,
    profile: ClampProfile,
    gt: DepthFrame | None = None,
    warmup: int = DEFAULT_WARMUP,
    runs: int = DEFAULT_RUNS,
) -> list[StageTiming]:
    """Time every pipeline stage independently and return the table.

    Without ground truth, the metrics stage is timed against a stand-in
    derived from the aligned output; the workload is identical, only the
    error values are meaningless.
    """
    pred = depth_source()
    result = align_frame(pred, sparse, profile, model)
    z_tilde = result.z_aligned
    inputs = stack_inputs(z_tilde, result.scaffold)
    depth_out = from_inverse(result.z_out, profile.z_floor)
    gt_frame = gt if gt is not None else depth_out

    def stage_alignment():
        return apply_global(pred, fit_global(pred, sparse), profile)

    def stage_scaffold():
        return build_scaffold(compute_anchors(sparse, z_tilde), pred.width, pred.height)

    def stage_sml():
        o = sml_forward(model, inputs)
        r, t = o if isinstance(o, tuple) else (o, None)
        return apply_residual(z_tilde, r, t, profile)

    def stage_metrics():
        return frame_metrics(depth_out, gt_frame, profile)

    stage_fns = {
        "depth_source": depth_source,
        "global_alignment": stage_alignment,
        "scale_map_scaffolding": stage_scaffold,
        "sml_inference": stage_sml,
        "metrics": stage_metrics,
    }
    return [time_stage(name, stage_fns[name], warmup, runs) for name in STAGES]


def write_timings_csv(path, timings: list[StageTiming]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["stage", "mean_ms", "std_ms", "runs"])
        for t in timings:
            writer.writerow([t.stage, f"{t.mean_ms:.6f}", f"{t.std_ms:.6f}", t.runs])


def format_timings(timings: list[StageTiming]) -> str:
    width = max(len(t.stage) for t in timings)
    lines = [f"{'stage':<{width}}  {'mean ms':>10}  {'std ms':>10}  {'runs':>5}"]
    for t in timings:
        lines.append(
            f"{t.stage:<{width}}  {t.mean_ms:>10.3f}  {t.std_ms:>10.3f}  {t.runs:>5}"
        )
    return "\n".join(lines)
