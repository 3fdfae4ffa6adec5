"""Frame-level orchestration: alignment, evaluation, and dataset assembly.

This is the one place that wires the stages together; the CLI, the service,
and the benchmark harness all call through here so their behavior cannot
drift apart.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .align import AffineAlignment, apply_global, fit_global
from .core import (
    ClampProfile,
    DepthFrame,
    InverseDepthMap,
    SparsePoints,
    eval_mask,
    from_inverse,
    to_inverse,
)
from .errors import EmptyMask
from .metrics import AggregateReport, FrameMetrics, aggregate, frame_metrics
from .scaffold import ScaleScaffold, build_scaffold, compute_anchors, grayscale
from .sml import ScaleMapLearner, TrainingSample, apply_residual, sml_forward, stack_inputs
from .sparsify import SceneConfig, SparsifierConfig, sample_sparse, synth_prediction, synth_scene

THREADS_ENV = "MVID_THREADS"


@dataclass(frozen=True)
class FrameResult:
    """Everything one frame's alignment produced."""

    alignment: AffineAlignment
    z_aligned: InverseDepthMap  # after global alignment and clamping
    z_out: InverseDepthMap  # final output (== z_aligned without a model)
    n_anchors: int
    scaffold: ScaleScaffold | None
    identity_scaffold: bool


def align_frame(
    pred: InverseDepthMap,
    sparse: SparsePoints,
    profile: ClampProfile,
    model: ScaleMapLearner | None = None,
) -> FrameResult:
    """Globally align a prediction; refine with the dense scale model if given."""
    alignment = fit_global(pred, sparse)
    z_tilde = apply_global(pred, alignment, profile)
    if model is None:
        return FrameResult(alignment, z_tilde, z_tilde, 0, None, False)

    anchors = compute_anchors(sparse, z_tilde)
    scaffold = build_scaffold(anchors, pred.width, pred.height)
    identity = bool(np.all(scaffold.values == 1.0))
    out = sml_forward(model, stack_inputs(z_tilde, scaffold))
    residual, shift = out if isinstance(out, tuple) else (out, None)
    z_hat = apply_residual(z_tilde, residual, shift, profile)
    return FrameResult(alignment, z_tilde, z_hat, len(anchors), scaffold, identity)


@dataclass(frozen=True)
class EvalFrame:
    """One evaluation unit: ground truth plus prediction and sparse anchors."""

    frame_id: str
    gt: DepthFrame
    pred: InverseDepthMap
    sparse: SparsePoints


def _eval_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def evaluate_frames(
    frames: list[EvalFrame],
    profile: ClampProfile,
    model: ScaleMapLearner | None = None,
    pooled: bool = False,
    density: str = "",
) -> tuple[list[tuple[str, FrameMetrics]], AggregateReport]:
    """Per-frame metrics plus the aggregate report.

    Frames whose eval mask is empty are skipped and counted in the report.
    Results are deterministic and independent of worker scheduling.
    """

    def one(frame: EvalFrame):
        result = align_frame(frame.pred, frame.sparse, profile, model)
        depth = from_inverse(result.z_out, profile.z_floor)
        try:
            return frame.frame_id, frame_metrics(depth, frame.gt, profile)
        except EmptyMask:
            return frame.frame_id, None

    workers = _eval_workers()
    if workers > 1 and len(frames) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, frames))
    else:
        outcomes = [one(f) for f in frames]

    rows = [(fid, fm) for fid, fm in outcomes if fm is not None]
    skipped = len(outcomes) - len(rows)
    report = aggregate(
        [fm for _, fm in rows],
        skipped=skipped,
        profile=profile.name,
        density=density,
        pooled=pooled,
    )
    return rows, report


def frame_seed(base: int, frame_id: str, salt: int = 0) -> int:
    """Stable per-frame RNG seed derived from the frame id."""
    return (base + salt * 0x9E3779B1 + zlib.crc32(frame_id.encode("utf-8"))) % (2**32)


def synth_eval_frame(
    index: int,
    profile: ClampProfile,
    sparsifier: SparsifierConfig,
    scene: SceneConfig | None = None,
    seed: int = 0,
) -> EvalFrame:
    """Procedural frame: scene, distorted prediction, and sampled sparse depth."""
    frame_id = f"synth-{index:05d}"
    scene = scene or SceneConfig()
    s = frame_seed(seed, frame_id)
    rgb, gt = synth_scene(
        SceneConfig(scene.width, scene.height, scene.depth_range, scene.blob_count, s)
    )
    gt_inv, _ = to_inverse(gt)
    pred = synth_prediction(gt_inv, frame_seed(seed, frame_id, salt=1))
    sparse = sample_sparse(
        gt,
        SparsifierConfig(
            mode=sparsifier.mode,
            target_count=sparsifier.target_count,
            min_dist=sparsifier.min_dist,
            cluster_count=sparsifier.cluster_count,
            cluster_sigma=sparsifier.cluster_sigma,
            seed=frame_seed(seed, frame_id, salt=2),
        ),
        texture=grayscale(rgb),
    )
    return EvalFrame(frame_id, gt, pred, sparse)


def make_training_sample(
    frame: EvalFrame, profile: ClampProfile
) -> TrainingSample:
    """Turn an evaluation frame into a supervised training sample."""
    alignment = fit_global(frame.pred, frame.sparse)
    z_tilde = apply_global(frame.pred, alignment, profile)
    anchors = compute_anchors(frame.sparse, z_tilde)
    scaffold = build_scaffold(anchors, frame.pred.width, frame.pred.height)
    gt_inv, _ = to_inverse(frame.gt)
    mask = eval_mask(frame.gt, profile)
    return TrainingSample(
        inputs=stack_inputs(z_tilde, scaffold),
        target=np.array(gt_inv.values),
        mask=np.array(mask.bits),
    )


def synth_training_set(
    n_frames: int,
    profile: ClampProfile,
    sparsifier: SparsifierConfig,
    scene: SceneConfig | None = None,
    seed: int = 0,
) -> list[TrainingSample]:
    return [
        make_training_sample(
            synth_eval_frame(i, profile, sparsifier, scene, seed), profile
        )
        for i in range(n_frames)
    ]
