"""Per-frame depth error metrics and dataset-level aggregation.

Inverse-depth errors are reported in 1/km (values stored in 1/m are scaled
by 1000 here and only here); depth errors are reported in millimeters.
Pixels outside the evaluation mask never influence any metric.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import ClampProfile, DepthFrame, eval_mask
from .errors import ConfigMismatch, EmptyList, EmptyMask, ShapeMismatch

METRIC_FIELDS = ("mae_mm", "rmse_mm", "imae", "irmse", "iabsrel")


@dataclass(frozen=True)
class FrameMetrics:
    mae_mm: float
    rmse_mm: float
    imae: float  # 1/km
    irmse: float  # 1/km
    iabsrel: float
    valid_pixels: int


@dataclass(frozen=True)
class AggregateReport:
    mae_mm: float
    rmse_mm: float
    imae: float
    irmse: float
    iabsrel: float
    frame_count: int
    skipped_frames: int = 0
    profile: str = ""
    density: str = ""
    pooled: bool = False


def frame_metrics(
    pred: DepthFrame, gt: DepthFrame, profile: ClampProfile
) -> FrameMetrics:
    """Errors between predicted and ground-truth depth over the eval mask.

    Predictions are expected to be clamped (hence strictly positive); the
    mask comes from ground truth validity and the profile's eval range.

    Raises:
        EmptyMask: no pixel passes the evaluation mask.
        ShapeMismatch: frames disagree on dimensions.
    """
    if pred.values.shape != gt.values.shape:
        raise ShapeMismatch(
            f"pred {pred.values.shape} vs gt {gt.values.shape} dimensions"
        )
    mask = eval_mask(gt, profile).bits
    m = int(mask.sum())
    if m == 0:
        raise EmptyMask("no valid ground-truth pixels in the eval range")

    d_gt = gt.values[mask].astype(np.float64)
    d_pred = pred.values[mask].astype(np.float64)
    with np.errstate(divide="ignore"):
        z_gt = 1000.0 / d_gt  # 1/km
        z_pred = np.where(d_pred > 0, 1000.0 / np.where(d_pred > 0, d_pred, 1.0), np.inf)

    dz = np.abs(z_gt - z_pred)
    dd_mm = np.abs(d_gt - d_pred) * 1000.0
    return FrameMetrics(
        mae_mm=float(dd_mm.mean()),
        rmse_mm=float(np.sqrt((dd_mm * dd_mm).mean())),
        imae=float(dz.mean()),
        irmse=float(np.sqrt((dz * dz).mean())),
        iabsrel=float((dz / z_gt).mean()),
        valid_pixels=m,
    )


def aggregate(
    frames: list[FrameMetrics],
    skipped: int = 0,
    profile: str = "",
    density: str = "",
    pooled: bool = False,
) -> AggregateReport:
    """Combine per-frame metrics into one report.

    Default is the unweighted mean over frames; `pooled` weights each frame
    by its valid pixel count, which reproduces pooling all pixels together.

    Raises:
        EmptyList: no frames to aggregate.
    """
    if not frames:
        raise EmptyList("cannot aggregate zero frames")
    if pooled:
        weights = np.array([f.valid_pixels for f in frames], dtype=np.float64)
        total = weights.sum()

        def mean_of(attr):
            return float(sum(getattr(f, attr) * w for f, w in zip(frames, weights)) / total)

        def rms_of(attr):
            return float(
                math.sqrt(
                    sum(getattr(f, attr) ** 2 * w for f, w in zip(frames, weights)) / total
                )
            )

    else:

        def mean_of(attr):
            return float(sum(getattr(f, attr) for f in frames) / len(frames))

        def rms_of(attr):
            return mean_of(attr)

    return AggregateReport(
        mae_mm=mean_of("mae_mm"),
        rmse_mm=rms_of("rmse_mm") if pooled else mean_of("rmse_mm"),
        imae=mean_of("imae"),
        irmse=rms_of("irmse") if pooled else mean_of("irmse"),
        iabsrel=mean_of("iabsrel"),
        frame_count=len(frames),
        skipped_frames=skipped,
        profile=profile,
        density=density,
        pooled=pooled,
    )


def compare(baseline: AggregateReport, candidate: AggregateReport) -> dict[str, float]:
    """Percent reduction per metric; positive means the candidate improved.

    Raises:
        ConfigMismatch: reports cover different frame counts or configs.
    """
    same = (
        baseline.frame_count == candidate.frame_count
        and baseline.profile == candidate.profile
        and baseline.density == candidate.density
        and baseline.pooled == candidate.pooled
    )
    if not same:
        raise ConfigMismatch("reports were produced under different configurations")
    out = {}
    for name in METRIC_FIELDS:
        b = getattr(baseline, name)
        c = getattr(candidate, name)
        if b == 0:
            out[name] = 0.0 if c == 0 else -math.inf
        else:
            out[name] = 100.0 * (b - c) / b
    return out


def write_report_csv(path, frames: list[tuple[str, FrameMetrics]], report: AggregateReport) -> None:
    """One row per frame plus a summary row; byte-deterministic output."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["frame_id", "mae_mm", "rmse_mm", "imae", "irmse", "iabsrel", "valid_pixels"]
        )
        for frame_id, fm in frames:
            writer.writerow(
                [
                    frame_id,
                    f"{fm.mae_mm:.6f}",
                    f"{fm.rmse_mm:.6f}",
                    f"{fm.imae:.6f}",
                    f"{fm.irmse:.6f}",
                    f"{fm.iabsrel:.6f}",
                    fm.valid_pixels,
                ]
            )
        writer.writerow(
            [
                "aggregate",
                f"{report.mae_mm:.6f}",
                f"{report.rmse_mm:.6f}",
                f"{report.imae:.6f}",
                f"{report.irmse:.6f}",
                f"{report.iabsrel:.6f}",
                report.frame_count,
            ]
        )
