"""Visualization writers: signed error maps and depth maps as 8-bit PNGs."""

from __future__ import annotations

import numpy as np
from PIL import Image

from ..core import DepthFrame, InverseDepthMap, ValidMask
from ..errors import IoFailure, ShapeMismatch


def _save_rgb(rgb_u8: np.ndarray, path) -> None:
    try:
        Image.fromarray(rgb_u8, mode="RGB").save(path, format="PNG")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")


def render_error_map(
    pred: InverseDepthMap, gt: InverseDepthMap, mask: ValidMask, path
) -> None:
    """Diverging error image of e = gt - pred (inverse depth, 1/km).

    Positive error (prediction farther than ground truth) fades white to
    red, negative fades to blue, zero is white. The color range is symmetric
    at the 99th percentile of |e| over the mask. Masked-out pixels are black.
    """
    if pred.values.shape != gt.values.shape or pred.values.shape != mask.bits.shape:
        raise ShapeMismatch("error map inputs disagree on dimensions")
    e = gt.values.astype(np.float64) - pred.values.astype(np.float64)
    bits = mask.bits
    h, w = e.shape
    rgb = np.zeros((h, w, 3), dtype=np.float64)
    if bits.any():
        limit = np.percentile(np.abs(e[bits]), 99.0)
        t = np.clip(e / limit, -1.0, 1.0) if limit > 0 else np.zeros_like(e)
        rgb[..., 0] = np.where(t >= 0, 1.0, 1.0 + t)
        rgb[..., 1] = 1.0 - np.abs(t)
        rgb[..., 2] = np.where(t <= 0, 1.0, 1.0 - t)
        rgb[~bits] = 0.0
    _save_rgb(np.round(rgb * 255.0).astype(np.uint8), path)


def render_depth_map(frame: DepthFrame, path) -> None:
    """Grayscale depth image; brighter is closer, invalid pixels black."""
    valid = frame.valid()
    h, w = frame.values.shape
    lum = np.zeros((h, w), dtype=np.float64)
    if valid.any():
        z = np.zeros_like(lum)
        z[valid] = 1.0 / frame.values[valid].astype(np.float64)
        lo, hi = z[valid].min(), z[valid].max()
        if hi > lo:
            lum[valid] = (z[valid] - lo) / (hi - lo)
        else:
            lum[valid] = 1.0
    gray = np.round(lum * 255.0).astype(np.uint8)
    _save_rgb(np.stack([gray] * 3, axis=-1), path)
