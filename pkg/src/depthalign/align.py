"""Closed-form global scale/shift fit of predicted inverse depth to sparse metric depth.

The fit minimizes sum_i (s*z_i + t - y_i)^2 over the sparse anchor pixels,
with z_i the predicted inverse depth and y_i = 1/depth_i the metric target.
Solved via the 2x2 normal equations; near-singular systems fall back to a
scale-only fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ClampProfile, InverseDepthMap, SparsePoints, clamp_prediction
from .errors import AllZeroPrediction, EmptySparse

# Relative determinant threshold guarding double-precision conditioning.
EPS_DET = 1e-12


@dataclass(frozen=True)
class AffineAlignment:
    """Per-frame global scale and shift; shift is 0 for degenerate (scale-only) fits."""

    scale: float
    shift: float
    n_points: int
    degenerate: bool


def fit_global(pred: InverseDepthMap, sparse: SparsePoints) -> AffineAlignment:
    """Least-squares (scale, shift) mapping pred onto sparse inverse depth.

    Falls back to scale-only (shift 0) when fewer than two points are given
    or the normal equations are near-singular, e.g. constant predictions.

    Raises:
        EmptySparse: no sparse points.
        AllZeroPrediction: scale-only fallback with all-zero predictions.
    """
    if len(sparse) == 0:
        raise EmptySparse("global alignment needs at least one sparse point")
    sparse.check_in_frame(pred.width, pred.height)

    # Accumulate in double precision regardless of grid storage precision.
    z = pred.values[sparse.v, sparse.u].astype(np.float64)
    y = 1.0 / sparse.depth_m

    n = float(len(sparse))
    sz = z.sum()
    szz = (z * z).sum()
    szy = (z * y).sum()
    sy = y.sum()

    det = n * szz - sz * sz
    if len(sparse) >= 2 and det >= EPS_DET * n * szz and det > 0:
        scale = (n * szy - sz * sy) / det
        shift = (szz * sy - sz * szy) / det
        return AffineAlignment(float(scale), float(shift), len(sparse), False)

    if szz <= 0:
        raise AllZeroPrediction("cannot fit scale against all-zero predictions")
    return AffineAlignment(float(szy / szz), 0.0, len(sparse), True)


def apply_global(
    pred: InverseDepthMap, a: AffineAlignment, profile: ClampProfile
) -> InverseDepthMap:
    """Apply z_tilde = scale * z + shift, then clamp to the profile range."""
    aligned = InverseDepthMap(a.scale * pred.values.astype(np.float64) + a.shift)
    return clamp_prediction(aligned, profile)
