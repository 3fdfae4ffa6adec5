"""Grid and point types shared by the whole pipeline.

Depth lives in meters, inverse depth in 1/m. Reporting units (mm, 1/km)
appear only in the metrics module. Invalid depth (non-finite or <= 0) is
stored as 0 and masked off. All types are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveDepth, ShapeMismatch


def _as_grid(values, dtype=np.float32) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a 2D grid, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DepthFrame:
    """Dense metric depth in meters; invalid pixels are stored as 0."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float32, copy=True)
        if arr.ndim != 2:
            raise ShapeMismatch(f"expected a 2D grid, got shape {arr.shape}")
        arr[~np.isfinite(arr) | (arr <= 0)] = 0.0
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def valid(self) -> np.ndarray:
        return self.values > 0


@dataclass(frozen=True)
class InverseDepthMap:
    """Dense inverse depth in 1/m; valid values are finite and >= 0."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_grid(self.values))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ValidMask:
    """Per-pixel validity flags; popcount is the M of masked reductions."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _as_grid(self.bits, dtype=bool))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class SparsePoints:
    """Sparse metric depth anchors as parallel (u, v, depth_m) arrays."""

    u: np.ndarray
    v: np.ndarray
    depth_m: np.ndarray

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.u, dtype=np.int64)).copy()
        v = np.atleast_1d(np.asarray(self.v, dtype=np.int64)).copy()
        d = np.atleast_1d(np.asarray(self.depth_m, dtype=np.float64)).copy()
        if not (u.shape == v.shape == d.shape) or u.ndim != 1:
            raise ShapeMismatch("u, v, depth_m must be 1D arrays of equal length")
        if d.size and (not np.all(np.isfinite(d)) or np.any(d <= 0)):
            raise NonPositiveDepth("sparse depths must be finite and > 0")
        if u.size != np.unique(np.stack([u, v], axis=1), axis=0).shape[0]:
            raise ShapeMismatch("duplicate (u, v) entries in sparse points")
        for arr, name in ((u, "u"), (v, "v"), (d, "depth_m")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.u.size

    def __iter__(self):
        return iter(zip(self.u.tolist(), self.v.tolist(), self.depth_m.tolist()))

    def check_in_frame(self, width: int, height: int) -> None:
        if len(self) and (
            self.u.min() < 0
            or self.u.max() >= width
            or self.v.min() < 0
            or self.v.max() >= height
        ):
            raise ShapeMismatch(
                f"sparse points fall outside the {width}x{height} frame"
            )

    @staticmethod
    def from_list(points) -> "SparsePoints":
        pts = list(points)
        if not pts:
            return SparsePoints(
                np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64)
            )
        u, v, d = zip(*pts)
        return SparsePoints(np.array(u), np.array(v), np.array(d))


@dataclass(frozen=True)
class ClampProfile:
    """Valid ground-truth range and prediction clamp range, in meters."""

    name: str
    eval_min_depth: float
    eval_max_depth: float
    pred_min_depth: float
    pred_max_depth: float

    def __post_init__(self):
        if not (0 < self.pred_min_depth < self.pred_max_depth):
            raise ValueError("require 0 < pred_min_depth < pred_max_depth")
        if not (0 < self.eval_min_depth < self.eval_max_depth):
            raise ValueError("require 0 < eval_min_depth < eval_max_depth")

    @property
    def z_floor(self) -> float:
        """Lower inverse-depth clamp bound, 1/pred_max_depth."""
        return 1.0 / self.pred_max_depth

    @property
    def z_ceil(self) -> float:
        """Upper inverse-depth clamp bound, 1/pred_min_depth."""
        return 1.0 / self.pred_min_depth


# Indoor profile: ground truth valid in [0.2, 5] m, predictions clamped to
# [0.1, 8] m. Wide-range profile: valid in [0.2, 50] m, clamped to [0.1, 80] m.
PROFILES = {
    "void": ClampProfile("void", 0.2, 5.0, 0.1, 8.0),
    "tartanair": ClampProfile("tartanair", 0.2, 50.0, 0.1, 80.0),
}


def get_profile(name: str) -> ClampProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown clamp profile {name!r}; have {sorted(PROFILES)}")


def to_inverse(frame: DepthFrame) -> tuple[InverseDepthMap, ValidMask]:
    """Convert depth to inverse depth; invalid pixels come back as 0, masked off."""
    valid = frame.valid()
    z = np.zeros_like(frame.values)
    np.divide(1.0, frame.values, out=z, where=valid)
    return InverseDepthMap(z), ValidMask(valid)


def from_inverse(z: InverseDepthMap, floor: float) -> DepthFrame:
    """Convert inverse depth to depth, flooring z at `floor` to bound 1/z."""
    if floor <= 0:
        raise ValueError("floor must be > 0")
    return DepthFrame(1.0 / np.maximum(z.values, np.float32(floor)))


def clamp_prediction(z: InverseDepthMap, profile: ClampProfile) -> InverseDepthMap:
    """Clamp predicted inverse depth into the profile's [1/d_max, 1/d_min] range."""
    lo = np.float32(profile.z_floor)
    hi = np.float32(profile.z_ceil)
    return InverseDepthMap(np.clip(z.values, lo, hi))


def eval_mask(gt: DepthFrame, profile: ClampProfile) -> ValidMask:
    """Pixels that are valid and inside the profile's evaluation depth range."""
    d = gt.values
    bits = gt.valid() & (d >= profile.eval_min_depth) & (d <= profile.eval_max_depth)
    return ValidMask(bits)
