"""Synthetic stand-ins for a visual-inertial sparse depth source.

Two samplers draw sparse metric depth from ground truth under different
spatial statistics: a feature-tracker-like mode that enforces a minimum
distance between points (high coverage), and a clustered mode that groups
points around a few centers. A small procedural scene generator plus an
affine+local distorter of ground-truth inverse depth provide desk-scale
training data without any real datasets.

Everything here is a pure function of (inputs, seed).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import DepthFrame, InverseDepthMap, SparsePoints
from .scaffold import grayscale, scharr_gradients

log = logging.getLogger(__name__)

DENSITY_PRESETS = (50, 150, 500, 1500)


@dataclass(frozen=True)
class SparsifierConfig:
    mode: str = "min_distance"  # or "clustered"
    target_count: int = 150
    min_dist: float = 5.0
    cluster_count: int = 8
    cluster_sigma: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("min_distance", "clustered"):
            raise ValueError(f"unknown sparsifier mode {self.mode!r}")
        if self.target_count < 0 or self.min_dist < 0:
            raise ValueError("target_count and min_dist must be >= 0")


@dataclass(frozen=True)
class SceneConfig:
    width: int = 96
    height: int = 96
    depth_range: tuple[float, float] = (0.5, 4.5)
    blob_count: int = 6
    seed: int = 0


def _texture_score(gt: DepthFrame, texture: np.ndarray | None) -> np.ndarray:
    if texture is not None:
        return scharr_gradients(texture)
    d = gt.values
    span = d.max() - d[d > 0].min() if (d > 0).any() else 1.0
    norm = np.where(d > 0, (d - d[d > 0].min() if (d > 0).any() else d) / max(span, 1e-9), 0.0)
    return scharr_gradients(norm.astype(np.float32))


def sample_min_distance(
    gt: DepthFrame, cfg: SparsifierConfig, texture: np.ndarray | None = None
) -> SparsePoints:
    """Greedy high-coverage sampling with a minimum spacing between points.

    Candidates (valid gt pixels) are visited in order of local gradient
    magnitude (ties broken by a seeded permutation) and accepted unless they
    fall within `min_dist` pixels of an already accepted point. May return
    fewer than `target_count` points when spacing exhausts the frame.
    """
    if cfg.target_count == 0:
        return SparsePoints.from_list([])
    valid = gt.valid()
    vs, us = np.nonzero(valid)
    if us.size == 0:
        return SparsePoints.from_list([])

    score = _texture_score(gt, texture)[vs, us]
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(us.size)
    order = perm[np.argsort(-score[perm], kind="stable")]

    min_sq = cfg.min_dist * cfg.min_dist
    acc_u = np.empty(cfg.target_count, dtype=np.int64)
    acc_v = np.empty(cfg.target_count, dtype=np.int64)
    n = 0
    for i in order:
        u, v = int(us[i]), int(vs[i])
        if n and min_sq > 0:
            du = acc_u[:n] - u
            dv = acc_v[:n] - v
            if (du * du + dv * dv < min_sq).any():
                continue
        acc_u[n] = u
        acc_v[n] = v
        n += 1
        if n == cfg.target_count:
            break
    if n < cfg.target_count:
        log.warning(
            "min-distance sampler exhausted: %d of %d points placed", n, cfg.target_count
        )
    u, v = acc_u[:n], acc_v[:n]
    return SparsePoints(u, v, gt.values[v, u].astype(np.float64))


def sample_clustered(gt: DepthFrame, cfg: SparsifierConfig) -> SparsePoints:
    """Sampling grouped around a few cluster centers.

    Centers are drawn uniformly over valid pixels; points come from isotropic
    Gaussians around them, rounded to pixels, deduplicated, clipped to the
    frame, and rejected where gt is invalid. Never exceeds `target_count`.
    """
    if cfg.target_count == 0:
        return SparsePoints.from_list([])
    valid = gt.valid()
    vs, us = np.nonzero(valid)
    if us.size == 0:
        return SparsePoints.from_list([])

    rng = np.random.default_rng(cfg.seed)
    k = max(1, cfg.cluster_count)
    picks = rng.choice(us.size, size=min(k, us.size), replace=us.size < k)
    centers = np.stack([us[picks], vs[picks]], axis=1).astype(np.float64)

    seen: set[tuple[int, int]] = set()
    out: list[tuple[int, int]] = []
    max_draws = 64 * cfg.target_count
    drawn = 0
    while len(out) < cfg.target_count and drawn < max_draws:
        batch = min(cfg.target_count, max_draws - drawn)
        cidx = np.arange(drawn, drawn + batch) % len(centers)
        pts = centers[cidx] + rng.normal(0.0, cfg.cluster_sigma, size=(batch, 2)) if cfg.cluster_sigma > 0 else centers[cidx].copy()
        drawn += batch
        pu = np.clip(np.rint(pts[:, 0]).astype(np.int64), 0, gt.width - 1)
        pv = np.clip(np.rint(pts[:, 1]).astype(np.int64), 0, gt.height - 1)
        for u, v in zip(pu.tolist(), pv.tolist()):
            if (u, v) in seen or not valid[v, u]:
                continue
            seen.add((u, v))
            out.append((u, v))
            if len(out) == cfg.target_count:
                break
        if cfg.cluster_sigma == 0 and drawn >= len(centers):
            break  # sigma 0 can never produce more than one point per center
    u = np.array([p[0] for p in out], dtype=np.int64)
    v = np.array([p[1] for p in out], dtype=np.int64)
    return SparsePoints(u, v, gt.values[v, u].astype(np.float64))


def sample_sparse(
    gt: DepthFrame, cfg: SparsifierConfig, texture: np.ndarray | None = None
) -> SparsePoints:
    if cfg.mode == "min_distance":
        return sample_min_distance(gt, cfg, texture)
    return sample_clustered(gt, cfg)


def synth_scene(cfg: SceneConfig) -> tuple[np.ndarray, DepthFrame]:
    """Procedural (rgb, depth) pair: inclined plane plus smooth radial bumps.

    The rgb image is shaded by proximity and carries a low-frequency seeded
    texture so gradient-scored sparsifiers have structure to latch onto.
    """
    rng = np.random.default_rng(cfg.seed)
    w, h = cfg.width, cfg.height
    lo, hi = cfg.depth_range
    span = hi - lo
    x, y = np.meshgrid(
        np.linspace(-0.5, 0.5, w, dtype=np.float64),
        np.linspace(-0.5, 0.5, h, dtype=np.float64),
    )

    base = lo + span * rng.uniform(0.3, 0.7)
    depth = base + span * rng.uniform(-0.6, 0.6) * x + span * rng.uniform(-0.6, 0.6) * y
    for _ in range(cfg.blob_count):
        cx, cy = rng.uniform(-0.5, 0.5, size=2)
        sigma = rng.uniform(0.06, 0.2)
        amp = rng.uniform(0.15, 0.45) * span * rng.choice([-1.0, 1.0])
        depth += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sigma * sigma))
    depth = np.clip(depth, lo, hi)

    shading = (hi - depth) / span  # brighter is closer
    texture = np.zeros_like(depth)
    for _ in range(4):
        fx, fy = rng.uniform(1.0, 7.0, size=2)
        phase = rng.uniform(0, 2 * np.pi)
        texture += rng.uniform(0.05, 0.15) * np.sin(
            2 * np.pi * (fx * x + fy * y) + phase
        )
    lum = np.clip(0.2 + 0.55 * shading + texture, 0.0, 1.0)
    tint = rng.uniform(0.85, 1.0, size=3)
    rgb = np.clip(lum[..., None] * tint[None, None, :], 0.0, 1.0).astype(np.float32)
    return rgb, DepthFrame(depth)


def synth_prediction(
    gt_inv: InverseDepthMap,
    seed: int,
    field_range: tuple[float, float] = (0.8, 1.25),
    scale_range: tuple[float, float] = (0.3, 3.0),
    shift_range: tuple[float, float] = (-0.2, 0.2),
) -> InverseDepthMap:
    """Distort metric inverse depth into an affine-invariant-style prediction.

    Output is a * z * m(u, v) + b with seeded global scale a and shift b and
    a smooth multiplicative field m within `field_range`. A global fit can
    undo (a, b) exactly only where m is 1; the local component is what dense
    realignment has to learn. Values are floored at 0.
    """
    rng = np.random.default_rng(seed)
    h, w = gt_inv.values.shape
    a = rng.uniform(*scale_range)
    b = rng.uniform(*shift_range)

    lo, hi = field_range
    if hi < lo:
        raise ValueError("field_range must be (low, high) with low <= high")
    x, y = np.meshgrid(
        np.linspace(-0.5, 0.5, w, dtype=np.float64),
        np.linspace(-0.5, 0.5, h, dtype=np.float64),
    )
    field = np.zeros_like(x)
    for _ in range(3):
        fx, fy = rng.uniform(0.5, 2.5, size=2)
        phase = rng.uniform(0, 2 * np.pi)
        field += rng.uniform(0.5, 1.0) * np.cos(2 * np.pi * (fx * x + fy * y) + phase)
    fmin, fmax = field.min(), field.max()
    if fmax - fmin < 1e-12:
        m = np.full_like(field, 0.5 * (lo + hi))
    else:
        m = lo + (hi - lo) * (field - fmin) / (fmax - fmin)

    z = gt_inv.values.astype(np.float64)
    return InverseDepthMap(np.maximum(a * z * m + b, 0.0))
