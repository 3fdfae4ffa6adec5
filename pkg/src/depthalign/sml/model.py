"""Dense scale-residual regression network.

A compact four-stage convolutional encoder with a feature-fusion decoder.
The network consumes stacked input channels (aligned inverse depth plus the
scale scaffold, optionally extra channels) and regresses a per-pixel scale
residual map; a second identical head regresses a shift map when enabled.

The final 1x1 convolution of every output head is zero-initialized, so a
freshly built network is an exact no-op: residual 0 means the output depth
equals the clamped globally-aligned input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..core import ClampProfile, InverseDepthMap, clamp_prediction
from ..errors import ShapeMismatch
from ..scaffold import ScaleScaffold

DOWNSAMPLE_FACTOR = 16


@dataclass(frozen=True)
class SmlConfig:
    """Architecture hyperparameters; tensor shapes follow from these alone."""

    in_channels: int = 2
    stage_widths: tuple[int, int, int, int] = (16, 32, 64, 128)
    regress_shift: bool = False
    input_resolution: int = 96

    def __post_init__(self):
        if self.in_channels < 2:
            raise ValueError("need at least the depth and scaffold channels")
        if len(self.stage_widths) != 4:
            raise ValueError("exactly four encoder stages are supported")


class ResidualConvUnit(nn.Module):
    """conv-ReLU-conv-ReLU with an identity skip; no normalization layers."""

    def __init__(self, width: int):
        super().__init__()
        self.conv1 = nn.Conv2d(width, width, 3, padding=1)
        self.conv2 = nn.Conv2d(width, width, 3, padding=1)

    def forward(self, x):
        h = F.relu(self.conv1(x))
        h = F.relu(self.conv2(h))
        return x + h


class FeatureFusion(nn.Module):
    """Merge a skip connection into the decoder path and move up one level.

    Applies a ResidualConvUnit to the skip, adds the incoming decoder
    feature (if any), refines with a second ResidualConvUnit, optionally
    upsamples 2x bilinearly, and projects to the next level's width.
    """

    def __init__(self, width: int, out_width: int, upsample: bool = True):
        super().__init__()
        self.rcu_skip = ResidualConvUnit(width)
        self.rcu_out = ResidualConvUnit(width)
        self.project = nn.Conv2d(width, out_width, 1)
        self.upsample = upsample

    def forward(self, skip, incoming=None):
        h = self.rcu_skip(skip)
        if incoming is not None:
            h = h + incoming
        h = self.rcu_out(h)
        if self.upsample:
            h = F.interpolate(h, scale_factor=2, mode="bilinear", align_corners=False)
        return self.project(h)


class OutputHead(nn.Module):
    """3x3 conv, 2x upsample, 3x3 conv, ReLU, zero-initialized 1x1 conv."""

    def __init__(self, width: int):
        super().__init__()
        mid = max(width // 2, 4)
        self.conv1 = nn.Conv2d(width, mid, 3, padding=1)
        self.conv2 = nn.Conv2d(mid, mid, 3, padding=1)
        self.conv3 = nn.Conv2d(mid, 1, 1)
        nn.init.zeros_(self.conv3.weight)
        nn.init.zeros_(self.conv3.bias)

    def forward(self, x):
        h = self.conv1(x)
        h = F.interpolate(h, scale_factor=2, mode="bilinear", align_corners=False)
        h = F.relu(self.conv2(h))
        return self.conv3(h)


class _EncoderStage(nn.Module):
    """Two 3x3 convolutions with ReLU; the second one downsamples 2x."""

    def __init__(self, in_width: int, width: int):
        super().__init__()
        self.conv1 = nn.Conv2d(in_width, width, 3, padding=1)
        self.conv2 = nn.Conv2d(width, width, 3, padding=1, stride=2)

    def forward(self, x):
        return F.relu(self.conv2(F.relu(self.conv1(x))))


class ScaleMapLearner(nn.Module):
    """Encoder-decoder regressing a dense scale residual (and optional shift).

    Skip features come out of the four encoder stages at 1/2 .. 1/16 of the
    input resolution; four fusion blocks walk back up, with the last 2x step
    living in the output head, so the residual matches the input size.
    """

    def __init__(self, config: SmlConfig):
        super().__init__()
        self.config = config
        w1, w2, w3, w4 = config.stage_widths
        self.stage1 = _EncoderStage(config.in_channels, w1)
        self.stage2 = _EncoderStage(w1, w2)
        self.stage3 = _EncoderStage(w2, w3)
        self.stage4 = _EncoderStage(w3, w4)
        self.fuse4 = FeatureFusion(w4, w3)
        self.fuse3 = FeatureFusion(w3, w2)
        self.fuse2 = FeatureFusion(w2, w1)
        self.fuse1 = FeatureFusion(w1, w1, upsample=False)
        self.head_scale = OutputHead(w1)
        self.head_shift = OutputHead(w1) if config.regress_shift else None

    def forward(self, x):
        if x.ndim != 4:
            raise ShapeMismatch(f"expected (B, C, H, W) input, got {tuple(x.shape)}")
        b, c, h, w = x.shape
        if c != self.config.in_channels:
            raise ShapeMismatch(
                f"expected {self.config.in_channels} input channels, got {c}"
            )
        if h % DOWNSAMPLE_FACTOR or w % DOWNSAMPLE_FACTOR:
            raise ShapeMismatch(
                f"spatial dims must be divisible by {DOWNSAMPLE_FACTOR}, got {h}x{w}"
            )
        f1 = self.stage1(x)
        f2 = self.stage2(f1)
        f3 = self.stage3(f2)
        f4 = self.stage4(f3)
        d = self.fuse4(f4)
        d = self.fuse3(f3, d)
        d = self.fuse2(f2, d)
        d = self.fuse1(f1, d)
        residual = self.head_scale(d).squeeze(1)
        if self.head_shift is None:
            return residual
        return residual, self.head_shift(d).squeeze(1)


def make_model(config: SmlConfig, seed: int = 0) -> ScaleMapLearner:
    """Build a deterministically initialized network for the given config."""
    torch.manual_seed(seed)
    return ScaleMapLearner(config)


def stack_inputs(
    z_tilde: InverseDepthMap, scaffold: ScaleScaffold, *extras: np.ndarray
) -> np.ndarray:
    """Stack network input channels as a (C, H, W) float32 array.

    Aligned inverse depth goes in untouched (1/m); the scaffold is shifted
    by -1 so both channels sit near 0 at the identity.
    """
    channels = [z_tilde.values, scaffold.values - np.float32(1.0)]
    channels.extend(np.asarray(e, dtype=np.float32) for e in extras)
    shapes = {ch.shape for ch in channels}
    if len(shapes) != 1:
        raise ShapeMismatch(f"input channels disagree on shape: {sorted(shapes)}")
    return np.stack(channels, axis=0).astype(np.float32)


def sml_forward(
    model: ScaleMapLearner, inputs: np.ndarray
) -> np.ndarray | tuple[np.ndarray, np.ndarray]:
    """Run the network on one stacked-channel frame, returning numpy maps."""
    x = torch.from_numpy(np.ascontiguousarray(inputs, dtype=np.float32))
    if x.ndim != 3:
        raise ShapeMismatch(f"expected (C, H, W) input, got {tuple(x.shape)}")
    model.eval()
    with torch.no_grad():
        out = model(x.unsqueeze(0))
    if isinstance(out, tuple):
        return out[0].squeeze(0).numpy(), out[1].squeeze(0).numpy()
    return out.squeeze(0).numpy()


def apply_residual(
    z_tilde: InverseDepthMap,
    residual: np.ndarray,
    shift: np.ndarray | None,
    profile: ClampProfile,
) -> InverseDepthMap:
    """Apply z_hat = max(0, 1 + r) * z_tilde (+ shift), then clamp."""
    r = np.asarray(residual, dtype=np.float32)
    if r.shape != z_tilde.values.shape:
        raise ShapeMismatch(
            f"residual shape {r.shape} != depth shape {z_tilde.values.shape}"
        )
    z_hat = np.maximum(np.float32(0.0), np.float32(1.0) + r) * z_tilde.values
    if shift is not None:
        t = np.asarray(shift, dtype=np.float32)
        if t.shape != z_tilde.values.shape:
            raise ShapeMismatch(
                f"shift shape {t.shape} != depth shape {z_tilde.values.shape}"
            )
        z_hat = z_hat + t
    return clamp_prediction(InverseDepthMap(z_hat), profile)
