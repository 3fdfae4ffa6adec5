"""Training losses on inverse depth: masked L1 plus multiscale gradient matching.

Both terms ignore pixels outside the validity mask. The gradient term runs
on an error pyramid built by 2x2 average pooling, with the mask AND-pooled
alongside (a pooled pixel is valid only if all four sources were valid); a
forward difference counts only when both of its pixels are valid.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F

from ..core import InverseDepthMap, ValidMask
from ..errors import EmptyMask

GRAD_LOSS_WEIGHT = 0.5
PYRAMID_LEVELS = 3


def _as_tensor(value, attr):
    if isinstance(value, torch.Tensor):
        return value
    if isinstance(value, (InverseDepthMap, ValidMask)):
        value = getattr(value, attr)
    return torch.from_numpy(np.array(value))


def _as_tensors(z_hat, z_star, mask):
    return (
        _as_tensor(z_hat, "values"),
        _as_tensor(z_star, "values"),
        _as_tensor(mask, "bits"),
    )


def loss_depth(z_hat, z_star, mask) -> torch.Tensor:
    """Masked mean absolute error, (1/M) * sum |z*_i - z_hat_i|.

    Accepts torch tensors of shape (..., H, W) or the numpy domain types.

    Raises:
        EmptyMask: a sample has no valid pixels.
    """
    z_hat, z_star, mask = _as_tensors(z_hat, z_star, mask)
    m = mask.to(z_hat.dtype)
    counts = m.sum(dim=(-2, -1))
    if (counts == 0).any():
        raise EmptyMask("depth loss over an empty mask")
    per_sample = (torch.abs(z_star - z_hat) * m).sum(dim=(-2, -1)) / counts
    return per_sample.mean()


def _pool_level(residual: torch.Tensor, mask_f: torch.Tensor):
    squeeze = residual.ndim == 2
    if squeeze:
        residual = residual.unsqueeze(0)
        mask_f = mask_f.unsqueeze(0)
    r = F.avg_pool2d(residual.unsqueeze(1), 2).squeeze(1)
    # Exact AND: average of four flags is 1.0 only when all four are set.
    m = F.avg_pool2d(mask_f.unsqueeze(1), 2).squeeze(1)
    m = (m == 1.0).to(mask_f.dtype)
    if squeeze:
        r = r.squeeze(0)
        m = m.squeeze(0)
    return r, m


def loss_grad(z_hat, z_star, mask, levels: int = PYRAMID_LEVELS) -> torch.Tensor:
    """Multiscale mean absolute forward-difference of the error z* - z_hat.

    Each pyramid level contributes (1/M_k) * sum(|dx| + |dy|) over valid
    differences; levels with an empty pooled mask contribute 0 without
    shrinking the level count.

    Raises:
        EmptyMask: no valid pixels at the finest level.
    """
    if levels < 1:
        raise ValueError("need at least one pyramid level")
    z_hat, z_star, mask = _as_tensors(z_hat, z_star, mask)
    residual = z_star - z_hat
    m = mask.to(residual.dtype)
    if (m.sum(dim=(-2, -1)) == 0).any():
        raise EmptyMask("gradient loss over an empty mask")

    total = None
    for level in range(levels):
        if level > 0:
            if residual.shape[-1] < 2 or residual.shape[-2] < 2:
                break
            residual, m = _pool_level(residual, m)
        counts = m.sum(dim=(-2, -1))
        dx = residual[..., :, 1:] - residual[..., :, :-1]
        vx = m[..., :, 1:] * m[..., :, :-1]
        dy = residual[..., 1:, :] - residual[..., :-1, :]
        vy = m[..., 1:, :] * m[..., :-1, :]
        level_sum = (dx.abs() * vx).sum(dim=(-2, -1)) + (dy.abs() * vy).sum(
            dim=(-2, -1)
        )
        per_sample = torch.where(
            counts > 0, level_sum / counts.clamp(min=1), torch.zeros_like(level_sum)
        )
        total = per_sample if total is None else total + per_sample
    return (total / levels).mean()


def loss_total(
    z_hat,
    z_star,
    mask,
    grad_weight: float = GRAD_LOSS_WEIGHT,
    levels: int = PYRAMID_LEVELS,
) -> torch.Tensor:
    """Depth term plus grad_weight times the multiscale gradient term."""
    value = loss_depth(z_hat, z_star, mask)
    if grad_weight != 0:
        value = value + grad_weight * loss_grad(z_hat, z_star, mask, levels)
    return value
