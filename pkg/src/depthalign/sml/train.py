"""Deterministic training loop for the scale-residual network.

Optimization uses AdamW with decoupled weight decay and a step scheduler
that halves the learning rate every `lr_step_epochs` epochs. Given a fixed
seed, initialization and shuffling are fixed, so repeated runs produce
identical weights and loss traces.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass

import numpy as np
import torch

from ..errors import EmptyMask, NonFiniteLoss
from .losses import GRAD_LOSS_WEIGHT, PYRAMID_LEVELS, loss_total
from .model import ScaleMapLearner, SmlConfig, make_model

log = logging.getLogger(__name__)

# Shift regression destabilizes at the default rate; scale it down.
SHIFT_LR_FACTOR = 0.8


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 5e-4
    betas: tuple[float, float] = (0.9, 0.999)
    weight_decay: float = 0.001
    lr_step_epochs: int = 5
    epochs: int = 20
    batch: int = 16
    grad_loss_weight: float = GRAD_LOSS_WEIGHT
    pyramid_levels: int = PYRAMID_LEVELS
    seed: int = 0

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError("lr must be >= 0")
        if self.pyramid_levels < 1:
            raise ValueError("pyramid_levels must be >= 1")


@dataclass(frozen=True)
class TrainingSample:
    """One supervised frame: stacked input channels, target, validity mask."""

    inputs: np.ndarray  # (C, H, W) float32; channel 0 is aligned inverse depth
    target: np.ndarray  # (H, W) float32 metric inverse depth
    mask: np.ndarray  # (H, W) bool


def _predict(model: ScaleMapLearner, x: torch.Tensor, z_tilde: torch.Tensor):
    # Training-time forward: no clamping, so gradients never die at the rails.
    out = model(x)
    if isinstance(out, tuple):
        residual, shift = out
        return torch.relu(1.0 + residual) * z_tilde + shift
    return torch.relu(1.0 + out) * z_tilde


def _batched(samples, order, batch):
    for start in range(0, len(order), batch):
        idx = order[start : start + batch]
        yield (
            torch.from_numpy(np.stack([samples[i].inputs for i in idx])),
            torch.from_numpy(np.stack([samples[i].target for i in idx])),
            torch.from_numpy(np.stack([samples[i].mask for i in idx])),
        )


def train_sml(
    dataset,
    cfg: TrainConfig,
    sml_cfg: SmlConfig,
    model: ScaleMapLearner | None = None,
) -> tuple[ScaleMapLearner, list[float]]:
    """Train on an iterable of TrainingSample; returns (model, per-epoch losses).

    Raises:
        NonFiniteLoss: a batch loss went NaN/inf; aborts with diagnostics.
        EmptyMask: a sample carries no valid supervision pixels.
    """
    samples = list(dataset)
    if not samples:
        raise ValueError("training dataset is empty")
    if model is None:
        model = make_model(sml_cfg, seed=cfg.seed)
    lr = cfg.lr * (SHIFT_LR_FACTOR if sml_cfg.regress_shift else 1.0)
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=lr, betas=cfg.betas, weight_decay=cfg.weight_decay
    )
    scheduler = torch.optim.lr_scheduler.StepLR(
        optimizer, step_size=cfg.lr_step_epochs, gamma=0.5
    )

    trace: list[float] = []
    model.train()
    for epoch in range(cfg.epochs):
        rng = np.random.default_rng(cfg.seed + 7919 * epoch)
        order = rng.permutation(len(samples))
        epoch_loss = 0.0
        n_batches = 0
        for x, target, mask in _batched(samples, order, cfg.batch):
            z_tilde = x[:, 0]
            optimizer.zero_grad()
            z_hat = _predict(model, x, z_tilde)
            loss = loss_total(
                z_hat, target, mask, cfg.grad_loss_weight, cfg.pyramid_levels
            )
            value = loss.detach().item()
            if not np.isfinite(value):
                raise NonFiniteLoss(
                    f"loss became {value} at epoch {epoch}, batch {n_batches} "
                    f"(lr={scheduler.get_last_lr()[0]:g})"
                )
            loss.backward()
            optimizer.step()
            epoch_loss += value
            n_batches += 1
        scheduler.step()
        trace.append(epoch_loss / n_batches)
        log.info("epoch %d/%d: loss %.6f", epoch + 1, cfg.epochs, trace[-1])
    return model, trace


def evaluate_loss(model: ScaleMapLearner, samples, cfg: TrainConfig) -> float:
    """Mean total loss over samples without touching the weights."""
    model.eval()
    total = 0.0
    with torch.no_grad():
        for s in samples:
            x = torch.from_numpy(s.inputs).unsqueeze(0)
            z_hat = _predict(model, x, x[:, 0])
            total += float(
                loss_total(
                    z_hat,
                    torch.from_numpy(s.target).unsqueeze(0),
                    torch.from_numpy(s.mask).unsqueeze(0),
                    cfg.grad_loss_weight,
                    cfg.pyramid_levels,
                )
            )
    return total / len(samples)


def gradient_check(
    model: ScaleMapLearner,
    sample: TrainingSample,
    epsilon: float = 1e-3,
    n_params: int = 50,
    seed: int = 0,
    grad_weight: float = GRAD_LOSS_WEIGHT,
) -> float:
    """Max relative error between autograd and central finite differences.

    Runs in double precision on a randomly sampled subset of parameters.
    The sample should be small (<= 16x16) to keep the sweep cheap. The
    passed model is left untouched; the sweep works on a copy.
    """
    model = copy.deepcopy(model).double()
    x = torch.from_numpy(sample.inputs).double().unsqueeze(0)
    target = torch.from_numpy(sample.target).double().unsqueeze(0)
    mask = torch.from_numpy(sample.mask).unsqueeze(0)

    def objective() -> torch.Tensor:
        return loss_total(_predict(model, x, x[:, 0]), target, mask, grad_weight)

    model.zero_grad()
    objective().backward()
    params = [p for p in model.parameters() if p.grad is not None]

    rng = np.random.default_rng(seed)
    sizes = np.array([p.numel() for p in params])
    flat_choices = rng.choice(int(sizes.sum()), size=min(n_params, int(sizes.sum())), replace=False)

    worst = 0.0
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    with torch.no_grad():
        for flat_idx in sorted(flat_choices.tolist()):
            pi = int(np.searchsorted(offsets, flat_idx, side="right") - 1)
            local = flat_idx - offsets[pi]
            p = params[pi]
            analytic = float(p.grad.view(-1)[local])
            original = float(p.view(-1)[local])
            p.view(-1)[local] = original + epsilon
            hi = float(objective())
            p.view(-1)[local] = original - epsilon
            lo = float(objective())
            p.view(-1)[local] = original
            numeric = (hi - lo) / (2.0 * epsilon)
            denom = max(abs(analytic), abs(numeric))
            err = abs(analytic - numeric) if denom < 1e-12 else abs(analytic - numeric) / denom
            worst = max(worst, err)
    return worst
