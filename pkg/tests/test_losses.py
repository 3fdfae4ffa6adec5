import numpy as np
import pytest
import torch

from depthalign import InverseDepthMap, ValidMask, loss_depth, loss_grad, loss_total
from depthalign.errors import EmptyMask
from oracles import depth_loss_oracle, grad_loss_oracle


def rand_instance(rng, shape=(8, 8), mask_p=0.8):
    z_star = rng.uniform(0.1, 5.0, size=shape).astype(np.float32)
    z_hat = (z_star + rng.normal(0, 0.5, size=shape)).astype(np.float32)
    mask = rng.uniform(size=shape) < mask_p
    if not mask.any():
        mask[0, 0] = True
    return z_hat, z_star, mask


def test_depth_loss_zero_on_equal(rng):
    z = rng.uniform(0.1, 2.0, size=(6, 6)).astype(np.float32)
    mask = np.ones((6, 6), dtype=bool)
    assert float(loss_depth(z, z, mask)) == 0.0


def test_depth_loss_mean_of_absolutes():
    z_star = np.array([[1.0, 1.0]], dtype=np.float32)
    z_hat = np.array([[1.1, 0.7]], dtype=np.float32)
    mask = np.ones((1, 2), dtype=bool)
    assert float(loss_depth(z_hat, z_star, mask)) == pytest.approx(0.2, abs=1e-7)


def test_depth_loss_ignores_masked(rng):
    z_hat, z_star, mask = rand_instance(rng)
    base = float(loss_depth(z_hat, z_star, mask))
    z_hat2 = z_hat.copy()
    z_hat2[~mask] += 1e6
    assert float(loss_depth(z_hat2, z_star, mask)) == pytest.approx(base)


def test_depth_loss_empty_mask_raises():
    z = np.zeros((2, 2), dtype=np.float32)
    with pytest.raises(EmptyMask):
        loss_depth(z, z, np.zeros((2, 2), dtype=bool))


def test_depth_loss_matches_oracle(rng):
    for _ in range(10):
        z_hat, z_star, mask = rand_instance(rng)
        ours = float(loss_depth(z_hat, z_star, mask))
        ref = depth_loss_oracle(z_hat, z_star, mask)
        assert ours == pytest.approx(ref, abs=1e-6)


def test_depth_loss_accepts_domain_types():
    z_star = InverseDepthMap([[1.0, 2.0]])
    z_hat = InverseDepthMap([[1.5, 2.0]])
    mask = ValidMask([[True, True]])
    assert float(loss_depth(z_hat, z_star, mask)) == pytest.approx(0.25)


def test_grad_loss_zero_for_constant_offset(rng):
    z_star = rng.uniform(0.5, 2.0, size=(8, 8)).astype(np.float32)
    z_hat = z_star + np.float32(0.37)
    mask = np.ones((8, 8), dtype=bool)
    assert float(loss_grad(z_hat, z_star, mask)) == pytest.approx(0.0, abs=1e-6)


def test_grad_loss_zero_on_equal(rng):
    z_star = rng.uniform(0.5, 2.0, size=(8, 8)).astype(np.float32)
    mask = np.ones((8, 8), dtype=bool)
    assert float(loss_grad(z_star, z_star, mask)) == 0.0


def test_grad_loss_matches_pyramid_oracle(rng):
    for _ in range(10):
        z_hat, z_star, mask = rand_instance(rng)
        ours = float(loss_grad(z_hat, z_star, mask, levels=3))
        ref = grad_loss_oracle(z_hat, z_star, mask, levels=3)
        assert ours == pytest.approx(ref, abs=1e-6)


def test_grad_loss_nonzero_iff_nonconstant_residual(rng):
    z_star = rng.uniform(0.5, 2.0, size=(8, 8)).astype(np.float32)
    mask = np.ones((8, 8), dtype=bool)
    bent = z_star.copy()
    bent[2:, :] += 0.5
    assert float(loss_grad(bent, z_star, mask)) > 0


def test_grad_loss_empty_mask_raises():
    z = np.zeros((4, 4), dtype=np.float32)
    with pytest.raises(EmptyMask):
        loss_grad(z, z, np.zeros((4, 4), dtype=bool))


def test_grad_loss_batched_matches_loop(rng):
    batch = [rand_instance(rng) for _ in range(3)]
    z_hat = torch.from_numpy(np.stack([b[0] for b in batch]))
    z_star = torch.from_numpy(np.stack([b[1] for b in batch]))
    mask = torch.from_numpy(np.stack([b[2] for b in batch]))
    stacked = float(loss_grad(z_hat, z_star, mask))
    individual = np.mean([float(loss_grad(*b)) for b in batch])
    assert stacked == pytest.approx(individual, rel=1e-6)


def test_total_weighted_sum(rng):
    z_hat, z_star, mask = rand_instance(rng)
    d = float(loss_depth(z_hat, z_star, mask))
    g = float(loss_grad(z_hat, z_star, mask))
    assert float(loss_total(z_hat, z_star, mask)) == pytest.approx(d + 0.5 * g, rel=1e-6)
    assert float(loss_total(z_hat, z_star, mask, grad_weight=0.0)) == pytest.approx(d)


def test_total_zero_on_equal(rng):
    z = rng.uniform(0.1, 2.0, size=(8, 8)).astype(np.float32)
    mask = np.ones((8, 8), dtype=bool)
    assert float(loss_total(z, z, mask)) == 0.0


def test_losses_nonnegative(rng):
    for _ in range(5):
        z_hat, z_star, mask = rand_instance(rng, mask_p=0.5)
        assert float(loss_depth(z_hat, z_star, mask)) >= 0
        assert float(loss_grad(z_hat, z_star, mask)) >= 0
