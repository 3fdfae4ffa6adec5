import numpy as np
import pytest
import torch

from depthalign import (
    InverseDepthMap,
    ScaleScaffold,
    SmlConfig,
    apply_residual,
    clamp_prediction,
    make_model,
    sml_forward,
    stack_inputs,
)
from depthalign.errors import ShapeMismatch


def random_inputs(rng, size=96, channels=2):
    return rng.standard_normal((channels, size, size)).astype(np.float32)


def test_output_shape_matches_input(rng):
    model = make_model(SmlConfig(), seed=0)
    r = sml_forward(model, random_inputs(rng, 96))
    assert r.shape == (96, 96)


def test_rectangular_input(rng):
    model = make_model(SmlConfig(), seed=0)
    r = sml_forward(model, rng.standard_normal((2, 48, 80)).astype(np.float32))
    assert r.shape == (48, 80)


def test_zero_head_means_zero_residual(rng):
    model = make_model(SmlConfig(), seed=1)
    r = sml_forward(model, random_inputs(rng))
    assert (r == 0).all()


def test_residual_nonzero_after_head_perturbation(rng):
    model = make_model(SmlConfig(), seed=1)
    with torch.no_grad():
        model.head_scale.conv3.weight.fill_(0.05)
        model.head_scale.conv3.bias.fill_(0.01)
    r = sml_forward(model, random_inputs(rng))
    assert np.abs(r).max() > 0


def test_wrong_channel_count_raises(rng):
    model = make_model(SmlConfig(in_channels=2), seed=0)
    with pytest.raises(ShapeMismatch):
        sml_forward(model, random_inputs(rng, channels=3))


def test_indivisible_dims_raise(rng):
    model = make_model(SmlConfig(), seed=0)
    with pytest.raises(ShapeMismatch):
        sml_forward(model, rng.standard_normal((2, 50, 50)).astype(np.float32))


def test_batch_independence(rng):
    model = make_model(SmlConfig(), seed=2)
    with torch.no_grad():
        model.head_scale.conv3.weight.normal_(0, 0.05)
    a = random_inputs(rng)
    b = random_inputs(rng)
    batch = torch.from_numpy(np.stack([a, b]))
    model.eval()
    with torch.no_grad():
        joint = model(batch).numpy()
    assert np.allclose(joint[0], sml_forward(model, a), atol=1e-6)
    assert np.allclose(joint[1], sml_forward(model, b), atol=1e-6)


def test_shift_head_variant(rng):
    model = make_model(SmlConfig(regress_shift=True), seed=0)
    out = sml_forward(model, random_inputs(rng))
    assert isinstance(out, tuple)
    r, t = out
    assert r.shape == t.shape == (96, 96)


def test_stack_inputs_normalization():
    z = InverseDepthMap(np.full((16, 16), 0.5))
    scaffold = ScaleScaffold(np.ones((16, 16)))
    x = stack_inputs(z, scaffold)
    assert x.shape == (2, 16, 16)
    assert (x[0] == 0.5).all()
    assert (x[1] == 0.0).all()  # identity scaffold centers at 0


def test_stack_inputs_shape_mismatch():
    z = InverseDepthMap(np.ones((8, 8)))
    scaffold = ScaleScaffold(np.ones((8, 10)))
    with pytest.raises(ShapeMismatch):
        stack_inputs(z, scaffold)


def test_apply_residual_identity(void_profile, rng):
    z = InverseDepthMap(rng.uniform(0.2, 2.0, size=(8, 8)))
    out = apply_residual(z, np.zeros((8, 8), np.float32), None, void_profile)
    expected = clamp_prediction(z, void_profile)
    assert np.array_equal(out.values, expected.values)


def test_apply_residual_relu_floor(void_profile):
    z = InverseDepthMap([[1.0]])
    out = apply_residual(z, np.array([[-2.0]], np.float32), None, void_profile)
    assert out.values[0, 0] == pytest.approx(0.125)  # scale 0, clamped up


def test_apply_residual_doubling(void_profile):
    z = InverseDepthMap([[0.5]])
    out = apply_residual(z, np.array([[1.0]], np.float32), None, void_profile)
    assert out.values[0, 0] == pytest.approx(1.0)


def test_apply_residual_shift_zero_matches_scale_only(void_profile, rng):
    z = InverseDepthMap(rng.uniform(0.2, 2.0, size=(8, 8)))
    r = rng.normal(0, 0.3, size=(8, 8)).astype(np.float32)
    zero_t = np.zeros((8, 8), np.float32)
    a = apply_residual(z, r, zero_t, void_profile)
    b = apply_residual(z, r, None, void_profile)
    assert np.array_equal(a.values, b.values)


def test_apply_residual_stays_in_clamp_range(void_profile, rng):
    z = InverseDepthMap(rng.uniform(0.0, 5.0, size=(8, 8)))
    r = rng.normal(0, 2.0, size=(8, 8)).astype(np.float32)
    out = apply_residual(z, r, None, void_profile)
    assert out.values.min() >= np.float32(1 / 8)
    assert out.values.max() <= np.float32(10.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SmlConfig(in_channels=1)
    with pytest.raises(ValueError):
        SmlConfig(stage_widths=(8, 16, 32))
