import numpy as np
import pytest

from depthalign import (
    ClampProfile,
    DepthFrame,
    InverseDepthMap,
    SparsePoints,
    clamp_prediction,
    eval_mask,
    from_inverse,
    get_profile,
    to_inverse,
)
from depthalign.errors import NonPositiveDepth, ShapeMismatch


def test_to_inverse_reciprocal():
    z, mask = to_inverse(DepthFrame([[2.0]]))
    assert z.values[0, 0] == 0.5
    assert mask.bits[0, 0]


def test_to_inverse_invalid_sentinel():
    z, mask = to_inverse(DepthFrame([[0.0, -1.0, np.nan]] ))
    assert not mask.bits.any()
    assert (z.values == 0).all()


def test_to_inverse_uniform_field():
    z, mask = to_inverse(DepthFrame(np.full((4, 5), 4.0)))
    assert (z.values == 0.25).all()
    assert mask.count == 20


def test_from_inverse_basic():
    d = from_inverse(InverseDepthMap([[0.5, 10.0]]), floor=1 / 80)
    assert d.values[0, 0] == pytest.approx(2.0)
    assert d.values[0, 1] == pytest.approx(0.1)


def test_from_inverse_floor_engages():
    d = from_inverse(InverseDepthMap([[0.0]]), floor=1 / 80)
    assert d.values[0, 0] == pytest.approx(80.0)


def test_round_trip_within_ulp(rng):
    depth = rng.uniform(0.11, 7.9, size=(32, 32)).astype(np.float32)
    frame = DepthFrame(depth)
    z, mask = to_inverse(frame)
    back = from_inverse(z, floor=1 / 80)
    v = frame.values[mask.bits]
    b = back.values[mask.bits]
    ulp = np.spacing(v.astype(np.float32))
    assert (np.abs(v - b) <= ulp).all()


def test_clamp_prediction_void_bounds(void_profile):
    z = InverseDepthMap([[20.0, 0.05, 1.0]])
    clamped = clamp_prediction(z, void_profile)
    assert clamped.values[0, 0] == pytest.approx(10.0)  # 5 cm -> 0.1 m
    assert clamped.values[0, 1] == pytest.approx(0.125)  # 20 m -> 8 m
    assert clamped.values[0, 2] == 1.0


def test_clamp_idempotent_bit_exact(rng, void_profile):
    z = InverseDepthMap(rng.uniform(-5, 30, size=(16, 16)))
    once = clamp_prediction(z, void_profile)
    twice = clamp_prediction(once, void_profile)
    assert np.array_equal(once.values, twice.values)


def test_eval_mask_void_range(void_profile):
    gt = DepthFrame([[0.1, 3.0, 0.0, 6.0]])
    mask = eval_mask(gt, void_profile)
    assert mask.bits.tolist() == [[False, True, False, False]]


def test_eval_mask_monotone_in_range():
    gt = DepthFrame(np.linspace(0.05, 9.0, 100).reshape(10, 10))
    wide = ClampProfile("w", 0.2, 5.0, 0.1, 8.0)
    narrow = ClampProfile("n", 0.5, 3.0, 0.1, 8.0)
    assert eval_mask(gt, narrow).count <= eval_mask(gt, wide).count


def test_profiles_registered():
    void = get_profile("void")
    assert (void.eval_min_depth, void.eval_max_depth) == (0.2, 5.0)
    assert (void.pred_min_depth, void.pred_max_depth) == (0.1, 8.0)
    ta = get_profile("tartanair")
    assert (ta.eval_min_depth, ta.eval_max_depth) == (0.2, 50.0)
    assert (ta.pred_min_depth, ta.pred_max_depth) == (0.1, 80.0)
    with pytest.raises(KeyError):
        get_profile("nope")


def test_profile_validation():
    with pytest.raises(ValueError):
        ClampProfile("bad", 5.0, 0.2, 0.1, 8.0)
    with pytest.raises(ValueError):
        ClampProfile("bad", 0.2, 5.0, 8.0, 0.1)


def test_sparse_points_validation():
    with pytest.raises(NonPositiveDepth):
        SparsePoints.from_list([(1, 1, -2.0)])
    with pytest.raises(ShapeMismatch):
        SparsePoints.from_list([(1, 1, 2.0), (1, 1, 3.0)])
    pts = SparsePoints.from_list([(1, 2, 2.0), (3, 4, 1.0)])
    with pytest.raises(ShapeMismatch):
        pts.check_in_frame(width=3, height=3)
    pts.check_in_frame(width=5, height=5)


def test_grids_are_immutable():
    frame = DepthFrame([[1.0]])
    with pytest.raises(ValueError):
        frame.values[0, 0] = 2.0
