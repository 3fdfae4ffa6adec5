import numpy as np
import pytest

from depthalign import InverseDepthMap, SparsePoints, apply_global, fit_global
from depthalign.align import AffineAlignment
from depthalign.errors import AllZeroPrediction, EmptySparse
from oracles import ga_grid_oracle, residual_sum


def _instance(z_values, depths, width=8):
    """Put prediction values at the first pixels of a width x width frame."""
    z = np.zeros((width, width), dtype=np.float32)
    us, vs = [], []
    for i, value in enumerate(z_values):
        u, v = i % width, i // width
        z[v, u] = value
        us.append(u)
        vs.append(v)
    pred = InverseDepthMap(z)
    sparse = SparsePoints(np.array(us), np.array(vs), np.array(depths, dtype=np.float64))
    return pred, sparse


def random_instance(rng, n):
    """Random affine-ish data: y = s*z + t + noise in inverse depth space."""
    z = rng.uniform(0.05, 3.0, size=n)
    s = rng.uniform(0.3, 4.0)
    t = rng.uniform(-0.5, 0.5)
    y = np.maximum(s * z + t + rng.normal(0, 0.05, size=n), 1e-3)
    width = int(np.ceil(np.sqrt(n)))
    return _instance(z, 1.0 / y, width=width)


def test_exact_affine_fit():
    pred, sparse = _instance([1.0, 2.0, 3.0], [1 / 3.0, 1 / 5.0, 1 / 7.0])
    a = fit_global(pred, sparse)
    assert not a.degenerate
    assert a.scale == pytest.approx(2.0, abs=1e-9)
    assert a.shift == pytest.approx(1.0, abs=1e-9)
    assert a.n_points == 3


def test_degenerate_constant_prediction():
    # identical z values: the 2x2 system is singular, scale-only fallback
    pred, sparse = _instance([1.0, 1.0, 1.0], [1 / 2.0, 1 / 2.1, 1 / 1.9])
    a = fit_global(pred, sparse)
    assert a.degenerate
    assert a.scale == pytest.approx(6.0 / 3.0, rel=1e-12)  # sum(z*y)/sum(z^2)
    assert a.shift == 0.0


def test_single_point_scale_only():
    pred, sparse = _instance([2.0], [1.0])
    a = fit_global(pred, sparse)
    assert a.degenerate
    assert a.scale == pytest.approx(0.5)


def test_empty_sparse_raises():
    pred = InverseDepthMap(np.ones((4, 4)))
    with pytest.raises(EmptySparse):
        fit_global(pred, SparsePoints.from_list([]))


def test_all_zero_prediction_raises():
    pred, sparse = _instance([0.0, 0.0], [2.0, 2.0])
    with pytest.raises(AllZeroPrediction):
        fit_global(pred, sparse)


def test_matches_grid_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 200))
        pred, sparse = random_instance(rng, n)
        a = fit_global(pred, sparse)
        z = pred.values[sparse.v, sparse.u].astype(np.float64)
        y = 1.0 / sparse.depth_m
        s_ref, t_ref = ga_grid_oracle(z, y)
        assert a.scale == pytest.approx(s_ref, rel=1e-6, abs=1e-9)
        assert a.shift == pytest.approx(t_ref, rel=1e-6, abs=1e-9)


def test_optimality_under_perturbation(rng):
    for _ in range(25):
        n = int(rng.integers(2, 200))
        pred, sparse = random_instance(rng, n)
        a = fit_global(pred, sparse)
        z = pred.values[sparse.v, sparse.u].astype(np.float64)
        y = 1.0 / sparse.depth_m
        best = residual_sum(z, y, a.scale, a.shift)
        for ds, dt in ((1e-3, 0), (-1e-3, 0), (0, 1e-3), (0, -1e-3)):
            assert residual_sum(z, y, a.scale + ds, a.shift + dt) >= best - 1e-12


def test_scale_equivariance(rng):
    pred, sparse = random_instance(rng, 40)
    a = fit_global(pred, sparse)
    c = 3.7
    scaled = SparsePoints(sparse.u, sparse.v, sparse.depth_m / c)  # y -> c*y
    b = fit_global(pred, scaled)
    assert b.scale == pytest.approx(c * a.scale, rel=1e-12)
    assert b.shift == pytest.approx(c * a.shift, rel=1e-12)


def test_two_distinct_points_exact(rng):
    pred, sparse = _instance([0.5, 2.5], [1.0, 0.25])
    a = fit_global(pred, sparse)
    z = pred.values[sparse.v, sparse.u].astype(np.float64)
    y = 1.0 / sparse.depth_m
    assert residual_sum(z, y, a.scale, a.shift) == pytest.approx(0.0, abs=1e-18)


def test_apply_global_linear_map(void_profile):
    pred = InverseDepthMap([[0.5]])
    out = apply_global(pred, AffineAlignment(2.0, 1.0, 1, False), void_profile)
    assert out.values[0, 0] == pytest.approx(2.0)


def test_apply_global_identity_up_to_clamp(void_profile, rng):
    pred = InverseDepthMap(rng.uniform(0.2, 5.0, size=(8, 8)))
    out = apply_global(pred, AffineAlignment(1.0, 0.0, 1, False), void_profile)
    assert np.allclose(out.values, np.clip(pred.values, 0.125, 10.0))


def test_apply_global_negative_scale_clamps(void_profile):
    pred = InverseDepthMap([[0.5]])
    out = apply_global(pred, AffineAlignment(-1.0, 0.0, 1, False), void_profile)
    assert out.values[0, 0] == pytest.approx(0.125)  # floor at 1/8 per meter
