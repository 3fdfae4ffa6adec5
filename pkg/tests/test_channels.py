import numpy as np
import pytest

from depthalign import SparsePoints, confidence_map, grayscale, scharr_gradients
from depthalign.scaffold import _disk_footprint, _gaussian_kernel
from oracles import correlate2d_oracle, dilate_disk_oracle, scharr_oracle


def test_confidence_empty_all_zero():
    cm = confidence_map(SparsePoints.from_list([]), 16, 16)
    assert (cm.values == 0).all()


def test_confidence_single_point_matches_oracle():
    sparse = SparsePoints.from_list([(8, 8, 1.0)])
    cm = confidence_map(sparse, 17, 17)
    impulses = np.zeros((17, 17), dtype=bool)
    impulses[8, 8] = True
    expected = correlate2d_oracle(
        dilate_disk_oracle(impulses, 3).astype(np.float64), _gaussian_kernel(5, 1.0)
    )
    assert np.abs(cm.values - expected).max() <= 1e-6
    # plateau where the 5x5 blur support sits fully inside the dilated disk
    assert cm.values[8, 8] == pytest.approx(1.0, abs=1e-6)
    assert cm.values.min() == 0.0


def test_confidence_corner_point_bounded():
    sparse = SparsePoints.from_list([(0, 0, 1.0)])
    cm = confidence_map(sparse, 12, 12)
    assert cm.values.max() <= 1.0 + 1e-9
    assert cm.values.min() >= 0.0


def test_confidence_random_matches_oracle(rng):
    h = w = 14
    coords = rng.choice(h * w, size=6, replace=False)
    sparse = SparsePoints(coords % w, coords // w, np.full(6, 2.0))
    cm = confidence_map(sparse, w, h)
    impulses = np.zeros((h, w), dtype=bool)
    impulses[coords // w, coords % w] = True
    expected = correlate2d_oracle(
        dilate_disk_oracle(impulses, 3).astype(np.float64), _gaussian_kernel(5, 1.0)
    )
    assert np.abs(cm.values - expected).max() <= 1e-6


def test_disk_footprint_radius3():
    disk = _disk_footprint(3)
    assert disk.shape == (7, 7)
    assert disk[3, 3] and disk[0, 3] and disk[3, 0]
    assert not disk[0, 0]  # corner is sqrt(18) > 3 away


def test_gaussian_kernel_normalized():
    k = _gaussian_kernel(5, 1.0)
    assert k.shape == (5, 5)
    assert k.sum() == pytest.approx(1.0)
    assert k[2, 2] == k.max()


def test_scharr_constant_zero():
    assert (scharr_gradients(np.full((10, 10), 0.7)) == 0).all()


def test_scharr_vertical_edge():
    img = np.zeros((12, 12), dtype=np.float64)
    img[:, 6:] = 1.0
    mag = scharr_gradients(img)
    assert mag[6, 5] == pytest.approx(1.0)  # peak response along the edge
    assert mag[6, 0] == 0.0


def test_scharr_matches_naive_oracle(rng):
    img = rng.uniform(0, 1, size=(8, 8))
    mag = scharr_gradients(img)
    assert np.abs(mag - scharr_oracle(img)).max() <= 1e-6


def test_grayscale_weights():
    white = np.ones((2, 2, 3))
    assert grayscale(white) == pytest.approx(np.ones((2, 2)))
    green = np.zeros((1, 1, 3))
    green[..., 1] = 1.0
    assert grayscale(green)[0, 0] == pytest.approx(0.587)


def test_grayscale_passthrough(rng):
    x = rng.uniform(0, 1, size=(4, 4))
    rgb = np.stack([x, x, x], axis=-1)
    assert np.abs(grayscale(rgb) - x).max() <= 1e-6
