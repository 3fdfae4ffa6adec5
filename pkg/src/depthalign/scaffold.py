"""Dense scale-map scaffolding and auxiliary network input channels.

Scale anchors are the ratios of sparse metric inverse depth to globally
aligned inverse depth. Inside the anchors' convex hull the scaffold is a
linear (barycentric) interpolation over a Delaunay triangulation; outside
it is exactly 1. Fewer than three non-collinear anchors yield the identity
map, since interpolation over a point or line is meaningless.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import Delaunay

from .core import InverseDepthMap, SparsePoints
from .errors import DuplicateAnchorPixel

log = logging.getLogger(__name__)

# Anchors where aligned inverse depth is below this are dropped: the ratio
# would be dominated by the near-zero denominator.
EPS_Z = 1e-6


@dataclass(frozen=True)
class ScaleAnchor:
    """A known scale correction ratio at one pixel."""

    u: int
    v: int
    ratio: float


@dataclass(frozen=True)
class ScaleScaffold:
    """Dense dimensionless scale grid; 1.0 outside the anchor convex hull."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float32, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ConfidenceMap:
    """Soft map in [0, 1] marking neighborhoods of known sparse depth."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float32, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def compute_anchors(
    sparse: SparsePoints, z_tilde: InverseDepthMap
) -> list[ScaleAnchor]:
    """Scale anchors ratio = (1/depth) / z_tilde at each sparse pixel.

    Points where the aligned prediction is below EPS_Z are dropped silently;
    the caller can compare lengths to report the count.
    """
    sparse.check_in_frame(z_tilde.width, z_tilde.height)
    anchors = []
    dropped = 0
    for u, v, d in sparse:
        zt = float(z_tilde.values[v, u])
        if zt < EPS_Z:
            dropped += 1
            continue
        anchors.append(ScaleAnchor(u, v, (1.0 / d) / zt))
    if dropped:
        log.debug("dropped %d anchors with near-zero aligned inverse depth", dropped)
    return anchors


def _collinear(x: np.ndarray, y: np.ndarray) -> bool:
    # Exact for integer pixel coordinates: all cross products vanish.
    dx = x - x[0]
    dy = y - y[0]
    idx = np.argmax(dx * dx + dy * dy)
    if dx[idx] == 0 and dy[idx] == 0:
        return True
    cross = dx[idx] * dy - dy[idx] * dx
    return bool(np.all(cross == 0))


def build_scaffold(anchors, width: int, height: int) -> ScaleScaffold:
    """Interpolate anchor ratios over their convex hull; 1.0 elsewhere.

    Triangulates anchor pixel coordinates (sorted by (v, u) so the output is
    deterministic) and fills each triangle by barycentric interpolation.
    Returns the all-ones identity map when fewer than three non-collinear
    anchors exist.

    Raises:
        DuplicateAnchorPixel: two anchors share a pixel.
    """
    anchors = sorted(anchors, key=lambda a: (a.v, a.u))
    if len({(a.u, a.v) for a in anchors}) != len(anchors):
        raise DuplicateAnchorPixel("two scale anchors share a pixel")

    if len(anchors) < 3:
        return ScaleScaffold(np.ones((height, width), dtype=np.float32))

    ax = np.array([a.u for a in anchors], dtype=np.float64)
    ay = np.array([a.v for a in anchors], dtype=np.float64)
    ratios = np.array([a.ratio for a in anchors], dtype=np.float64)
    if _collinear(ax, ay):
        return ScaleScaffold(np.ones((height, width), dtype=np.float32))

    tri = Delaunay(np.stack([ax, ay], axis=1))

    out = np.ones((height, width), dtype=np.float64)
    claimed = np.zeros((height, width), dtype=bool)
    for ia, ib, ic in tri.simplices:
        x_a, y_a = ax[ia], ay[ia]
        x_b, y_b = ax[ib], ay[ib]
        x_c, y_c = ax[ic], ay[ic]
        den = (x_b - x_a) * (y_c - y_a) - (x_c - x_a) * (y_b - y_a)
        if den == 0:
            continue
        x0 = max(int(min(x_a, x_b, x_c)), 0)
        x1 = min(int(max(x_a, x_b, x_c)), width - 1)
        y0 = max(int(min(y_a, y_b, y_c)), 0)
        y1 = min(int(max(y_a, y_b, y_c)), height - 1)
        if x1 < x0 or y1 < y0:
            continue
        xs, ys = np.meshgrid(
            np.arange(x0, x1 + 1, dtype=np.float64),
            np.arange(y0, y1 + 1, dtype=np.float64),
        )
        # Cross products of integer coordinates are exact in doubles, so the
        # inside test has no epsilon and hull-exterior pixels are never hit.
        la = ((x_b - xs) * (y_c - ys) - (x_c - xs) * (y_b - ys)) / den
        lb = ((xs - x_a) * (y_c - y_a) - (x_c - x_a) * (ys - y_a)) / den
        lc = ((x_b - x_a) * (ys - y_a) - (xs - x_a) * (y_b - y_a)) / den
        inside = (la >= 0) & (lb >= 0) & (lc >= 0)
        window = claimed[y0 : y1 + 1, x0 : x1 + 1]
        write = inside & ~window
        vals = la * ratios[ia] + lb * ratios[ib] + lc * ratios[ic]
        region = out[y0 : y1 + 1, x0 : x1 + 1]
        region[write] = vals[write]
        window |= inside

    return ScaleScaffold(out)


def _disk_footprint(radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    dx, dy = np.meshgrid(r, r)
    return dx * dx + dy * dy <= radius * radius


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    r = np.arange(size) - size // 2
    dx, dy = np.meshgrid(r, r)
    k = np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
    return k / k.sum()


def confidence_map(sparse: SparsePoints, width: int, height: int) -> ConfidenceMap:
    """Soft confidence field around sparse depth locations.

    A binary impulse map is dilated with a 7x7 disk (radius 3) and blurred
    with a normalized 5x5 Gaussian (sigma 1.0, reflect-padded), keeping
    values in [0, 1]. An empty sparse set yields all zeros.
    """
    impulses = np.zeros((height, width), dtype=bool)
    if len(sparse):
        sparse.check_in_frame(width, height)
        impulses[sparse.v, sparse.u] = True
    dilated = ndimage.binary_dilation(impulses, structure=_disk_footprint(3))
    blurred = ndimage.correlate(
        dilated.astype(np.float64), _gaussian_kernel(5, 1.0), mode="reflect"
    )
    return ConfidenceMap(blurred)


SCHARR_X = (
    np.array([[-3, 0, 3], [-10, 0, 10], [-3, 0, 3]], dtype=np.float64) / 32.0
)
SCHARR_Y = SCHARR_X.T


def scharr_gradients(gray: np.ndarray) -> np.ndarray:
    """Scharr gradient magnitude of a [0, 1] luminance grid, rescaled to [0, 1].

    Constant inputs come back as all zeros.
    """
    g = np.asarray(gray, dtype=np.float64)
    gx = ndimage.correlate(g, SCHARR_X, mode="reflect")
    gy = ndimage.correlate(g, SCHARR_Y, mode="reflect")
    mag = np.sqrt(gx * gx + gy * gy)
    peak = mag.max()
    if peak > 0:
        mag /= peak
    return mag.astype(np.float32)


def grayscale(rgb: np.ndarray) -> np.ndarray:
    """Luminance of an (H, W, 3) image in [0, 1]: 0.299 R + 0.587 G + 0.114 B."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {rgb.shape}")
    lum = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return lum.astype(np.float32)
