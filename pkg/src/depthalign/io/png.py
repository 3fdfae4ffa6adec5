"""16-bit PNG depth codecs.

Two metric encodings: "mm" stores millimeters (value/1000 = meters) and
"q8.8" stores 1/256-meter steps (value/256 = meters), matching common
published depth data. Value 0 is the invalid sentinel. Inverse-depth grids
use a fixed 1/1000 (1/m) quantization; since downstream alignment refits
scale and shift, the quantization scale carries no semantic weight.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..core import DepthFrame, InverseDepthMap
from ..errors import BadFormat, IoFailure, UnsupportedBitDepth

ENCODINGS = {"mm": 1000.0, "q8.8": 256.0}
INVERSE_QUANTUM = 1000.0  # counts per 1/m


def _encoding_scale(encoding: str) -> float:
    try:
        return ENCODINGS[encoding]
    except KeyError:
        raise BadFormat(f"unknown depth encoding {encoding!r}; have {sorted(ENCODINGS)}")


def _read_u16(path) -> np.ndarray:
    try:
        img = Image.open(path)
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise BadFormat(f"{path}: not a readable PNG ({exc})")
    if img.mode not in ("I", "I;16", "I;16B", "I;16L"):
        raise UnsupportedBitDepth(
            f"{path}: expected 16-bit single-channel PNG, got mode {img.mode!r}"
        )
    arr = np.asarray(img, dtype=np.int64)
    if arr.ndim != 2 or arr.min() < 0 or arr.max() > 0xFFFF:
        raise UnsupportedBitDepth(f"{path}: values exceed 16-bit range")
    return arr


def _write_u16(values: np.ndarray, path) -> None:
    try:
        Image.fromarray(values.astype(np.uint16)).save(path, format="PNG")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")


def read_depth_png(path, encoding: str = "mm") -> DepthFrame:
    scale = _encoding_scale(encoding)
    return DepthFrame(_read_u16(path).astype(np.float64) / scale)


def write_depth_png(frame: DepthFrame, path, encoding: str = "mm") -> None:
    """Inverse of read within quantization; saturates, rounds half-to-even."""
    scale = _encoding_scale(encoding)
    counts = np.round(frame.values.astype(np.float64) * scale)
    counts[frame.values <= 0] = 0
    _write_u16(np.clip(counts, 0, 0xFFFF), path)


def read_inverse_png(path) -> InverseDepthMap:
    return InverseDepthMap(_read_u16(path).astype(np.float64) / INVERSE_QUANTUM)


def write_inverse_png(z: InverseDepthMap, path) -> None:
    counts = np.round(z.values.astype(np.float64) * INVERSE_QUANTUM)
    _write_u16(np.clip(counts, 0, 0xFFFF), path)
