"""Sparse depth point files: UTF-8 lines of "u,v,depth_m" with # comments."""

from __future__ import annotations

import logging

import numpy as np

from ..core import SparsePoints
from ..errors import IoFailure, NonPositiveDepth, ParseError

log = logging.getLogger(__name__)


def read_sparse_csv(path) -> SparsePoints:
    """Parse sparse points, deduplicating repeated (u, v) pixels (first wins).

    Raises:
        ParseError: malformed line (message carries the line number).
        NonPositiveDepth: depth value <= 0.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")

    seen = {}
    duplicates = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"{path}:{lineno}: expected 'u,v,depth_m', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            d = float(parts[2])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: could not parse {raw!r}")
        if not np.isfinite(d) or d <= 0:
            raise NonPositiveDepth(f"{path}:{lineno}: depth must be > 0, got {d}")
        if (u, v) in seen:
            duplicates += 1
            continue
        seen[(u, v)] = d
    if duplicates:
        log.warning("%s: dropped %d duplicate (u, v) entries", path, duplicates)
    return SparsePoints.from_list([(u, v, d) for (u, v), d in seen.items()])


def write_sparse_csv(points: SparsePoints, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# u,v,depth_m\n")
            for u, v, d in points:
                fh.write(f"{u},{v},{d:.9g}\n")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")
