from .checkpoint import load_checkpoint, save_checkpoint
from .manifest import COLUMNS, DatasetManifest, FrameRecord, read_manifest, write_manifest
from .png import (
    ENCODINGS,
    read_depth_png,
    read_inverse_png,
    write_depth_png,
    write_inverse_png,
)
from .render import render_depth_map, render_error_map
from .sparse import read_sparse_csv, write_sparse_csv

__all__ = [
    "COLUMNS",
    "DatasetManifest",
    "ENCODINGS",
    "FrameRecord",
    "load_checkpoint",
    "read_depth_png",
    "read_inverse_png",
    "read_manifest",
    "read_sparse_csv",
    "render_depth_map",
    "render_error_map",
    "save_checkpoint",
    "write_depth_png",
    "write_inverse_png",
    "write_manifest",
    "write_sparse_csv",
]
