"""Binary checkpoint format for the scale-residual network.

Layout (all integers little-endian):
    magic "SMLW" | version u32 | in_channels u32 | 4x stage_width u32 |
    regress_shift u32 | input_resolution u32 | n_tensors u32 |
    n_tensors directory entries | payload

Directory entry: name_len u16, name utf-8, rank u32, rank x dim u32,
offset u64, nbytes u64. Offsets are relative to the payload start and must
tile the payload exactly in order. Tensor data is little-endian float32;
round-trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np
import torch

from ..errors import BadMagic, CorruptDirectory, IoFailure, VersionMismatch
from ..sml.model import ScaleMapLearner, SmlConfig

MAGIC = b"SMLW"
VERSION = 1
_HEADER = struct.Struct("<4s9I")


def save_checkpoint(model: ScaleMapLearner, path) -> None:
    """Write config and all named tensors; output is byte-deterministic."""
    cfg = model.config
    state = model.state_dict()
    names = sorted(state.keys())

    directory = bytearray()
    payload = bytearray()
    for name in names:
        arr = state[name].detach().cpu().numpy().astype("<f4")
        encoded = name.encode("utf-8")
        directory += struct.pack("<H", len(encoded)) + encoded
        directory += struct.pack("<I", arr.ndim)
        directory += struct.pack(f"<{arr.ndim}I", *arr.shape) if arr.ndim else b""
        directory += struct.pack("<QQ", len(payload), arr.nbytes)
        payload += arr.tobytes()

    header = _HEADER.pack(
        MAGIC,
        VERSION,
        cfg.in_channels,
        *cfg.stage_widths,
        int(cfg.regress_shift),
        cfg.input_resolution,
        len(names),
    )
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(bytes(directory))
            fh.write(bytes(payload))
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")


def load_checkpoint(path) -> ScaleMapLearner:
    """Reconstruct a model from a checkpoint file.

    Raises:
        BadMagic / VersionMismatch / CorruptDirectory on malformed files.
    """
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")

    if len(blob) < _HEADER.size:
        raise CorruptDirectory(f"{path}: file shorter than the header")
    magic, version, in_ch, w1, w2, w3, w4, shift, res, n_tensors = _HEADER.unpack_from(
        blob, 0
    )
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatch(f"{path}: version {version}, expected {VERSION}")

    pos = _HEADER.size
    entries = []
    try:
        for _ in range(n_tensors):
            (name_len,) = struct.unpack_from("<H", blob, pos)
            pos += 2
            name = blob[pos : pos + name_len].decode("utf-8")
            pos += name_len
            (rank,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            dims = struct.unpack_from(f"<{rank}I", blob, pos) if rank else ()
            pos += 4 * rank
            offset, nbytes = struct.unpack_from("<QQ", blob, pos)
            pos += 16
            entries.append((name, dims, offset, nbytes))
    except (struct.error, UnicodeDecodeError) as exc:
        raise CorruptDirectory(f"{path}: truncated or garbled directory ({exc})")

    payload = blob[pos:]
    expect_offset = 0
    for name, dims, offset, nbytes in entries:
        if offset != expect_offset:
            raise CorruptDirectory(f"{path}: tensor {name!r} offsets overlap or gap")
        if int(np.prod(dims, dtype=np.int64)) * 4 != nbytes:
            raise CorruptDirectory(f"{path}: tensor {name!r} dims disagree with size")
        expect_offset += nbytes
    if expect_offset != len(payload):
        raise CorruptDirectory(
            f"{path}: payload is {len(payload)} bytes, directory claims {expect_offset}"
        )

    cfg = SmlConfig(
        in_channels=in_ch,
        stage_widths=(w1, w2, w3, w4),
        regress_shift=bool(shift),
        input_resolution=res,
    )
    model = ScaleMapLearner(cfg)
    state = {}
    for name, dims, offset, nbytes in entries:
        arr = np.frombuffer(payload, dtype="<f4", count=nbytes // 4, offset=offset)
        state[name] = torch.from_numpy(arr.reshape(dims).copy())
    model.load_state_dict(state)
    return model
