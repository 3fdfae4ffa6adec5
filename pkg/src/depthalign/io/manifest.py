"""Dataset manifests: one tab-separated frame record per line.

Columns: id, rgb path, gt depth path, pred inverse-depth path, sparse path,
profile name. Optional columns use "-". Paths are resolved relative to the
manifest file. A leading # comment names the columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import IoFailure, ParseError

COLUMNS = ("id", "rgb", "gt", "pred", "sparse", "profile")
MISSING = "-"


@dataclass(frozen=True)
class FrameRecord:
    frame_id: str
    rgb: Path | None
    gt: Path
    pred: Path | None
    sparse: Path | None
    profile: str


@dataclass(frozen=True)
class DatasetManifest:
    path: Path
    records: tuple[FrameRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def read_manifest(path) -> DatasetManifest:
    """Load and validate a manifest: unique ids, referenced files exist.

    Raises:
        ParseError: malformed record or duplicate id.
        IoFailure: manifest or a referenced file is missing.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")

    base = path.parent
    records = []
    ids = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != len(COLUMNS):
            raise ParseError(
                f"{path}:{lineno}: expected {len(COLUMNS)} tab-separated fields, "
                f"got {len(parts)}"
            )
        frame_id, rgb, gt, pred, sparse, profile = (p.strip() for p in parts)
        if not frame_id or frame_id in ids:
            raise ParseError(f"{path}:{lineno}: missing or duplicate id {frame_id!r}")
        ids.add(frame_id)
        if gt == MISSING:
            raise ParseError(f"{path}:{lineno}: gt path is required")

        def resolve(field, name):
            if field == MISSING:
                return None
            p = base / field
            if not p.exists():
                raise IoFailure(f"{path}:{lineno}: {name} file not found: {p}")
            return p

        records.append(
            FrameRecord(
                frame_id=frame_id,
                rgb=resolve(rgb, "rgb"),
                gt=resolve(gt, "gt"),
                pred=resolve(pred, "pred"),
                sparse=resolve(sparse, "sparse"),
                profile=profile,
            )
        )
    return DatasetManifest(path=path, records=tuple(records))


def write_manifest(path, rows: list[dict]) -> None:
    """Write records given as dicts with COLUMNS keys; None becomes "-"."""
    path = Path(path)
    lines = ["# " + "\t".join(COLUMNS)]
    for row in rows:
        lines.append(
            "\t".join(str(row.get(col) or MISSING) for col in COLUMNS)
        )
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}")
