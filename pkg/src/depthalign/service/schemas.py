"""Request/response models for the HTTP alignment service.

Grids travel as row-major nested lists of floats; depth is in meters and
inverse depth in 1/m, matching the library conventions.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class SparsePointModel(BaseModel):
    u: int = Field(ge=0)
    v: int = Field(ge=0)
    depth_m: float = Field(gt=0)


class AlignRequest(BaseModel):
    pred: list[list[float]] = Field(description="Predicted inverse depth, 1/m")
    sparse: list[SparsePointModel]
    profile: str = "void"
    use_model: bool = False


class AlignResponse(BaseModel):
    depth_m: list[list[float]]
    scale: float
    shift: float
    n_points: int
    degenerate: bool
    n_anchors: int
    identity_scaffold: bool


class MetricsRequest(BaseModel):
    pred_depth_m: list[list[float]]
    gt_depth_m: list[list[float]]
    profile: str = "void"


class MetricsResponse(BaseModel):
    mae_mm: float
    rmse_mm: float
    imae: float
    irmse: float
    iabsrel: float
    valid_pixels: int


class SparsifyRequest(BaseModel):
    gt_depth_m: list[list[float]]
    mode: str = "min_distance"
    count: int = Field(default=150, ge=0)
    min_dist: float = Field(default=5.0, ge=0)
    cluster_count: int = Field(default=8, ge=1)
    cluster_sigma: float = Field(default=4.0, ge=0)
    seed: int = 0


class SparsifyResponse(BaseModel):
    points: list[SparsePointModel]


class ReportModel(BaseModel):
    mae_mm: float
    rmse_mm: float
    imae: float
    irmse: float
    iabsrel: float
    frame_count: int = 1
    skipped_frames: int = 0
    profile: str = ""
    density: str = ""
    pooled: bool = False


class CompareRequest(BaseModel):
    baseline: ReportModel
    candidate: ReportModel


class CompareResponse(BaseModel):
    reduction_percent: dict[str, float]


class HealthResponse(BaseModel):
    status: str
    model_loaded: bool
    profiles: list[str]
