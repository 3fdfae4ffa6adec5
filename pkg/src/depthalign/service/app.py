"""FastAPI service exposing the alignment pipeline to multiple clients.

The dense scale model is loaded once at startup, so repeated align calls
pay only inference cost. Library errors surface as HTTP 422 with the error
class name; shape/value problems in payloads come back as 400.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from ..core import PROFILES, DepthFrame, InverseDepthMap, SparsePoints, from_inverse, get_profile
from ..errors import DepthAlignError
from ..metrics import AggregateReport, compare, frame_metrics
from ..pipeline import align_frame
from ..sparsify import SparsifierConfig, sample_sparse
from . import schemas


def _grid(data, name: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=np.float64)
    except ValueError:
        raise HTTPException(400, f"{name} is not a rectangular grid")
    if arr.ndim != 2 or arr.size == 0:
        raise HTTPException(400, f"{name} must be a non-empty 2D grid")
    return arr


def _sparse(points) -> SparsePoints:
    return SparsePoints.from_list([(p.u, p.v, p.depth_m) for p in points])


def _profile(name: str):
    try:
        return get_profile(name)
    except KeyError as exc:
        raise HTTPException(400, str(exc))


def create_app(checkpoint: str | None = None) -> FastAPI:
    app = FastAPI(title="depthalign", version="0.1.0")
    app.state.model = None
    if checkpoint:
        from ..io import load_checkpoint

        app.state.model = load_checkpoint(checkpoint)

    @app.exception_handler(DepthAlignError)
    async def library_error(request: Request, exc: DepthAlignError):
        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(
            status="ok",
            model_loaded=app.state.model is not None,
            profiles=sorted(PROFILES),
        )

    @app.post("/align", response_model=schemas.AlignResponse)
    def align(req: schemas.AlignRequest):
        prof = _profile(req.profile)
        pred = InverseDepthMap(_grid(req.pred, "pred"))
        model = None
        if req.use_model:
            if app.state.model is None:
                raise HTTPException(409, "no model checkpoint loaded; start with --checkpoint")
            model = app.state.model
        result = align_frame(pred, _sparse(req.sparse), prof, model)
        depth = from_inverse(result.z_out, prof.z_floor)
        return schemas.AlignResponse(
            depth_m=depth.values.tolist(),
            scale=result.alignment.scale,
            shift=result.alignment.shift,
            n_points=result.alignment.n_points,
            degenerate=result.alignment.degenerate,
            n_anchors=result.n_anchors,
            identity_scaffold=result.identity_scaffold,
        )

    @app.post("/metrics", response_model=schemas.MetricsResponse)
    def metrics(req: schemas.MetricsRequest):
        prof = _profile(req.profile)
        fm = frame_metrics(
            DepthFrame(_grid(req.pred_depth_m, "pred_depth_m")),
            DepthFrame(_grid(req.gt_depth_m, "gt_depth_m")),
            prof,
        )
        return schemas.MetricsResponse(**fm.__dict__)

    @app.post("/sparsify", response_model=schemas.SparsifyResponse)
    def sparsify(req: schemas.SparsifyRequest):
        try:
            cfg = SparsifierConfig(
                mode=req.mode,
                target_count=req.count,
                min_dist=req.min_dist,
                cluster_count=req.cluster_count,
                cluster_sigma=req.cluster_sigma,
                seed=req.seed,
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        points = sample_sparse(DepthFrame(_grid(req.gt_depth_m, "gt_depth_m")), cfg)
        return schemas.SparsifyResponse(
            points=[
                schemas.SparsePointModel(u=u, v=v, depth_m=d) for u, v, d in points
            ]
        )

    @app.post("/compare", response_model=schemas.CompareResponse)
    def compare_reports(req: schemas.CompareRequest):
        baseline = AggregateReport(**req.baseline.model_dump())
        candidate = AggregateReport(**req.candidate.model_dump())
        return schemas.CompareResponse(reduction_percent=compare(baseline, candidate))

    return app
