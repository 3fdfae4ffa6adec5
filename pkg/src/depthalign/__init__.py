"""Metric alignment of affine-invariant monocular inverse-depth predictions.

The pipeline fits a per-frame global scale and shift against sparse metric
depth, then optionally applies a learned dense scale-residual map, and ships
with evaluation metrics, synthetic data generation, and a per-stage runtime
benchmark.
"""

from .align import AffineAlignment, apply_global, fit_global
from .core import (
    PROFILES,
    ClampProfile,
    DepthFrame,
    InverseDepthMap,
    SparsePoints,
    ValidMask,
    clamp_prediction,
    eval_mask,
    from_inverse,
    get_profile,
    to_inverse,
)
from .metrics import AggregateReport, FrameMetrics, aggregate, compare, frame_metrics
from .pipeline import EvalFrame, FrameResult, align_frame, evaluate_frames
from .scaffold import (
    ConfidenceMap,
    ScaleAnchor,
    ScaleScaffold,
    build_scaffold,
    compute_anchors,
    confidence_map,
    grayscale,
    scharr_gradients,
)
from .sml import (
    ScaleMapLearner,
    SmlConfig,
    TrainConfig,
    TrainingSample,
    apply_residual,
    gradient_check,
    loss_depth,
    loss_grad,
    loss_total,
    make_model,
    sml_forward,
    stack_inputs,
    train_sml,
)
from .sparsify import (
    SceneConfig,
    SparsifierConfig,
    sample_clustered,
    sample_min_distance,
    synth_prediction,
    synth_scene,
)

__version__ = "0.1.0"
