from .losses import GRAD_LOSS_WEIGHT, PYRAMID_LEVELS, loss_depth, loss_grad, loss_total
from .model import (
    ScaleMapLearner,
    SmlConfig,
    apply_residual,
    make_model,
    sml_forward,
    stack_inputs,
)
from .train import (
    TrainConfig,
    TrainingSample,
    evaluate_loss,
    gradient_check,
    train_sml,
)

__all__ = [
    "GRAD_LOSS_WEIGHT",
    "PYRAMID_LEVELS",
    "ScaleMapLearner",
    "SmlConfig",
    "TrainConfig",
    "TrainingSample",
    "apply_residual",
    "evaluate_loss",
    "gradient_check",
    "loss_depth",
    "loss_grad",
    "loss_total",
    "make_model",
    "sml_forward",
    "stack_inputs",
    "train_sml",
]
