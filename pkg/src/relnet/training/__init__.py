from relnet.training.cross_validation import CVResult, FoldResult, assign_folds, cross_validate
from relnet.training.negatives import generate_negatives
from relnet.training.trainer import (
    AdaGradState,
    Gradients,
    TrainConfig,
    TrainResult,
    adagrad_l1_step,
    backward,
    loss,
    rule_weight_report,
    score_examples,
    train,
)

__all__ = [
    "AdaGradState",
    "CVResult",
    "FoldResult",
    "Gradients",
    "TrainConfig",
    "TrainResult",
    "adagrad_l1_step",
    "assign_folds",
    "backward",
    "cross_validate",
    "generate_negatives",
    "loss",
    "rule_weight_report",
    "score_examples",
    "train",
]
