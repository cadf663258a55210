"""Decision-model learners: five self-contained classifier families over one
numeric-vector interface, cross-validation and model suggestion."""

from .base import KINDS, DecisionMapping, TrainedDecisionModel, validate_mapping
from .cv import (
    DEFAULT_GRIDS,
    DEFAULT_PARAMS,
    CVReport,
    cross_validate,
    predict,
    suggest_best,
    train,
)
from .metrics import confusion_matrix, weighted_f1
from .store import dump_model, load_model, load_model_file, save_model

__all__ = [
    "KINDS",
    "DecisionMapping",
    "TrainedDecisionModel",
    "validate_mapping",
    "CVReport",
    "DEFAULT_GRIDS",
    "DEFAULT_PARAMS",
    "cross_validate",
    "predict",
    "suggest_best",
    "train",
    "confusion_matrix",
    "weighted_f1",
    "dump_model",
    "load_model",
    "load_model_file",
    "save_model",
]
