from .model import KEYPOINT_BOUND, KeypointDeformer
from .losses import chamfer_pair, fps_regularizer, total_loss
from .training import (
    ShapeRecord,
    TrainConfig,
    TrainingDiverged,
    TrainResult,
    prepare_dataset,
    prepare_shape,
    train,
)
from .checkpoint import checkpoint_checksum, load_checkpoint, save_checkpoint

__all__ = [
    "KEYPOINT_BOUND",
    "KeypointDeformer",
    "chamfer_pair",
    "fps_regularizer",
    "total_loss",
    "ShapeRecord",
    "TrainConfig",
    "TrainingDiverged",
    "TrainResult",
    "prepare_dataset",
    "prepare_shape",
    "train",
    "checkpoint_checksum",
    "load_checkpoint",
    "save_checkpoint",
]
