"""Unsupervised 3D keypoint discovery with cage-based shape deformation.

Discovers a sparse, semantically ordered set of keypoints on a shape
collection without any annotations, and uses them as handles that drive a
detail-preserving cage deformation — plus a PCA keypoint prior, evaluation
protocols, and a CLI/HTTP service for interactive editing.
"""
from . import cage, evaluation, geom, net, prior
from ._kernels import BACKEND as KERNEL_BACKEND
from .deformer import KeypointDeformer, TrainConfig, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "KeypointDeformer",
    "TrainConfig",
    "cage",
    "evaluation",
    "geom",
    "load_checkpoint",
    "net",
    "prior",
    "save_checkpoint",
    "train",
    "__version__",
]
