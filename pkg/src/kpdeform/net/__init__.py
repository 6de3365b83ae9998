from .tensor import Tensor, constant, parameter
from .layers import Dense, MlpHead, PointNetEncoder, glorot_uniform
from .adam import Adam

__all__ = [
    "Tensor",
    "constant",
    "parameter",
    "Dense",
    "MlpHead",
    "PointNetEncoder",
    "glorot_uniform",
    "Adam",
]
