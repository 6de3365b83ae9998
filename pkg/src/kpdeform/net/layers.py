"""PointNet-style encoder and MLP heads built on the autodiff tensors."""
import numpy as np

from .tensor import Tensor, constant, parameter


def glorot_uniform(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Dense:
    def __init__(self, weight, bias, name="dense"):
        self.weight = weight
        self.bias = bias
        self.name = name

    @classmethod
    def init(cls, rng, fan_in, fan_out, name="dense", zero=False):
        w = np.zeros((fan_in, fan_out)) if zero else glorot_uniform(rng, fan_in, fan_out)
        return cls(
            parameter(w, name=f"{name}.weight"),
            parameter(np.zeros(fan_out), name=f"{name}.bias"),
            name=name,
        )

    def __call__(self, x):
        return x @ self.weight + self.bias

    def parameters(self):
        return [self.weight, self.bias]


class PointNetEncoder:
    """Shared per-point MLP with ReLU, then column-wise max over points.

    Permutation invariant by construction; input is an (N,3) cloud, output
    a fixed-size global feature.
    """

    def __init__(self, layers):
        self.layers = layers

    @classmethod
    def init(cls, rng, widths=(3, 64, 128, 256), name="encoder"):
        layers = [
            Dense.init(rng, widths[i], widths[i + 1], name=f"{name}.layer{i}")
            for i in range(len(widths) - 1)
        ]
        return cls(layers)

    @property
    def widths(self):
        return tuple([self.layers[0].weight.shape[0]] + [l.weight.shape[1] for l in self.layers])

    def __call__(self, cloud):
        h = cloud if isinstance(cloud, Tensor) else constant(np.asarray(cloud, dtype=np.float64))
        if h.ndim != 2 or h.shape[0] == 0:
            raise ValueError(f"encoder expects a non-empty (N,3) cloud, got shape {h.shape}")
        for layer in self.layers:
            h = layer(h).relu()
        return h.max_over_points()

    def parameters(self):
        return [p for layer in self.layers for p in layer.parameters()]


class MlpHead:
    """Two dense layers with ReLU between. ``bound`` adds a tanh squash
    mapping outputs into (-bound, bound); leave None for unbounded output."""

    def __init__(self, hidden, out, bound=None):
        self.hidden = hidden
        self.out = out
        self.bound = bound

    @classmethod
    def init(cls, rng, feature_dim, out_dim, hidden_dim=128, bound=None, name="head", zero_out=False):
        return cls(
            Dense.init(rng, feature_dim, hidden_dim, name=f"{name}.hidden"),
            Dense.init(rng, hidden_dim, out_dim, name=f"{name}.out", zero=zero_out),
            bound=bound,
        )

    def __call__(self, feature):
        h = self.out(self.hidden(feature).relu())
        if self.bound is not None:
            h = h.tanh() * self.bound
        return h

    def parameters(self):
        return self.hidden.parameters() + self.out.parameters()
