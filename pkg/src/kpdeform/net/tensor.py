"""Minimal reverse-mode autodiff over float64 numpy arrays.

A Tensor records the ops that produced it; calling ``backward()`` on a
scalar loss walks the tape once in reverse topological order. Only the
handful of ops the model needs are provided. Gradients are plain numpy
arrays accumulated in ``.grad``.
"""
import numpy as np


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` (undo numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, name=None, _parents=(), _backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in _parents)
        self.name = name
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def __repr__(self):
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.data.shape}{tag})"

    def _accumulate(self, grad):
        if not self.requires_grad:
            return  # constants never collect gradients
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def zero_grad(self):
        self.grad = None

    def backward(self):
        """Backpropagate from a scalar root. Populates ``.grad`` on every
        tensor on a path to a ``requires_grad`` leaf; others stay None."""
        if self.data.size != 1:
            raise ValueError("backward() root must be a scalar")
        if not self.requires_grad:
            raise ValueError("backward() on a tensor with no differentiable inputs")
        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                stack.append((p, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # ---- ops ----

    def __add__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)

        def bw(g):
            a._accumulate(_unbroadcast(g, a.data.shape))
            b._accumulate(_unbroadcast(g, b.data.shape))

        a, b = self, other
        return Tensor(a.data + b.data, _parents=(a, b), _backward=bw)

    __radd__ = __add__

    def __neg__(self):
        a = self
        return Tensor(-a.data, _parents=(a,), _backward=lambda g: a._accumulate(-g))

    def __sub__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)

        def bw(g):
            a._accumulate(_unbroadcast(g * b.data, a.data.shape))
            b._accumulate(_unbroadcast(g * a.data, b.data.shape))

        a, b = self, other
        return Tensor(a.data * b.data, _parents=(a, b), _backward=bw)

    __rmul__ = __mul__

    def __matmul__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        a, b = self, other
        if a.data.ndim not in (1, 2) or b.data.ndim not in (1, 2):
            raise ValueError("matmul supports 1-D and 2-D operands only")

        def bw(g):
            if a.requires_grad:
                if b.data.ndim == 2:
                    a._accumulate((g @ b.data.T).reshape(a.data.shape))
                else:  # b is a vector
                    a._accumulate(np.multiply.outer(g, b.data).reshape(a.data.shape))
            if b.requires_grad:
                if a.data.ndim == 2:
                    b._accumulate((a.data.T @ g).reshape(b.data.shape))
                else:  # a is a vector
                    b._accumulate(np.multiply.outer(a.data, g).reshape(b.data.shape))

        return Tensor(a.data @ b.data, _parents=(a, b), _backward=bw)

    def reshape(self, *shape):
        a = self
        return Tensor(
            a.data.reshape(*shape),
            _parents=(a,),
            _backward=lambda g: a._accumulate(g.reshape(a.data.shape)),
        )

    def sum(self):
        a = self
        return Tensor(a.data.sum(), _parents=(a,), _backward=lambda g: a._accumulate(np.full_like(a.data, float(g))))

    def mean(self):
        a = self
        return Tensor(
            a.data.mean(),
            _parents=(a,),
            _backward=lambda g: a._accumulate(np.full_like(a.data, float(g) / a.data.size)),
        )

    def relu(self):
        a = self
        mask = a.data > 0.0
        return Tensor(np.where(mask, a.data, 0.0), _parents=(a,), _backward=lambda g: a._accumulate(g * mask))

    def tanh(self):
        a = self
        out = np.tanh(a.data)
        return Tensor(out, _parents=(a,), _backward=lambda g: a._accumulate(g * (1.0 - out * out)))

    def max_over_points(self):
        """Column-wise max over axis 0 (the PointNet pooling). The
        subgradient is routed to the first maximal row per column."""
        a = self
        argmax = np.argmax(a.data, axis=0)
        cols = np.arange(a.data.shape[1])

        def bw(g):
            ga = np.zeros_like(a.data)
            ga[argmax, cols] = g
            a._accumulate(ga)

        return Tensor(a.data[argmax, cols], _parents=(a,), _backward=bw)

    def sq_sum(self):
        """Sum of squares (squared Frobenius norm)."""
        a = self
        return Tensor((a.data * a.data).sum(), _parents=(a,), _backward=lambda g: a._accumulate(2.0 * float(g) * a.data))


def constant(data, name=None):
    return Tensor(data, requires_grad=False, name=name)


def parameter(data, name=None):
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True, name=name)
