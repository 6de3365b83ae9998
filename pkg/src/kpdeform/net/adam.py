"""Adam optimizer over autodiff parameters (float64, deterministic)."""
import numpy as np


class Adam:
    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        self.t += 1
        for i, p in enumerate(self.params):
            g = p.grad
            if g is None:
                continue
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(
                    f"non-finite gradient for parameter {p.name!r} at step {self.t}"
                )
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / (1.0 - self.beta1 ** self.t)
            v_hat = self.v[i] / (1.0 - self.beta2 ** self.t)
            p.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def state_arrays(self):
        """Flat list of optimizer state arrays, for checkpointing."""
        out = [np.array([float(self.t)])]
        out.extend(self.m)
        out.extend(self.v)
        return out

    def load_state_arrays(self, arrays):
        arrays = list(arrays)
        if len(arrays) != 1 + 2 * len(self.params):
            raise ValueError("optimizer state does not match parameter count")
        self.t = int(round(float(arrays[0][0])))
        n = len(self.params)
        for i in range(n):
            if arrays[1 + i].shape != self.m[i].shape:
                raise ValueError("optimizer state shape mismatch")
            self.m[i] = arrays[1 + i].astype(np.float64).copy()
            self.v[i] = arrays[1 + n + i].astype(np.float64).copy()
