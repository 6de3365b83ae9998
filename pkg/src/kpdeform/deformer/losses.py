"""Training objective: alignment + keypoint spread + influence magnitude.

L = chamfer(x*, x') + alpha_kpt * chamfer(p, q) + alpha_inf * ||W_I||_F^2
with q a freshly started farthest-point subset of the source cloud.
"""
import numpy as np

from ..geom import as_points, chamfer_distance, farthest_point_sample
from ..net import Tensor, constant


def chamfer_pair(a, b):
    """Chamfer distance as a tape node. Either side may be a plain array
    (held constant); nearest-neighbor matches are frozen for the backward
    pass, as in the underlying gradient definition."""
    ta = a if isinstance(a, Tensor) else constant(as_points(a))
    tb = b if isinstance(b, Tensor) else constant(as_points(b))
    value, grad_a, grad_b = chamfer_distance(ta.data, tb.data, with_grad=True)

    def bw(g):
        ta._accumulate(float(g) * grad_a)
        tb._accumulate(float(g) * grad_b)

    return Tensor(np.float64(value), _parents=(ta, tb), _backward=bw)


def fps_regularizer(keypoints, cloud, count, rng):
    """Chamfer between predicted keypoints and a farthest-point subset of the
    source cloud; the subset's start point is redrawn on every call, so the
    target keeps moving over well-spread surface locations."""
    sample = farthest_point_sample(as_points(cloud), count, rng)
    return chamfer_pair(keypoints, sample.points)


def total_loss(deformed, target_cloud, keypoints, source_cloud, influence_offset, config, rng,
               target_keypoints=None):
    """Weighted three-term objective. Returns the scalar loss tensor and a
    dict of the unweighted term values for logging.

    ``target_keypoints`` is only consulted when the config asks for the
    spread regularizer on the target shape too (off by default).
    """
    sim = chamfer_pair(deformed, as_points(target_cloud))
    kpt = fps_regularizer(keypoints, source_cloud, config.fps_count, rng)
    if config.regularize_target_keypoints:
        if target_keypoints is None:
            raise ValueError("config regularizes target keypoints but none were given")
        kpt = (kpt + fps_regularizer(target_keypoints, target_cloud, config.fps_count, rng)) * 0.5
    inf = influence_offset.sq_sum()

    terms = {"sim": float(sim.data), "kpt": float(kpt.data), "inf": float(inf.data)}
    for name, value in terms.items():
        if not np.isfinite(value):
            raise FloatingPointError(f"loss term {name!r} is non-finite ({value})")

    loss = sim + kpt * config.alpha_kpt + inf * config.alpha_inf
    terms["total"] = float(loss.data)
    return loss, terms
