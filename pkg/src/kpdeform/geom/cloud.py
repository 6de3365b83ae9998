"""Point clouds, deterministic sampling, Chamfer distance, FPS."""
from dataclasses import dataclass

import numpy as np

from .. import _kernels


class Rng:
    """Deterministic random stream. Identical seed, identical draws."""

    def __init__(self, seed):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._spawned = 0

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high=high, size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size=size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size=size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def split(self):
        """Derive an independent child stream, deterministically."""
        self._spawned += 1
        return Rng(np.random.SeedSequence([self.seed, self._spawned]).generate_state(1)[0])


def as_points(cloud):
    """Coerce a PointCloud or array-like into an (N,3) float64 array."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    return np.ascontiguousarray(pts, dtype=np.float64).reshape(-1, 3)


@dataclass(frozen=True)
class PointCloud:
    """Sampled point set, (N,3) float64."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64).reshape(-1, 3))
        if pts.shape[0] == 0:
            raise ValueError("point cloud is empty")
        if not np.isfinite(pts).all():
            raise ValueError("point cloud has non-finite coordinates")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]


def sample_surface(mesh, n, rng, return_face_index=False):
    """Draw ``n`` points uniformly w.r.t. surface area (area-weighted face
    choice + uniform barycentric within each face)."""
    if n <= 0:
        raise ValueError("need n >= 1 points")
    areas = mesh.face_areas()
    total = areas.sum()
    if mesh.n_faces == 0 or total <= 0.0:
        raise ValueError("mesh has no non-degenerate faces to sample")
    cdf = np.cumsum(areas / total)
    cdf[-1] = 1.0
    face_idx = np.searchsorted(cdf, rng.uniform(size=n), side="right")
    face_idx = np.minimum(face_idx, mesh.n_faces - 1)

    a = mesh.vertices[mesh.faces[face_idx, 0]]
    b = mesh.vertices[mesh.faces[face_idx, 1]]
    c = mesh.vertices[mesh.faces[face_idx, 2]]
    r1 = np.sqrt(rng.uniform(size=n))
    r2 = rng.uniform(size=n)
    pts = (1.0 - r1)[:, None] * a + (r1 * (1.0 - r2))[:, None] * b + (r1 * r2)[:, None] * c
    cloud = PointCloud(pts)
    if return_face_index:
        return cloud, face_idx
    return cloud


def chamfer_distance(a, b, with_grad=False):
    """Symmetric Chamfer distance: mean squared nearest-neighbor distance in
    each direction, summed.

    With ``with_grad`` also returns gradients w.r.t. both clouds, holding
    the nearest-neighbor assignments fixed at the evaluation point.
    """
    pa, pb = as_points(a), as_points(b)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise ValueError("chamfer distance needs non-empty clouds")
    idx_ab, d2_ab = _kernels.nearest_neighbors(pa, pb)
    idx_ba, d2_ba = _kernels.nearest_neighbors(pb, pa)
    value = float(d2_ab.mean() + d2_ba.mean())
    if not with_grad:
        return value

    na, nb = pa.shape[0], pb.shape[0]
    grad_a = (2.0 / na) * (pa - pb[idx_ab])
    grad_b = (2.0 / nb) * (pb - pa[idx_ba])
    # reverse-direction terms: each match pulls on the *other* cloud too
    np.add.at(grad_a, idx_ba, (-2.0 / nb) * (pb - pa[idx_ba]))
    np.add.at(grad_b, idx_ab, (-2.0 / na) * (pa - pb[idx_ab]))
    return value, grad_a, grad_b


def farthest_point_sample(cloud, j, rng):
    """Greedy max-min subset of ``j`` points; the first is drawn uniformly
    at random, each next one maximizes its distance to those already picked."""
    pts = as_points(cloud)
    n = pts.shape[0]
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= {n}, got {j}")
    start = int(rng.integers(n))
    idx = _kernels.farthest_point_indices(pts, j, start)
    return PointCloud(pts[idx])
