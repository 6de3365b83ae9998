"""Cage construction and cage-based deformation.

The cage is a coarse closed triangle mesh (icosphere topology) shrink-
wrapped around a shape; mean value coordinates of the shape's points
w.r.t. the cage turn cage-vertex displacements into a smooth, detail-
preserving deformation of the shape.
"""
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geom.cloud import as_points
from .geom.mesh import Mesh, format_obj, load_obj

# icosahedron from three orthogonal golden rectangles
_PHI = (1.0 + np.sqrt(5.0)) / 2.0
_ICO_VERTS = np.array(
    [
        [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
        [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
        [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
    ],
    dtype=np.float64,
)
_ICO_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class Cage(Mesh):
    """Coarse enclosing triangle mesh; topology is fixed per category, only
    vertex positions vary between shapes."""

    def with_vertices(self, vertices):
        return Cage(vertices, self.faces)


def icosphere(subdivisions):
    """Icosahedron subdivided ``subdivisions`` times, vertices projected to
    the unit sphere. One subdivision gives the default 42-vertex cage."""
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    verts = [v / np.linalg.norm(v) for v in _ICO_VERTS]
    faces = _ICO_FACES.tolist()
    for _ in range(subdivisions):
        midpoint = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
        faces = new_faces
    return Cage(np.array(verts), np.array(faces, dtype=np.int64))


def init_cage(target, template, margin=0.05, step=0.05, max_iters=100):
    """Shrink-wrap ``template`` around a target point cloud.

    The template is centered on the cloud centroid and scaled to 1.2x its
    bounding radius, then every cage vertex walks toward the centroid in
    relative steps of ``step`` until it is within ``margin`` of the nearest
    target point (or ``max_iters`` runs out). Deterministic.
    """
    pts = as_points(target)
    center = pts.mean(axis=0)
    radius = float(np.linalg.norm(pts - center, axis=1).max())
    if radius <= 0.0:
        raise ValueError("degenerate target: all points coincide")
    template_radius = float(np.linalg.norm(template.vertices, axis=1).max())
    verts = center + template.vertices * (1.2 * radius / template_radius)
    active = np.ones(len(verts), dtype=bool)
    for _ in range(max_iters):
        _, d2 = _kernels.nearest_neighbors(verts[active], pts)
        still = np.sqrt(d2) > margin
        if not still.any():
            break
        idx = np.where(active)[0]
        active[:] = False
        active[idx[still]] = True
        verts[active] = center + (verts[active] - center) * (1.0 - step)
    return template.with_vertices(verts)


@dataclass(frozen=True)
class CageWeights:
    """Mean value coordinates of a point set w.r.t. a cage: (N,C), rows
    summing to 1. Applying them to the cage vertices reproduces the points."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def shape(self):
        return self.weights.shape


def mean_value_coordinates(points, cage):
    """Mean value coordinates for a closed triangle cage.

    Points found within 1e-9 of the cage surface are deterministically
    perturbed by 1e-9 toward the cage centroid before evaluation.
    """
    pts = np.array(as_points(points))  # own copy, we may perturb
    sq = _kernels.point_mesh_sqdist(pts, cage.vertices, cage.faces)
    near = sq < 1e-18
    if near.any():
        centroid = cage.vertices.mean(axis=0)
        direction = centroid - pts[near]
        norm = np.linalg.norm(direction, axis=1, keepdims=True)
        norm[norm == 0.0] = 1.0
        pts[near] += direction / norm * 1e-9
        still = _kernels.point_mesh_sqdist(pts[near], cage.vertices, cage.faces) < 1e-24
        if still.any():
            raise ArithmeticError("point degenerate on cage surface even after perturbation")
    return CageWeights(_kernels.mean_value_coordinates(pts, cage.vertices, cage.faces))


def deform(points, weights, deformed_vertices):
    """Apply cage deformation: point_i = sum_v weights[i,v] * vertex_v.

    Linear in ``deformed_vertices`` (the Jacobian is the weight matrix), so
    callers can differentiate through it trivially.
    """
    w = weights.weights if isinstance(weights, CageWeights) else np.asarray(weights, dtype=np.float64)
    dv = np.asarray(deformed_vertices, dtype=np.float64)
    if w.shape[1] != dv.shape[0]:
        raise ValueError(f"weight/cage mismatch: {w.shape} vs {dv.shape}")
    n_in = len(as_points(points))
    if w.shape[0] != n_in:
        raise ValueError(f"weights were computed for {w.shape[0]} points, got {n_in}")
    return w @ dv


def save_cage(cage, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_obj(cage, comment="cage"))


def load_cage(path):
    mesh = load_obj(path)
    return Cage(mesh.vertices, mesh.faces)


def _digest(*arrays):
    h = hashlib.sha256()
    for arr in arrays:
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def save_cage_weights(weights, path, points=None, cage=None):
    """Write the weight matrix as a raw little-endian float64 blob with a
    JSON sidecar recording dimensions and source hashes."""
    w = weights.weights
    blob = np.ascontiguousarray(w, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(blob)
    sidecar = {
        "rows": int(w.shape[0]),
        "cols": int(w.shape[1]),
        "dtype": "<f8",
        "order": "C",
        "weights_sha256": hashlib.sha256(blob).hexdigest(),
    }
    if points is not None:
        sidecar["points_sha256"] = _digest(as_points(points))
    if cage is not None:
        sidecar["cage_sha256"] = _digest(cage.vertices, cage.faces)
    with open(f"{path}.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def load_cage_weights(path, points=None, cage=None):
    """Load a weight blob, verifying the sidecar hashes (and, when given,
    that the weights belong to these points and this cage)."""
    with open(f"{path}.json", "r", encoding="utf-8") as fh:
        sidecar = json.load(fh)
    with open(path, "rb") as fh:
        blob = fh.read()
    if hashlib.sha256(blob).hexdigest() != sidecar["weights_sha256"]:
        raise ValueError(f"{path}: weight blob does not match its sidecar hash")
    if points is not None and "points_sha256" in sidecar:
        if _digest(as_points(points)) != sidecar["points_sha256"]:
            raise ValueError(f"{path}: weights were computed for different points")
    if cage is not None and "cage_sha256" in sidecar:
        if _digest(cage.vertices, cage.faces) != sidecar["cage_sha256"]:
            raise ValueError(f"{path}: weights were computed for a different cage")
    w = np.frombuffer(blob, dtype="<f8").reshape(sidecar["rows"], sidecar["cols"])
    return CageWeights(w)
