"""Shared mesh-in/mesh-out inference pipeline.

The CLI and the HTTP service both run exactly this code path, so identical
inputs give bit-identical deformed meshes regardless of the front end. The
inference cloud is seeded from the normalized mesh content, which keeps
predictions a pure function of the uploaded geometry.
"""
import dataclasses
import hashlib

import numpy as np

from ..cage import init_cage, mean_value_coordinates
from ..geom import Rng, normalize_unit_box, sample_surface


@dataclasses.dataclass(frozen=True)
class InferenceSettings:
    """Knobs the pipeline needs from a checkpoint's training record."""

    n_points: int = 1024
    cage_margin: float = 0.05
    cage_step: float = 0.05
    cage_max_iters: int = 100

    @classmethod
    def from_header(cls, header):
        hp = header.get("hyperparameters", {})
        return cls(
            n_points=int(hp.get("n_points", 1024)),
            cage_margin=float(hp.get("cage_margin", 0.05)),
            cage_step=float(hp.get("cage_step", 0.05)),
            cage_max_iters=int(hp.get("cage_max_iters", 100)),
        )


@dataclasses.dataclass(frozen=True)
class PreparedShape:
    """Everything inference needs about one mesh, all in normalized space
    except ``original`` and the transform that returns to it."""

    original: object
    normalized: object
    transform: object
    cloud: np.ndarray
    keypoints: np.ndarray  # (K, 3), model prediction on the cloud
    cage: object = None
    mesh_weights: object = None

    @property
    def content_hash(self):
        return mesh_content_hash(self.normalized)


def mesh_content_hash(mesh):
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(mesh.vertices, dtype="<f8").tobytes())
    digest.update(np.ascontiguousarray(mesh.faces, dtype="<i8").tobytes())
    return digest.hexdigest()


def content_rng(mesh):
    """Rng seeded from the normalized mesh content: the same geometry always
    gets the same inference cloud, no matter how it arrived."""
    return Rng(int(mesh_content_hash(mesh)[:16], 16))


def prepare_mesh(model, mesh, settings, with_cage=True):
    """Normalize, sample the inference cloud, predict keypoints, and (when
    deformation is needed) shrink-wrap a cage and bind the mesh vertices to
    it with mean value coordinates."""
    normalized, transform = normalize_unit_box(mesh)
    cloud = sample_surface(normalized, settings.n_points, content_rng(normalized))
    keypoints = model.keypoints_of(cloud)
    cage = None
    mesh_weights = None
    if with_cage:
        cage = init_cage(
            cloud,
            model.template,
            margin=settings.cage_margin,
            step=settings.cage_step,
            max_iters=settings.cage_max_iters,
        )
        mesh_weights = mean_value_coordinates(normalized.vertices, cage)
    return PreparedShape(mesh, normalized, transform, cloud.points, keypoints, cage, mesh_weights)


def keypoints_to_original(prepared, keypoints_norm):
    return prepared.transform.inverse().apply(keypoints_norm)


def keypoints_to_normalized(prepared, keypoints_orig):
    return prepared.transform.apply(keypoints_orig)


def deform_to_keypoints(model, prepared, target_keypoints_norm):
    """Deform the prepared mesh so its keypoints land on the targets
    (normalized frame); returns the mesh mapped back to original
    coordinates, topology untouched."""
    if prepared.cage is None or prepared.mesh_weights is None:
        raise ValueError("shape was prepared without a cage; cannot deform")
    target = np.asarray(target_keypoints_norm, dtype=np.float64)
    if target.shape != prepared.keypoints.shape:
        raise ValueError(
            f"expected {prepared.keypoints.shape[0]} target keypoints, got {target.shape}"
        )
    if not np.all(np.isfinite(target)):
        raise ValueError("target keypoints must be finite")
    deformed_norm = model.deform_points(
        prepared.mesh_weights, prepared.cage, prepared.cloud, target, keypoints=prepared.keypoints
    )
    vertices = prepared.transform.inverse().apply(deformed_norm)
    return prepared.original.with_vertices(vertices)
