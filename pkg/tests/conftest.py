import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kpdeform.cage import Cage, icosphere
from kpdeform.geom import Rng


@pytest.fixture
def rng():
    return Rng(12345)


def jittered_cage(rng, scale=0.5, jitter=0.08):
    """A random closed cage: icosphere vertices scaled and perturbed.

    Jitter is small relative to the scale so the mesh stays embedded
    (no self-intersection), keeping the topology a valid closed surface.
    """
    base = icosphere(1)
    verts = base.vertices * scale * (1.0 + rng.uniform(-0.2, 0.2))
    verts = verts + rng.normal(0.0, jitter * scale, size=verts.shape)
    return Cage(verts, base.faces)


def interior_points(cage, rng, n):
    """Points safely inside a star-shaped cage: blend centroid and surface."""
    centroid = cage.vertices.mean(axis=0)
    picks = rng.integers(0, cage.n_vertices, size=n)
    t = rng.uniform(0.15, 0.75, size=(n, 1))
    return centroid + t * (cage.vertices[picks] - centroid)


def assert_close(actual, expected, tol, label=""):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    err = float(np.max(np.abs(actual - expected))) if actual.size else 0.0
    assert err <= tol, f"{label} max deviation {err:.3e} > {tol:.1e}"
