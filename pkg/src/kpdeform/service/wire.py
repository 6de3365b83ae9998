"""JSON wire format shared by the CLI file outputs and the HTTP API.

Coordinates travel as [x, y, z] arrays at 9 significant digits — the same
precision as OBJ export, so round trips through either representation agree.
"""
import numpy as np


def round9_scalar(value):
    return float(f"{float(value):.9g}")


def round9(array):
    """Nested lists with every float clipped to 9 significant digits."""
    a = np.asarray(array, dtype=np.float64)
    if a.ndim == 1:
        return [round9_scalar(v) for v in a]
    return [round9(row) for row in a]


def mesh_payload(mesh):
    return {
        "vertices": round9(mesh.vertices),
        "faces": [[int(i) for i in face] for face in mesh.faces],
    }


def parse_points(obj, expected=None, what="keypoints"):
    """Validate a [[x,y,z], ...] payload into an (N, 3) float array."""
    try:
        arr = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValueError(f"{what} must be an array of [x, y, z] triples")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{what} must be an array of [x, y, z] triples")
    if expected is not None and arr.shape[0] != expected:
        raise ValueError(f"expected {expected} {what}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contain non-finite coordinates")
    return arr
