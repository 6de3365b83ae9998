"""Triangle meshes: OBJ ingestion, serialization, unit-box normalization."""
import io
from dataclasses import dataclass

import numpy as np


class ObjParseError(ValueError):
    """Malformed OBJ input; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Mesh:
    """Triangle surface. ``vertices`` (V,3) float64, ``faces`` (F,3) int64.

    Instances are immutable; derived meshes are new objects.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if v.shape[0] == 0:
            raise ValueError("mesh has no vertices")
        if f.size:
            if f.min() < 0 or f.max() >= v.shape[0]:
                raise ValueError("face index out of range")
            degen = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
            if degen.any():
                raise ValueError(f"degenerate face (repeated vertex index) at face {int(np.argmax(degen))}")
        object.__setattr__(self, "vertices", _freeze(v))
        object.__setattr__(self, "faces", _freeze(f))

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_faces(self):
        return self.faces.shape[0]

    def with_vertices(self, vertices):
        """Same topology, new vertex positions."""
        return Mesh(vertices, self.faces)

    def face_areas(self):
        a = self.vertices[self.faces[:, 0]]
        b = self.vertices[self.faces[:, 1]]
        c = self.vertices[self.faces[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


@dataclass(frozen=True)
class Transform:
    """Uniform scale followed by translation: x -> x * scale + translation."""

    scale: float
    translation: np.ndarray

    def __post_init__(self):
        if not (self.scale > 0.0 and np.isfinite(self.scale)):
            raise ValueError(f"transform scale must be positive and finite, got {self.scale}")
        object.__setattr__(self, "translation", _freeze(np.asarray(self.translation, dtype=np.float64).reshape(3)))

    def apply(self, points):
        return np.asarray(points, dtype=np.float64) * self.scale + self.translation

    def inverse(self):
        return Transform(1.0 / self.scale, -self.translation / self.scale)


def normalize_unit_box(mesh):
    """Center the mesh on its bounding-box center and scale uniformly so the
    longest axis has length 1 (coordinates end up in [-0.5, 0.5]).

    Returns (mesh, transform); the transform maps original coordinates to
    normalized ones, and its inverse maps edits back.
    """
    lo, hi = mesh.bounds()
    extent = hi - lo
    longest = float(extent.max())
    if longest <= 0.0:
        raise ValueError("mesh has zero extent; cannot normalize")
    center = 0.5 * (lo + hi)
    scale = 1.0 / longest
    tf = Transform(scale, -center * scale)
    return mesh.with_vertices(tf.apply(mesh.vertices)), tf


def _parse_face_token(token, n_vertices, line_no):
    head = token.split("/", 1)[0]
    try:
        idx = int(head)
    except ValueError:
        raise ObjParseError(line_no, f"bad face index {token!r}") from None
    if idx < 0:
        idx = n_vertices + idx  # negative indices count back from the latest vertex
    else:
        idx -= 1
    if idx < 0 or idx >= n_vertices:
        raise ObjParseError(line_no, f"face index {token!r} out of range (have {n_vertices} vertices)")
    return idx


def parse_obj(text, source="<string>"):
    """Parse ASCII OBJ text. ``v``/``f`` records only; polygons are
    fan-triangulated from their first vertex; normals and texcoords ignored.
    """
    vertices = []
    faces = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) < 4:
                raise ObjParseError(line_no, "vertex record needs 3 coordinates")
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError:
                raise ObjParseError(line_no, f"bad vertex coordinate in {line!r}") from None
        elif parts[0] == "f":
            if len(parts) < 4:
                raise ObjParseError(line_no, "face record needs at least 3 indices")
            idx = [_parse_face_token(t, len(vertices), line_no) for t in parts[1:]]
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not vertices:
        raise ValueError(f"{source}: no vertices found")
    return Mesh(np.array(vertices), np.array(faces, dtype=np.int64).reshape(-1, 3))


def load_obj(path):
    """Read an ASCII OBJ file; see ``parse_obj`` for the accepted records."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_obj(fh.read(), source=str(path))


def format_obj(mesh, comment=None):
    """Serialize to OBJ text. Deterministic formatting (9 significant
    digits) so equal meshes produce byte-equal output."""
    out = io.StringIO()
    if comment:
        out.write(f"# {comment}\n")
    for v in mesh.vertices:
        out.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
    for f in mesh.faces:
        out.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
    return out.getvalue()


def save_obj(mesh, path, comment=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_obj(mesh, comment=comment))
