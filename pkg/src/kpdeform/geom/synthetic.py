"""Procedural shape families for desk-scale training and evaluation.

Each family is bilaterally symmetric about the x=0 plane and carries
analytically known landmarks plus per-face part labels. Landmarks and
labels are for evaluation only; training never sees them.
"""
from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh

FAMILIES = ("winged", "table", "box")

# landmark name order is fixed per family so landmark sets index consistently
LANDMARK_NAMES = {
    "winged": ("nose", "tail", "left_wing_tip", "right_wing_tip", "fin_top"),
    "table": ("leg_bottom_xy", "leg_bottom_xY", "leg_bottom_Xy", "leg_bottom_XY", "top_center"),
    "box": ("corner_bottom_front", "corner_bottom_back", "corner_top_front", "corner_top_back"),
}

PART_NAMES = {
    "winged": ("fuselage", "wings", "fin", "stabilizer"),
    "table": ("top", "legs"),
    "box": ("body",),
}

# corner bit order: (x,y,z) in {0,1}^3 over the unit cube
_BOX_FACES = np.array(
    [
        [0, 2, 3], [0, 3, 1],
        [4, 5, 7], [4, 7, 6],
        [0, 1, 5], [0, 5, 4],
        [2, 6, 7], [2, 7, 3],
        [0, 4, 6], [0, 6, 2],
        [1, 3, 7], [1, 7, 5],
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class SyntheticShape:
    """One generated instance: mesh plus evaluation-only ground truth."""

    mesh: Mesh
    landmarks: dict = field(default_factory=dict)   # name -> (3,) position
    face_parts: np.ndarray = None                   # (F,) int part label per face
    params: dict = field(default_factory=dict)

    def landmark_array(self, names):
        return np.stack([np.asarray(self.landmarks[n], dtype=np.float64) for n in names])


class _MeshBuilder:
    def __init__(self):
        self.vertices = []
        self.faces = []
        self.face_parts = []

    def add_hexahedron(self, corners, part):
        """``corners``: (8,3) in unit-cube bit order (x,y,z bits)."""
        base = len(self.vertices)
        self.vertices.extend(np.asarray(corners, dtype=np.float64))
        self.faces.extend(_BOX_FACES + base)
        self.face_parts.extend([part] * len(_BOX_FACES))

    def add_box(self, lo, hi, part):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        corners = np.array(
            [[hi[0] if i & 1 else lo[0], hi[1] if i & 2 else lo[1], hi[2] if i & 4 else lo[2]] for i in range(8)]
        )
        self.add_hexahedron(corners, part)

    def build(self):
        mesh = Mesh(np.array(self.vertices), np.array(self.faces, dtype=np.int64))
        return mesh, np.array(self.face_parts, dtype=np.int64)


def _winged(rng):
    p = {
        "fuselage_length": rng.uniform(0.7, 1.1),
        "fuselage_radius": rng.uniform(0.05, 0.09),
        "wing_span": rng.uniform(0.7, 1.2),
        "wing_chord": rng.uniform(0.12, 0.22),
        "wing_thickness": rng.uniform(0.015, 0.03),
        "wing_sweep": rng.uniform(-0.1, 0.2),
        "wing_y": rng.uniform(-0.05, 0.15),
        "fin_height": rng.uniform(0.12, 0.24),
        "fin_length": rng.uniform(0.1, 0.16),
        "stab_span": rng.uniform(0.3, 0.5),
    }
    fl, fr = p["fuselage_length"], p["fuselage_radius"]
    b = _MeshBuilder()
    b.add_box([-fr, -fl / 2, -fr], [fr, fl / 2, fr], part=0)

    # wings: mirrored sheared boxes; the tip is swept back by wing_sweep
    span2 = p["wing_span"] / 2
    chord2 = p["wing_chord"] / 2
    wt = p["wing_thickness"]
    wy = p["wing_y"]
    sweep = p["wing_sweep"]
    root, tip = fr * 0.5, span2
    for side in (1.0, -1.0):
        corners = []
        for zbit in (0, 1):  # loop order yields unit-cube bit indexing (x fastest)
            for ybit in (0, 1):
                for xbit in (0, 1):
                    x = side * (tip if xbit else root)
                    shear = -sweep if xbit else 0.0
                    y = wy + (chord2 if ybit else -chord2) + shear
                    z = wt if zbit else -wt
                    corners.append([x, y, z])
        b.add_hexahedron(np.array(corners), part=1)

    fin_y0 = -fl / 2
    fin_y1 = fin_y0 + p["fin_length"]
    fin_top = fr + p["fin_height"]
    b.add_box([-0.015, fin_y0, fr], [0.015, fin_y1, fin_top], part=2)

    ss2 = p["stab_span"] / 2
    b.add_box([-ss2, fin_y0, -0.01], [ss2, fin_y1, 0.01], part=3)

    mesh, face_parts = b.build()
    landmarks = {
        "nose": np.array([0.0, fl / 2, 0.0]),
        "tail": np.array([0.0, -fl / 2, 0.0]),
        "left_wing_tip": np.array([-span2, wy - sweep, 0.0]),
        "right_wing_tip": np.array([span2, wy - sweep, 0.0]),
        "fin_top": np.array([0.0, (fin_y0 + fin_y1) / 2, fin_top]),
    }
    return SyntheticShape(mesh, landmarks, face_parts, p)


def _table(rng):
    p = {
        "top_width": rng.uniform(0.6, 1.1),
        "top_depth": rng.uniform(0.5, 0.9),
        "top_thickness": rng.uniform(0.03, 0.07),
        "leg_height": rng.uniform(0.4, 0.8),
        "leg_size": rng.uniform(0.03, 0.06),
        "leg_inset": rng.uniform(0.02, 0.08),
    }
    w2, d2 = p["top_width"] / 2, p["top_depth"] / 2
    lh, ls, li = p["leg_height"], p["leg_size"], p["leg_inset"]
    b = _MeshBuilder()
    b.add_box([-w2, -d2, lh], [w2, d2, lh + p["top_thickness"]], part=0)
    landmarks = {}
    for xs, xtag in ((-1.0, "x"), (1.0, "X")):
        for ys, ytag in ((-1.0, "y"), (1.0, "Y")):
            cx = xs * (w2 - li - ls / 2)
            cy = ys * (d2 - li - ls / 2)
            b.add_box([cx - ls / 2, cy - ls / 2, 0.0], [cx + ls / 2, cy + ls / 2, lh], part=1)
            landmarks[f"leg_bottom_{xtag}{ytag}"] = np.array([cx, cy, 0.0])
    landmarks["top_center"] = np.array([0.0, 0.0, lh + p["top_thickness"]])
    mesh, face_parts = b.build()
    return SyntheticShape(mesh, landmarks, face_parts, p)


def _box(rng):
    p = {
        "width": rng.uniform(0.4, 1.0),
        "depth": rng.uniform(0.4, 1.0),
        "height": rng.uniform(0.3, 0.9),
    }
    w2, d2, h2 = p["width"] / 2, p["depth"] / 2, p["height"] / 2
    b = _MeshBuilder()
    b.add_box([-w2, -d2, -h2], [w2, d2, h2], part=0)
    mesh, face_parts = b.build()
    landmarks = {
        "corner_bottom_front": np.array([0.0, d2, -h2]),
        "corner_bottom_back": np.array([0.0, -d2, -h2]),
        "corner_top_front": np.array([0.0, d2, h2]),
        "corner_top_back": np.array([0.0, -d2, h2]),
    }
    return SyntheticShape(mesh, landmarks, face_parts, p)


_GENERATORS = {"winged": _winged, "table": _table, "box": _box}


def generate_synthetic_family(family, count, rng):
    """Generate ``count`` random instances of a family. Deterministic for a
    given rng seed."""
    if family not in _GENERATORS:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = _GENERATORS[family]
    return [gen(rng) for _ in range(count)]
