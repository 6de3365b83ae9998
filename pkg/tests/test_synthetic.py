"""Procedural shape families: symmetry, landmark placement, determinism."""
import numpy as np
import pytest

from kpdeform.geom import Rng
from kpdeform.geom.synthetic import (
    FAMILIES,
    LANDMARK_NAMES,
    PART_NAMES,
    generate_synthetic_family,
)


@pytest.mark.parametrize("family", FAMILIES)
class TestEveryFamily:
    def test_mirror_symmetry_about_x0(self, family):
        # reflecting the vertex set across x=0 reproduces the same vertex set
        for shape in generate_synthetic_family(family, 4, Rng(1)):
            verts = shape.mesh.vertices
            mirrored = verts * np.array([-1.0, 1.0, 1.0])
            order = np.lexsort(verts.T)
            order_m = np.lexsort(mirrored.T)
            np.testing.assert_allclose(
                verts[order], mirrored[order_m], atol=1e-6
            )

    def test_landmarks_complete_and_finite(self, family):
        shape = generate_synthetic_family(family, 1, Rng(2))[0]
        assert set(shape.landmarks) == set(LANDMARK_NAMES[family])
        arr = shape.landmark_array(LANDMARK_NAMES[family])
        assert arr.shape == (len(LANDMARK_NAMES[family]), 3)
        assert np.isfinite(arr).all()

    def test_landmarks_on_or_near_surface(self, family):
        from kpdeform._kernels import point_mesh_sqdist

        shape = generate_synthetic_family(family, 2, Rng(3))[1]
        arr = shape.landmark_array(LANDMARK_NAMES[family])
        d2 = point_mesh_sqdist(arr, shape.mesh.vertices, shape.mesh.faces)
        # landmarks sit on the surface (axis landmarks touch box faces)
        assert (np.sqrt(d2) < 1e-9).all()

    def test_face_parts_cover_every_face(self, family):
        shape = generate_synthetic_family(family, 1, Rng(4))[0]
        parts = shape.face_parts
        assert parts.shape == (shape.mesh.n_faces,)
        assert parts.min() >= 0
        assert parts.max() < len(PART_NAMES[family])
        # every declared part is actually used
        assert set(parts.tolist()) == set(range(len(PART_NAMES[family])))

    def test_deterministic(self, family):
        a = generate_synthetic_family(family, 3, Rng(77))
        b = generate_synthetic_family(family, 3, Rng(77))
        for sa, sb in zip(a, b):
            np.testing.assert_array_equal(sa.mesh.vertices, sb.mesh.vertices)
            np.testing.assert_array_equal(sa.mesh.faces, sb.mesh.faces)
            assert sa.params == sb.params

    def test_instances_vary(self, family):
        a, b = generate_synthetic_family(family, 2, Rng(8))
        assert not np.array_equal(a.mesh.vertices, b.mesh.vertices)

    def test_closed_surface(self, family):
        # each directed edge appears exactly once: closed, consistently
        # oriented triangle soup
        shape = generate_synthetic_family(family, 1, Rng(5))[0]
        edges = set()
        for f in shape.mesh.faces:
            for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                assert e not in edges
                edges.add(e)
        for a, b in edges:
            assert (b, a) in edges


class TestWingedLandmarks:
    def test_positions_follow_parameters(self):
        shape = generate_synthetic_family("winged", 1, Rng(11))[0]
        p = shape.params
        np.testing.assert_allclose(
            shape.landmarks["nose"], [0.0, p["fuselage_length"] / 2, 0.0], atol=1e-12
        )
        np.testing.assert_allclose(
            shape.landmarks["left_wing_tip"],
            [-p["wing_span"] / 2, p["wing_y"] - p["wing_sweep"], 0.0],
            atol=1e-12,
        )
        np.testing.assert_allclose(
            shape.landmarks["right_wing_tip"],
            [p["wing_span"] / 2, p["wing_y"] - p["wing_sweep"], 0.0],
            atol=1e-12,
        )
        assert shape.landmarks["fin_top"][2] == pytest.approx(
            p["fuselage_radius"] + p["fin_height"]
        )

    def test_wing_tips_mirror_each_other(self):
        for shape in generate_synthetic_family("winged", 5, Rng(12)):
            l, r = shape.landmarks["left_wing_tip"], shape.landmarks["right_wing_tip"]
            np.testing.assert_allclose(l * np.array([-1.0, 1.0, 1.0]), r, atol=1e-12)


class TestTableLandmarks:
    def test_leg_bottoms_on_ground(self):
        shape = generate_synthetic_family("table", 1, Rng(13))[0]
        for name in ("leg_bottom_xy", "leg_bottom_xY", "leg_bottom_Xy", "leg_bottom_XY"):
            assert shape.landmarks[name][2] == 0.0
        assert shape.landmarks["top_center"][2] == pytest.approx(
            shape.params["leg_height"] + shape.params["top_thickness"]
        )


class TestErrors:
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            generate_synthetic_family("teapot", 1, Rng(0))

    def test_bad_count(self):
        with pytest.raises(ValueError):
            generate_synthetic_family("box", 0, Rng(0))
