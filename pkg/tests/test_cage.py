"""Cage construction (icosphere + shrink-wrap), generalized barycentric
coordinates, cage-driven deformation, and weight persistence."""
import numpy as np
import pytest

from kpdeform.cage import (
    Cage,
    CageWeights,
    deform,
    icosphere,
    init_cage,
    load_cage,
    load_cage_weights,
    mean_value_coordinates,
    save_cage,
    save_cage_weights,
)
from kpdeform.geom import PointCloud, Rng

from conftest import interior_points, jittered_cage


def _closed_and_oriented(mesh):
    edges = set()
    for f in mesh.faces:
        for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            if e in edges:
                return False
            edges.add(e)
    return all((b, a) in edges for a, b in edges)


class TestIcosphere:
    def test_base_counts(self):
        base = icosphere(0)
        assert base.n_vertices == 12 and base.n_faces == 20

    def test_one_subdivision_counts(self):
        s = icosphere(1)
        assert s.n_vertices == 42 and s.n_faces == 80

    def test_two_subdivision_counts(self):
        s = icosphere(2)
        assert s.n_vertices == 162 and s.n_faces == 320

    @pytest.mark.parametrize("level", [0, 1, 2])
    def test_unit_radius(self, level):
        s = icosphere(level)
        np.testing.assert_allclose(
            np.linalg.norm(s.vertices, axis=1), 1.0, atol=1e-9
        )

    @pytest.mark.parametrize("level", [0, 1, 2])
    def test_closed_and_consistently_oriented(self, level):
        assert _closed_and_oriented(icosphere(level))

    def test_outward_orientation(self):
        s = icosphere(1)
        a, b, c = s.vertices[s.faces[:, 0]], s.vertices[s.faces[:, 1]], s.vertices[s.faces[:, 2]]
        normals = np.cross(b - a, c - a)
        centers = (a + b + c) / 3.0
        assert (np.einsum("ij,ij->i", normals, centers) > 0).all()

    def test_deterministic(self):
        np.testing.assert_array_equal(icosphere(1).vertices, icosphere(1).vertices)

    def test_negative_level_rejected(self):
        with pytest.raises(ValueError):
            icosphere(-1)


class TestInitCage:
    def test_wraps_sphere_cloud(self):
        # points densely covering a radius-1/3 sphere (dense enough that no
        # cage vertex can slip between samples); margin 0.05 leaves the cage
        # near radius ~0.38 and never inside the samples
        dirs = Rng(21).normal(size=(4000, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        cloud = PointCloud(dirs / 3.0)
        cage = init_cage(cloud, icosphere(1))
        radii = np.linalg.norm(cage.vertices, axis=1)
        assert (radii > 1.0 / 3.0).all()
        assert (radii < 0.45).all()

    def test_vertices_stop_near_margin(self):
        from kpdeform._kernels import nearest_neighbors

        dirs = Rng(22).normal(size=(4000, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = dirs / 3.0
        cage = init_cage(PointCloud(pts), icosphere(1), margin=0.05, step=0.05)
        _, d2 = nearest_neighbors(cage.vertices, pts)
        d = np.sqrt(d2)
        # each vertex stops the first time it is within the margin; the step
        # before it was beyond it, and one step moves at most step * (initial
        # distance to the centroid) = 0.05 * 0.4 = 0.02
        assert (d > 0.05 - 0.021).all()
        assert (d <= 0.05 + 1e-12).all()

    def test_huge_margin_keeps_initial_scale(self, rng):
        pts = rng.uniform(-0.5, 0.5, size=(100, 3))
        cage = init_cage(PointCloud(pts), icosphere(1), margin=10.0)
        center = pts.mean(axis=0)
        radius = np.linalg.norm(pts - center, axis=1).max()
        np.testing.assert_allclose(
            np.linalg.norm(cage.vertices - center, axis=1), 1.2 * radius, atol=1e-9
        )

    def test_deterministic(self, rng):
        pts = rng.uniform(-0.5, 0.5, size=(200, 3))
        a = init_cage(PointCloud(pts), icosphere(1))
        b = init_cage(PointCloud(pts), icosphere(1))
        np.testing.assert_array_equal(a.vertices, b.vertices)

    def test_degenerate_cloud_rejected(self):
        with pytest.raises(ValueError):
            init_cage(PointCloud(np.ones((5, 3))), icosphere(0))

    def test_preserves_template_topology(self, rng):
        pts = rng.uniform(-0.5, 0.5, size=(50, 3))
        cage = init_cage(PointCloud(pts), icosphere(1))
        assert isinstance(cage, Cage)
        np.testing.assert_array_equal(cage.faces, icosphere(1).faces)


class TestCoordinates:
    def test_tetrahedron_centroid_is_quarter_each(self):
        verts = np.array([
            [1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0],
        ])
        cage = Cage(verts, np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]))
        w = mean_value_coordinates(np.zeros((1, 3)), cage).weights
        np.testing.assert_allclose(w[0], 0.25, atol=1e-9)

    def test_rows_sum_to_one(self, rng):
        cage = jittered_cage(rng)
        w = mean_value_coordinates(interior_points(cage, rng, 50), cage).weights
        np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-9)

    def test_reproduces_evaluation_points(self, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 50)
        w = mean_value_coordinates(pts, cage).weights
        np.testing.assert_allclose(w @ cage.vertices, pts, atol=1e-8)

    def test_on_surface_points_handled_by_perturbation(self, rng):
        cage = jittered_cage(rng)
        # face midpoints lie exactly on the surface
        mids = cage.vertices[cage.faces].mean(axis=1)[:10]
        w = mean_value_coordinates(mids, cage).weights
        np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-6)
        np.testing.assert_allclose(w @ cage.vertices, mids, atol=1e-6)

    def test_cage_vertices_map_to_themselves(self, rng):
        cage = jittered_cage(rng)
        w = mean_value_coordinates(cage.vertices[:5], cage).weights
        np.testing.assert_allclose(w @ cage.vertices, cage.vertices[:5], atol=1e-6)


class TestDeform:
    def test_identity(self, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 40)
        w = mean_value_coordinates(pts, cage)
        np.testing.assert_allclose(deform(pts, w, cage.vertices), pts, atol=1e-8)

    def test_translation_carries_points(self, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 40)
        w = mean_value_coordinates(pts, cage)
        t = np.array([0.4, -0.1, 0.25])
        np.testing.assert_allclose(
            deform(pts, w, cage.vertices + t), pts + t, atol=1e-8
        )

    def test_affine_map_is_reproduced(self, rng):
        # linear precision extends to any affine cage motion
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 40)
        w = mean_value_coordinates(pts, cage)
        amat = np.array([[1.2, 0.1, 0.0], [-0.2, 0.9, 0.05], [0.0, 0.1, 1.1]])
        t = np.array([0.1, 0.2, -0.3])
        np.testing.assert_allclose(
            deform(pts, w, cage.vertices @ amat.T + t), pts @ amat.T + t, atol=1e-8
        )

    def test_linear_in_cage_vertices(self, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 20)
        w = mean_value_coordinates(pts, cage)
        va = cage.vertices
        vb = cage.vertices * 1.3 + 0.2
        mid = deform(pts, w, 0.5 * (va + vb))
        np.testing.assert_allclose(
            mid, 0.5 * (deform(pts, w, va) + deform(pts, w, vb)), atol=1e-12
        )

    def test_shape_mismatch_rejected(self, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 10)
        w = mean_value_coordinates(pts, cage)
        with pytest.raises(ValueError):
            deform(pts, w, cage.vertices[:-1])
        with pytest.raises(ValueError):
            deform(pts[:-1], w, cage.vertices)


class TestPersistence:
    def test_cage_round_trip(self, tmp_path, rng):
        cage = jittered_cage(rng)
        save_cage(cage, tmp_path / "c.obj")
        back = load_cage(tmp_path / "c.obj")
        assert isinstance(back, Cage)
        np.testing.assert_allclose(back.vertices, cage.vertices, atol=1e-9)
        np.testing.assert_array_equal(back.faces, cage.faces)

    def test_weights_round_trip_exact(self, tmp_path, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 25)
        w = mean_value_coordinates(pts, cage)
        save_cage_weights(w, tmp_path / "w.bin", points=pts, cage=cage)
        back = load_cage_weights(tmp_path / "w.bin", points=pts, cage=cage)
        np.testing.assert_array_equal(back.weights, w.weights)

    def test_tampered_blob_detected(self, tmp_path, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 10)
        save_cage_weights(mean_value_coordinates(pts, cage), tmp_path / "w.bin")
        blob = bytearray((tmp_path / "w.bin").read_bytes())
        blob[3] ^= 0xFF
        (tmp_path / "w.bin").write_bytes(bytes(blob))
        with pytest.raises(ValueError, match="hash"):
            load_cage_weights(tmp_path / "w.bin")

    def test_wrong_points_detected(self, tmp_path, rng):
        cage = jittered_cage(rng)
        pts = interior_points(cage, rng, 10)
        save_cage_weights(mean_value_coordinates(pts, cage), tmp_path / "w.bin", points=pts, cage=cage)
        with pytest.raises(ValueError, match="different points"):
            load_cage_weights(tmp_path / "w.bin", points=pts.copy() + 1e-3, cage=cage)

    def test_wrong_cage_detected(self, tmp_path, rng):
        cage = jittered_cage(rng)
        other = jittered_cage(rng)
        pts = interior_points(cage, rng, 10)
        save_cage_weights(mean_value_coordinates(pts, cage), tmp_path / "w.bin", points=pts, cage=cage)
        with pytest.raises(ValueError, match="different cage"):
            load_cage_weights(tmp_path / "w.bin", points=pts, cage=other)
