"""Service layer: wire format, inference pipeline, session store, HTTP API,
dataset tooling, and the command-line interface."""
import json
import os

import numpy as np
import pytest
from fastapi.testclient import TestClient

from kpdeform.deformer import load_checkpoint
from kpdeform.geom import Rng, load_obj, parse_obj, save_obj
from kpdeform.geom.synthetic import generate_synthetic_family
from kpdeform.prior import fit_pca, load_prior, save_prior
from kpdeform.service.api import create_app
from kpdeform.service.cli import main
from kpdeform.service.datasets import (
    load_dataset,
    run_align_protocol,
    run_parts_protocol,
    run_pck_protocol,
    write_synthetic_dataset,
)
from kpdeform.service.pipeline import (
    InferenceSettings,
    content_rng,
    deform_to_keypoints,
    keypoints_to_normalized,
    keypoints_to_original,
    mesh_content_hash,
    prepare_mesh,
)
from kpdeform.service.sessions import SessionError, SessionStore, builtin_mesh
from kpdeform.service.wire import mesh_payload, parse_points, round9, round9_scalar


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One tiny trained checkpoint + prior + annotated dataset, built through
    the real CLI so the commands themselves are exercised."""
    root = tmp_path_factory.mktemp("svc")
    ckpt = root / "model.ckpt"
    prior = root / "prior.json"
    data = root / "dataset"
    rc = main([
        "train", "--synthetic", "box", "--count", "4", "--keypoints", "2",
        "--iters", "4", "--points", "48", "--seed", "5",
        "--out", str(ckpt), "--prior-out", str(prior), "--prior-basis", "2",
    ])
    assert rc == 0
    rc = main([
        "synth", "--family", "box", "--count", "12", "--seed", "3",
        "--points", "64", "--test-frac", "0.25", "--out", str(data),
    ])
    assert rc == 0
    return {"root": root, "ckpt": ckpt, "prior": prior, "data": data}


@pytest.fixture(scope="module")
def served(workspace):
    model, header = load_checkpoint(workspace["ckpt"])
    settings = InferenceSettings.from_header(header)
    prior = load_prior(workspace["prior"])
    return {"model": model, "settings": settings, "prior": prior}


class TestWire:
    def test_round9_scalar(self):
        assert round9_scalar(1.0 / 3.0) == 0.333333333
        assert round9_scalar(1.0) == 1.0
        assert round9_scalar(-2.5e-7) == -2.5e-7

    def test_round9_nested(self):
        out = round9(np.array([[1.0 / 3.0, 0.0, 1.0], [2.0 / 3.0, -1.0, 0.5]]))
        assert out == [[0.333333333, 0.0, 1.0], [0.666666667, -1.0, 0.5]]

    def test_round9_idempotent(self, rng):
        arr = rng.normal(size=(10, 3))
        once = round9(arr)
        assert round9(np.array(once)) == once

    def test_mesh_payload(self):
        mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        payload = mesh_payload(mesh)
        assert payload["vertices"] == [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
        assert payload["faces"] == [[0, 1, 2]]

    def test_parse_points_happy_path(self):
        arr = parse_points([[0, 1, 2], [3, 4, 5]], expected=2)
        assert arr.shape == (2, 3) and arr.dtype == np.float64

    def test_parse_points_rejects_bad_payloads(self):
        with pytest.raises(ValueError):
            parse_points("nope")
        with pytest.raises(ValueError):
            parse_points([[0, 1]], expected=1)
        with pytest.raises(ValueError):
            parse_points([[0, 1, 2]], expected=2)
        with pytest.raises(ValueError):
            parse_points([[0, 1, float("nan")]])


class TestPipeline:
    def test_content_hash_tracks_content(self):
        a = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        b = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        c = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 1\nf 1 2 3\n")
        assert mesh_content_hash(a) == mesh_content_hash(b)
        assert mesh_content_hash(a) != mesh_content_hash(c)

    def test_content_rng_reproducible(self):
        mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        np.testing.assert_array_equal(
            content_rng(mesh).uniform(size=8), content_rng(mesh).uniform(size=8)
        )

    def test_prepare_mesh_deterministic(self, served):
        mesh = generate_synthetic_family("box", 1, Rng(6))[0].mesh
        a = prepare_mesh(served["model"], mesh, served["settings"])
        b = prepare_mesh(served["model"], mesh, served["settings"])
        np.testing.assert_array_equal(a.keypoints, b.keypoints)
        np.testing.assert_array_equal(a.cage.vertices, b.cage.vertices)

    def test_keypoint_frame_round_trip(self, served):
        mesh = generate_synthetic_family("box", 1, Rng(6))[0].mesh
        prepared = prepare_mesh(served["model"], mesh, served["settings"], with_cage=False)
        orig = keypoints_to_original(prepared, prepared.keypoints)
        np.testing.assert_allclose(
            keypoints_to_normalized(prepared, orig), prepared.keypoints, atol=1e-12
        )

    def test_deform_to_own_keypoints_is_identity(self, served):
        mesh = generate_synthetic_family("box", 1, Rng(6))[0].mesh
        prepared = prepare_mesh(served["model"], mesh, served["settings"])
        out = deform_to_keypoints(served["model"], prepared, prepared.keypoints)
        assert np.abs(out.vertices - mesh.vertices).max() < 1e-5

    def test_deform_validates_targets(self, served):
        mesh = generate_synthetic_family("box", 1, Rng(6))[0].mesh
        prepared = prepare_mesh(served["model"], mesh, served["settings"])
        with pytest.raises(ValueError):
            deform_to_keypoints(served["model"], prepared, np.zeros((3, 3)))
        with pytest.raises(ValueError):
            deform_to_keypoints(served["model"], prepared, np.full((2, 3), np.nan))


class TestSessionStore:
    def test_create_get_drop(self, served):
        store = SessionStore(served["model"], served["settings"])
        session = store.create(builtin_mesh("box"))
        assert store.get(session.session_id) is session
        store.drop(session.session_id)
        with pytest.raises(SessionError) as exc:
            store.get(session.session_id)
        assert exc.value.status == 404

    def test_unknown_builtin_rejected(self):
        with pytest.raises(SessionError) as exc:
            builtin_mesh("teapot")
        assert exc.value.status == 422

    def test_sessions_isolated(self, served):
        store = SessionStore(served["model"], served["settings"])
        a = store.create(builtin_mesh("box"))
        b = store.create(builtin_mesh("winged"))
        assert a.session_id != b.session_id
        store.deform(a.session_id, keypoints=np.array(a.keypoints_original) + 0.05)
        np.testing.assert_array_equal(
            b.deformed_mesh.vertices, b.prepared.original.vertices
        )

    def test_exactly_one_mode_required(self, served):
        store = SessionStore(served["model"], served["settings"], prior=served["prior"])
        s = store.create(builtin_mesh("box"))
        with pytest.raises(SessionError) as exc:
            store.deform(s.session_id)
        assert exc.value.status == 422
        with pytest.raises(SessionError) as exc:
            store.deform(
                s.session_id,
                keypoints=s.keypoints_original,
                edits=[(0, np.zeros(3))],
            )
        assert exc.value.status == 422

    def test_sync_requires_edits(self, served):
        store = SessionStore(served["model"], served["settings"], prior=served["prior"])
        s = store.create(builtin_mesh("box"))
        with pytest.raises(SessionError) as exc:
            store.deform(s.session_id, keypoints=s.keypoints_original, sync=True)
        assert exc.value.status == 422

    def test_sync_without_prior_conflicts(self, served):
        store = SessionStore(served["model"], served["settings"], prior=None)
        s = store.create(builtin_mesh("box"))
        with pytest.raises(SessionError) as exc:
            store.deform(s.session_id, edits=[(0, [0.0, 0.0, 0.0])], sync=True)
        assert exc.value.status == 409

    def test_full_set_deform_and_reset(self, served):
        store = SessionStore(served["model"], served["settings"])
        s = store.create(builtin_mesh("box"))
        before = s.deformed_mesh.vertices.copy()
        store.deform(s.session_id, keypoints=np.array(s.keypoints_original) + 0.1)
        after = s.deformed_mesh.vertices
        assert after.shape == before.shape
        store.reset(s.session_id)
        np.testing.assert_array_equal(s.deformed_mesh.vertices, before)
        np.testing.assert_array_equal(s.current_keypoints, s.keypoints_original)


class TestHttpApi:
    @pytest.fixture()
    def client(self, served):
        app = create_app(served["model"], served["settings"], prior=served["prior"])
        return TestClient(app)

    @pytest.fixture()
    def bare_client(self, served):
        app = create_app(served["model"], served["settings"], prior=None,
                         max_upload_bytes=512)
        return TestClient(app)

    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["n_keypoints"] == 2
        assert body["kernel_backend"] in ("python", "cython")
        assert body["prior_loaded"] is True

    def test_create_builtin_session(self, client):
        r = client.post("/sessions", json={"builtin": "box"})
        assert r.status_code == 200
        body = r.json()
        assert body["n_keypoints"] == 2
        assert len(body["keypoints"]) == 2
        assert body["keypoints"] == body["original_keypoints"]
        assert body["synchronized"] is False
        assert len(body["cage"]["vertices"]) == 42
        assert len(body["mesh"]["vertices"]) >= 8

    def test_create_session_from_obj_text(self, client):
        mesh = generate_synthetic_family("table", 1, Rng(9))[0].mesh
        from kpdeform.geom import format_obj

        r = client.post("/sessions", json={"obj": format_obj(mesh)})
        assert r.status_code == 200
        assert len(r.json()["mesh"]["vertices"]) == mesh.n_vertices

    def test_create_requires_exactly_one_source(self, client):
        assert client.post("/sessions", json={}).status_code == 422
        assert client.post(
            "/sessions", json={"obj": "v 0 0 0", "builtin": "box"}
        ).status_code == 422

    def test_bad_obj_rejected(self, client):
        r = client.post("/sessions", json={"obj": "v 0 0\n"})
        assert r.status_code == 422
        assert "parse" in r.json()["detail"].lower() or "OBJ" in r.json()["detail"]

    def test_upload_cap_enforced(self, bare_client):
        r = bare_client.post("/sessions", json={"obj": "v 0 0 0\n" * 200})
        assert r.status_code == 413

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope").status_code == 404
        assert client.post("/sessions/nope/deform", json={"keypoints": []}).status_code == 404

    def test_identity_deform_round_trip(self, client):
        create = client.post("/sessions", json={"builtin": "box"}).json()
        r = client.post(
            f"/sessions/{create['session_id']}/deform",
            json={"keypoints": create["original_keypoints"]},
        )
        assert r.status_code == 200
        got = np.array(r.json()["vertices"])
        want = np.array(create["mesh"]["vertices"])
        assert np.abs(got - want).max() < 1e-5

    def test_deform_validates_payload(self, client):
        sid = client.post("/sessions", json={"builtin": "box"}).json()["session_id"]
        assert client.post(f"/sessions/{sid}/deform", json={}).status_code == 422
        assert client.post(
            f"/sessions/{sid}/deform", json={"keypoints": [[0, 0, 0]]}
        ).status_code == 422
        assert client.post(
            f"/sessions/{sid}/deform", json={"edits": []}
        ).status_code == 422
        assert client.post(
            f"/sessions/{sid}/deform", json={"edits": [{"index": 0}]}
        ).status_code == 422

    def test_edit_without_sync_moves_one_keypoint(self, client):
        create = client.post("/sessions", json={"builtin": "box"}).json()
        sid = create["session_id"]
        target = [v + 0.05 for v in create["original_keypoints"][0]]
        r = client.post(
            f"/sessions/{sid}/deform",
            json={"edits": [{"index": 0, "position": target}]},
        )
        assert r.status_code == 200
        body = r.json()
        np.testing.assert_allclose(body["keypoints"][0], target, atol=1e-6)
        np.testing.assert_allclose(
            body["keypoints"][1], create["original_keypoints"][1], atol=1e-6
        )
        assert body["synchronized"] is False

    def test_synchronized_edit_marks_response(self, client):
        create = client.post("/sessions", json={"builtin": "box"}).json()
        sid = create["session_id"]
        target = [v + 0.02 for v in create["original_keypoints"][0]]
        r = client.post(
            f"/sessions/{sid}/deform",
            json={"edits": [{"index": 0, "position": target}], "sync": True},
        )
        assert r.status_code == 200
        body = r.json()
        assert body["synchronized"] is True
        np.testing.assert_allclose(body["keypoints"][0], target, atol=1e-6)

    def test_sync_without_prior_409(self, bare_client):
        create = bare_client.post("/sessions", json={"builtin": "box"}).json()
        r = bare_client.post(
            f"/sessions/{create['session_id']}/deform",
            json={"edits": [{"index": 0, "position": [0, 0, 0]}], "sync": True},
        )
        assert r.status_code == 409

    def test_prior_coefficients_deform(self, client, served):
        create = client.post("/sessions", json={"builtin": "box"}).json()
        r = client.post(
            f"/sessions/{create['session_id']}/deform",
            json={"prior_coefficients": [0.0, 0.0]},
        )
        assert r.status_code == 200
        # zero coefficients sample the prior mean
        mean_kp = served["prior"].mean.reshape(2, 3)
        prepared_kp = np.array(r.json()["keypoints"])
        assert prepared_kp.shape == mean_kp.shape

    def test_reset_restores_initial_view(self, client):
        create = client.post("/sessions", json={"builtin": "box"}).json()
        sid = create["session_id"]
        client.post(f"/sessions/{sid}/deform",
                    json={"keypoints": [[0.1, 0.1, 0.1], [-0.1, -0.1, -0.1]]})
        r = client.post(f"/sessions/{sid}/reset")
        assert r.status_code == 200
        body = r.json()
        assert body["keypoints"] == create["keypoints"]
        assert body["mesh"]["vertices"] == create["mesh"]["vertices"]

    def test_export_obj_attachment(self, client):
        create = client.post("/sessions", json={"builtin": "box"}).json()
        r = client.get(f"/sessions/{create['session_id']}/export")
        assert r.status_code == 200
        assert "deformed.obj" in r.headers["content-disposition"]
        assert r.text.startswith("v ")
        # exporting twice yields identical bytes
        again = client.get(f"/sessions/{create['session_id']}/export")
        assert again.content == r.content

    def test_prior_endpoints(self, client, bare_client):
        body = client.get("/prior").json()
        assert body["available"] is True
        assert body["n_basis"] == 2
        assert len(body["component_std"]) == 2
        assert bare_client.get("/prior").json() == {"available": False}

    def test_prior_sample(self, client, served):
        r = client.post("/prior/sample", json={"coefficients": [0.0, 0.0]})
        assert r.status_code == 200
        got = np.array(r.json()["keypoints"])
        np.testing.assert_allclose(got, served["prior"].mean.reshape(2, 3), atol=1e-8)
        assert client.post("/prior/sample", json={}).status_code == 422
        assert client.post("/prior/sample", json={"coefficients": [1.0]}).status_code == 422

    def test_prior_sample_without_prior_409(self, bare_client):
        r = bare_client.post("/prior/sample", json={"coefficients": [0.0, 0.0]})
        assert r.status_code == 409


class TestDatasets:
    def test_manifest_structure(self, workspace):
        manifest = json.loads((workspace["data"] / "manifest.json").read_text())
        assert manifest["format"] == "kpdeform-dataset"
        assert manifest["family"] == "box"
        assert manifest["count"] == 12
        splits = [s["split"] for s in manifest["shapes"]]
        assert splits.count("test") == 3 and splits.count("train") == 9
        first = manifest["shapes"][0]
        assert (workspace["data"] / first["mesh"]).is_file()
        assert (workspace["data"] / first["cloud"]).is_file()
        assert set(first["landmark_present"]) == {True}

    def test_cloud_files_have_labels(self, workspace):
        manifest = json.loads((workspace["data"] / "manifest.json").read_text())
        cloud = json.loads((workspace["data"] / manifest["shapes"][0]["cloud"]).read_text())
        pts = np.array(cloud["points"])
        labels = np.array(cloud["part_labels"])
        assert pts.shape == (64, 3)
        assert labels.shape == (64,)
        assert set(labels.tolist()) <= set(range(len(manifest["part_names"])))

    def test_load_dataset_round_trip(self, workspace):
        ds = load_dataset(workspace["data"])
        assert ds.family == "box"
        assert len(ds.records) == 12
        assert len(ds.split("train")) == 9
        assert len(ds.split("test")) == 3
        rec = ds.records[0]
        assert rec.mesh.n_vertices == 8
        assert rec.landmarks.shape == (len(ds.landmark_names), 3)
        assert rec.present.all()
        assert rec.cloud_points.shape == (64, 3)
        assert rec.part_labels.shape == (64,)

    def test_generation_deterministic(self, tmp_path):
        write_synthetic_dataset("box", 3, 7, tmp_path / "a", n_cloud_points=32)
        write_synthetic_dataset("box", 3, 7, tmp_path / "b", n_cloud_points=32)
        a = (tmp_path / "a" / "manifest.json").read_text()
        b = (tmp_path / "b" / "manifest.json").read_text()
        assert a == b
        for rel in json.loads(a)["shapes"]:
            assert (tmp_path / "a" / rel["mesh"]).read_bytes() == (
                tmp_path / "b" / rel["mesh"]
            ).read_bytes()

    def test_pck_protocol_report_shape(self, workspace, served):
        ds = load_dataset(workspace["data"])
        report = run_pck_protocol(served["model"], ds, served["settings"])
        assert 0.0 <= report["pck"] <= 1.0
        assert report["threshold"] == 0.05
        assert report["n_train"] == 9 and report["n_test"] == 3
        curve = report["curve"]
        values = [curve[k] for k in sorted(curve, key=float)]
        assert values == sorted(values)

    def test_parts_protocol_report_shape(self, workspace, served):
        ds = load_dataset(workspace["data"])
        report = run_parts_protocol(served["model"], ds, served["settings"])
        assert 0.0 <= report["score"] <= 1.0
        assert len(report["per_keypoint"]) == 2
        assert report["labels"] == ["body"]
        assert report["n_test"] == 3

    def test_align_protocol_honors_pair_cap(self, workspace, served):
        ds = load_dataset(workspace["data"])
        report = run_align_protocol(
            served["model"], ds, served["settings"], seed=1, max_pairs=4
        )
        assert report["n_pairs"] == 4
        assert report["mean_identity_chamfer"] > 0
        assert np.isfinite(report["ratio"])


class TestCli:
    def test_keypoints_command(self, workspace, tmp_path):
        mesh = generate_synthetic_family("box", 1, Rng(30))[0].mesh
        mesh_path = tmp_path / "shape.obj"
        save_obj(mesh, mesh_path)
        out = tmp_path / "kp.json"
        rc = main([
            "keypoints", "--ckpt", str(workspace["ckpt"]),
            "--mesh", str(mesh_path), "--out", str(out),
        ])
        assert rc == 0
        body = json.loads(out.read_text())
        assert body["n_keypoints"] == 2
        assert np.array(body["keypoints"]).shape == (2, 3)

    def test_deform_identity_command(self, workspace, tmp_path):
        mesh = generate_synthetic_family("box", 1, Rng(31))[0].mesh
        mesh_path = tmp_path / "shape.obj"
        save_obj(mesh, mesh_path)
        kp_path = tmp_path / "kp.json"
        assert main([
            "keypoints", "--ckpt", str(workspace["ckpt"]),
            "--mesh", str(mesh_path), "--out", str(kp_path),
        ]) == 0
        out = tmp_path / "deformed.obj"
        assert main([
            "deform", "--ckpt", str(workspace["ckpt"]), "--mesh", str(mesh_path),
            "--target-keypoints", str(kp_path), "--out", str(out),
        ]) == 0
        deformed = load_obj(out)
        assert np.abs(deformed.vertices - mesh.vertices).max() < 1e-5

    def test_deform_accepts_bare_list_file(self, workspace, tmp_path):
        mesh = generate_synthetic_family("box", 1, Rng(32))[0].mesh
        mesh_path = tmp_path / "shape.obj"
        save_obj(mesh, mesh_path)
        kp_path = tmp_path / "kp.json"
        kp_path.write_text("[[0.0, 0.0, 0.0], [0.1, 0.1, 0.1]]")
        out = tmp_path / "deformed.obj"
        assert main([
            "deform", "--ckpt", str(workspace["ckpt"]), "--mesh", str(mesh_path),
            "--target-keypoints", str(kp_path), "--out", str(out),
        ]) == 0
        assert out.is_file()

    def test_eval_pck_writes_report(self, workspace, tmp_path):
        out = tmp_path / "pck.json"
        rc = main([
            "eval", "--ckpt", str(workspace["ckpt"]), "--protocol", "pck",
            "--annotations", str(workspace["data"]), "--out", str(out),
        ])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["protocol"] == "pck"
        assert 0.0 <= report["pck"] <= 1.0

    def test_eval_parts_with_csv(self, workspace, tmp_path):
        out = tmp_path / "parts.json"
        csv_out = tmp_path / "parts.csv"
        rc = main([
            "eval", "--ckpt", str(workspace["ckpt"]), "--protocol", "parts",
            "--annotations", str(workspace["data"]),
            "--out", str(out), "--csv", str(csv_out),
        ])
        assert rc == 0
        assert csv_out.is_file() and out.is_file()

    def test_eval_align_with_pair_cap(self, workspace, tmp_path):
        out = tmp_path / "align.json"
        rc = main([
            "eval", "--ckpt", str(workspace["ckpt"]), "--protocol", "align",
            "--annotations", str(workspace["data"]),
            "--max-pairs", "4", "--out", str(out),
        ])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["n_pairs"] == 4

    def test_amplify_sweep(self, workspace, tmp_path):
        mesh = generate_synthetic_family("box", 1, Rng(33))[0].mesh
        mesh_path = tmp_path / "shape.obj"
        save_obj(mesh, mesh_path)
        out_dir = tmp_path / "sweep"
        rc = main([
            "amplify", "--ckpt", str(workspace["ckpt"]), "--prior", str(workspace["prior"]),
            "--mesh", str(mesh_path), "--sweep", "basis:0,-1,1,3", "--out", str(out_dir),
        ])
        assert rc == 0
        objs = sorted(out_dir.glob("*.obj"))
        assert len(objs) == 3
        sweep = json.loads((out_dir / "sweep.json").read_text())
        assert sweep["basis"] == 0
        assert len(sweep["steps"]) == 3

    def test_bad_flags_exit_1(self):
        assert main(["train"]) == 1  # missing required source/out
        assert main(["eval", "--ckpt", "x", "--protocol", "bogus",
                     "--annotations", "y"]) == 1
        assert main(["nonsense"]) == 1

    def test_missing_checkpoint_exit_1(self, tmp_path):
        assert main([
            "keypoints", "--ckpt", str(tmp_path / "missing.ckpt"),
            "--mesh", str(tmp_path / "missing.obj"),
        ]) == 1

    def test_corrupt_checkpoint_exit_1(self, tmp_path):
        bad = tmp_path / "bad.ckpt"
        bad.write_bytes(b"not a checkpoint\njunk")
        mesh_path = tmp_path / "m.obj"
        save_obj(generate_synthetic_family("box", 1, Rng(1))[0].mesh, mesh_path)
        assert main(["keypoints", "--ckpt", str(bad), "--mesh", str(mesh_path)]) == 1

    def test_train_data_dir_of_objs(self, tmp_path):
        for i, shape in enumerate(generate_synthetic_family("box", 3, Rng(40))):
            save_obj(shape.mesh, tmp_path / f"s{i}.obj")
        out = tmp_path / "m.ckpt"
        rc = main([
            "train", "--data", str(tmp_path), "--keypoints", "2", "--iters", "2",
            "--points", "32", "--out", str(out),
        ])
        assert rc == 0
        model, header = load_checkpoint(out)
        assert header["category"] == tmp_path.name
        assert model.n_keypoints == 2

    def test_train_empty_data_dir_exit_1(self, tmp_path):
        assert main([
            "train", "--data", str(tmp_path), "--out", str(tmp_path / "m.ckpt"),
        ]) == 1
