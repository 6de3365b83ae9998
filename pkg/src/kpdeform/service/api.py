"""HTTP editing API over a loaded checkpoint (and optional prior).

Sessions are in-memory only; every deform starts from the session's original
mesh and originally predicted keypoints, so requests are replayable and
order-independent.
"""
import os

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .. import _kernels
from ..geom import ObjParseError, format_obj, parse_obj
from ..prior import sample_prior
from .sessions import SessionError, SessionStore, builtin_mesh
from .wire import mesh_payload, parse_points, round9

DEFAULT_MAX_UPLOAD = 2 * 1024 * 1024


def _session_view(store, session):
    prepared = session.prepared
    cage_vertices = prepared.transform.inverse().apply(prepared.cage.vertices)
    return {
        "session_id": session.session_id,
        "n_keypoints": store.n_keypoints,
        "mesh": mesh_payload(session.deformed_mesh),
        "keypoints": round9(session.current_keypoints),
        "original_keypoints": round9(session.keypoints_original),
        "cage": {
            "vertices": round9(cage_vertices),
            "faces": [[int(i) for i in f] for f in prepared.cage.faces],
        },
        "synchronized": bool(session.synchronized),
    }


def create_app(model, settings, prior=None, max_upload_bytes=DEFAULT_MAX_UPLOAD, ui_dir=None):
    app = FastAPI(title="keypoint cage deformation service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(model, settings, prior=prior)
    app.state.store = store

    @app.exception_handler(SessionError)
    async def _session_error(_request: Request, exc: SessionError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.message})

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "n_keypoints": store.n_keypoints,
            "kernel_backend": _kernels.BACKEND,
            "prior_loaded": store.prior is not None,
        }

    @app.post("/sessions")
    async def create_session(payload: dict):
        obj_text = payload.get("obj")
        builtin = payload.get("builtin")
        if (obj_text is None) == (builtin is None):
            raise SessionError(422, "provide exactly one of 'obj' or 'builtin'")
        if obj_text is not None:
            if not isinstance(obj_text, str):
                raise SessionError(422, "'obj' must be OBJ file text")
            if len(obj_text.encode("utf-8")) > max_upload_bytes:
                raise SessionError(413, f"mesh upload exceeds {max_upload_bytes} bytes")
            try:
                mesh = parse_obj(obj_text, source="upload")
            except (ObjParseError, ValueError) as exc:
                raise SessionError(422, f"could not parse OBJ: {exc}")
        else:
            mesh = builtin_mesh(builtin)
        try:
            session = store.create(mesh)
        except (ValueError, ArithmeticError) as exc:
            raise SessionError(422, f"could not prepare mesh: {exc}")
        return _session_view(store, session)

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _session_view(store, store.get(session_id))

    @app.post("/sessions/{session_id}/deform")
    async def deform(session_id: str, payload: dict):
        store.get(session_id)  # unknown sessions 404 before payload validation
        keypoints = payload.get("keypoints")
        edits = payload.get("edits")
        coefficients = payload.get("prior_coefficients")
        sync = bool(payload.get("sync", False))
        if keypoints is not None:
            try:
                keypoints = parse_points(keypoints, expected=store.n_keypoints)
            except ValueError as exc:
                raise SessionError(422, str(exc))
        parsed_edits = None
        if edits is not None:
            if not isinstance(edits, list) or not edits:
                raise SessionError(422, "'edits' must be a non-empty list")
            parsed_edits = []
            for item in edits:
                if not isinstance(item, dict) or "index" not in item or "position" not in item:
                    raise SessionError(422, "each edit needs 'index' and 'position'")
                try:
                    parsed_edits.append((int(item["index"]), item["position"]))
                except (TypeError, ValueError):
                    raise SessionError(422, "edit 'index' must be an integer")
        session = store.deform(
            session_id,
            keypoints=keypoints,
            edits=parsed_edits,
            prior_coefficients=coefficients,
            sync=sync,
        )
        return {
            "session_id": session.session_id,
            "vertices": round9(session.deformed_mesh.vertices),
            "keypoints": round9(session.current_keypoints),
            "synchronized": bool(session.synchronized),
        }

    @app.post("/sessions/{session_id}/reset")
    async def reset(session_id: str):
        return _session_view(store, store.reset(session_id))

    @app.get("/sessions/{session_id}/export")
    async def export(session_id: str):
        session = store.get(session_id)
        with session.lock:
            text = format_obj(session.deformed_mesh)
        return PlainTextResponse(
            text,
            media_type="text/plain",
            headers={"Content-Disposition": 'attachment; filename="deformed.obj"'},
        )

    @app.get("/prior")
    async def prior_info():
        if store.prior is None:
            return {"available": False}
        return {
            "available": True,
            "n_keypoints": store.prior.n_keypoints,
            "n_basis": store.prior.n_basis,
            "component_std": round9(store.prior.component_std),
            "rank_deficient": bool(store.prior.rank_deficient),
        }

    @app.post("/prior/sample")
    async def prior_sample(payload: dict):
        prior = store._require_prior()
        coefficients = payload.get("coefficients")
        if coefficients is None:
            raise SessionError(422, "provide 'coefficients'")
        coeffs = np.asarray(coefficients, dtype=np.float64).reshape(-1)
        if coeffs.shape[0] != prior.n_basis or not np.all(np.isfinite(coeffs)):
            raise SessionError(422, f"expected {prior.n_basis} finite coefficients")
        return {"keypoints": round9(sample_prior(prior, coeffs))}

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
