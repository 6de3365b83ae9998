"""In-memory editing sessions for the HTTP service.

Each session caches one prepared shape. Deformation is always computed
from the session's original mesh and its originally predicted keypoints, so
an edit payload fully determines the result no matter how many edits came
before it — iterative dragging stays replayable and drift-free.
"""
import hashlib
import threading
import uuid

import numpy as np

from ..geom import FAMILIES, Rng, generate_synthetic_family
from ..prior import sample_prior, synchronize
from .pipeline import deform_to_keypoints, keypoints_to_original, prepare_mesh

BUILTIN_SEED = 2024


class SessionError(Exception):
    """Service-level failure with an HTTP-ish status code."""

    def __init__(self, status, message):
        super().__init__(message)
        self.status = status
        self.message = message


def builtin_mesh(name):
    if name not in FAMILIES:
        raise SessionError(422, f"unknown builtin shape {name!r}; choose from {sorted(FAMILIES)}")
    return generate_synthetic_family(name, 1, Rng(BUILTIN_SEED))[0].mesh


def _integrity_hash(prepared):
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(prepared.normalized.vertices, dtype="<f8").tobytes())
    digest.update(np.ascontiguousarray(prepared.cage.vertices, dtype="<f8").tobytes())
    digest.update(np.ascontiguousarray(prepared.mesh_weights.weights, dtype="<f8").tobytes())
    return digest.hexdigest()


class Session:
    def __init__(self, session_id, prepared):
        self.session_id = session_id
        self.prepared = prepared
        self.lock = threading.Lock()
        self.integrity = _integrity_hash(prepared)
        self.keypoints_original = keypoints_to_original(prepared, prepared.keypoints)
        self.current_keypoints = self.keypoints_original.copy()
        self.deformed_mesh = prepared.original
        self.synchronized = False

    def check_integrity(self):
        if _integrity_hash(self.prepared) != self.integrity:
            raise SessionError(500, "session cache corrupted: weights no longer match the mesh")


class SessionStore:
    """Session table guarding a shared read-only model/prior pair."""

    def __init__(self, model, settings, prior=None):
        self.model = model
        self.settings = settings
        self.prior = prior
        self._sessions = {}
        self._lock = threading.Lock()

    @property
    def n_keypoints(self):
        return self.model.n_keypoints

    def create(self, mesh):
        prepared = prepare_mesh(self.model, mesh, self.settings, with_cage=True)
        session = Session(uuid.uuid4().hex, prepared)
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id):
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionError(404, f"unknown session {session_id!r}")
        return session

    def drop(self, session_id):
        with self._lock:
            self._sessions.pop(session_id, None)

    def _require_prior(self):
        if self.prior is None:
            raise SessionError(409, "no prior is loaded on this server")
        if self.prior.n_keypoints != self.model.n_keypoints:
            raise SessionError(
                409,
                f"prior has {self.prior.n_keypoints} keypoints but the model predicts "
                f"{self.model.n_keypoints}",
            )
        return self.prior

    def deform(self, session_id, keypoints=None, edits=None, prior_coefficients=None, sync=False):
        """Deform the session's original mesh toward a target keypoint set
        given as exactly one of: a full set, sparse edits (optionally
        synchronized through the prior), or prior coefficients. All
        coordinates are in the uploaded mesh's own frame.
        """
        session = self.get(session_id)
        modes = [keypoints is not None, edits is not None, prior_coefficients is not None]
        if sum(modes) != 1:
            raise SessionError(
                422, "provide exactly one of 'keypoints', 'edits' or 'prior_coefficients'"
            )
        if sync and edits is None:
            raise SessionError(422, "'sync' applies only to sparse 'edits'")

        with session.lock:
            session.check_integrity()
            prepared = session.prepared
            synchronized = False

            if keypoints is not None:
                kp = np.asarray(keypoints, dtype=np.float64)
                if kp.shape != (self.n_keypoints, 3):
                    raise SessionError(
                        422, f"expected ({self.n_keypoints}, 3) keypoints, got {kp.shape}"
                    )
                if not np.all(np.isfinite(kp)):
                    raise SessionError(422, "keypoints contain non-finite coordinates")
                target_norm = prepared.transform.apply(kp)
            elif prior_coefficients is not None:
                prior = self._require_prior()
                coeffs = np.asarray(prior_coefficients, dtype=np.float64).reshape(-1)
                if coeffs.shape[0] != prior.n_basis:
                    raise SessionError(
                        422, f"expected {prior.n_basis} prior coefficients, got {coeffs.shape[0]}"
                    )
                if not np.all(np.isfinite(coeffs)):
                    raise SessionError(422, "prior coefficients must be finite")
                target_norm = sample_prior(prior, coeffs)
            else:
                norm_edits = []
                for edit in edits:
                    index, position = edit
                    if not 0 <= int(index) < self.n_keypoints:
                        raise SessionError(422, f"keypoint index {index} out of range")
                    position = np.asarray(position, dtype=np.float64).reshape(3)
                    if not np.all(np.isfinite(position)):
                        raise SessionError(422, "edited positions must be finite")
                    norm_edits.append((int(index), prepared.transform.apply(position)))
                if sync:
                    prior = self._require_prior()
                    target_norm = synchronize(prior, prepared.keypoints, norm_edits)
                    synchronized = True
                else:
                    target_norm = prepared.keypoints.copy()
                    for index, position in norm_edits:
                        target_norm[index] = position

            try:
                mesh = deform_to_keypoints(self.model, prepared, target_norm)
            except ValueError as exc:
                raise SessionError(422, str(exc))
            session.deformed_mesh = mesh
            session.current_keypoints = keypoints_to_original(prepared, target_norm)
            session.synchronized = synchronized
            return session

    def reset(self, session_id):
        session = self.get(session_id)
        with session.lock:
            session.deformed_mesh = session.prepared.original
            session.current_keypoints = session.keypoints_original.copy()
            session.synchronized = False
        return session
