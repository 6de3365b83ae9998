"""Checkpoint files: one JSON header line, then all parameters as a raw
little-endian float64 blob in declaration order, checksummed."""
import hashlib
import json

import numpy as np

from ..cage import icosphere
from ..geom import Rng
from .model import DEFAULT_HIDDEN_DIM, KeypointDeformer

FORMAT_NAME = "kpdeform-checkpoint"
FORMAT_VERSION = 1


def _template_spec(template):
    for subdivisions in range(4):
        probe = icosphere(subdivisions)
        if (
            probe.n_vertices == template.n_vertices
            and probe.n_faces == template.n_faces
            and np.array_equal(probe.faces, template.faces)
            and np.allclose(probe.vertices, template.vertices, atol=1e-12)
        ):
            return {"kind": "icosphere", "subdivisions": subdivisions}
    return {
        "kind": "explicit",
        "vertices": [[float(x) for x in v] for v in template.vertices],
        "faces": [[int(i) for i in f] for f in template.faces],
    }


def _template_from_spec(spec):
    if spec["kind"] == "icosphere":
        return icosphere(int(spec["subdivisions"]))
    from ..cage import Cage

    return Cage(
        np.asarray(spec["vertices"], dtype=np.float64),
        np.asarray(spec["faces"], dtype=np.int64),
    )


def save_checkpoint(model, path, category="", hyperparameters=None, extra=None):
    params = model.parameters()
    blob = b"".join(np.ascontiguousarray(p.data, dtype="<f8").tobytes() for p in params)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n_keypoints": model.n_keypoints,
        "n_cage_vertices": model.n_cage_vertices,
        "encoder_widths": list(model.kpt_encoder.widths),
        "hidden_dim": model.kpt_head.hidden.weight.shape[1],
        "cage_template": _template_spec(model.template),
        "category": category,
        "hyperparameters": hyperparameters or {},
        "params": [{"name": p.name, "shape": list(p.data.shape)} for p in params],
        "blob_sha256": hashlib.sha256(blob).hexdigest(),
    }
    if extra:
        header["extra"] = extra
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(blob)
    return header["blob_sha256"]


def load_checkpoint(path):
    """Rebuild the model recorded at ``path``; returns (model, header)."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"not a checkpoint file: {path}") from exc
    if header.get("format") != FORMAT_NAME:
        raise ValueError(f"not a checkpoint file: {path}")
    if header.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {header.get('version')}")
    if hashlib.sha256(blob).hexdigest() != header["blob_sha256"]:
        raise ValueError("checkpoint blob does not match its checksum")

    model = KeypointDeformer.init(
        Rng(0),
        header["n_keypoints"],
        template=_template_from_spec(header["cage_template"]),
        encoder_widths=tuple(header["encoder_widths"]),
        hidden_dim=int(header.get("hidden_dim", DEFAULT_HIDDEN_DIM)),
    )
    params = model.parameters()
    if len(params) != len(header["params"]):
        raise ValueError("checkpoint parameter list does not match the architecture")
    offset = 0
    for p, rec in zip(params, header["params"]):
        shape = tuple(rec["shape"])
        if tuple(p.data.shape) != shape:
            raise ValueError(f"parameter {rec['name']!r} has shape {shape}, expected {p.data.shape}")
        n = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(blob, dtype="<f8", count=n, offset=offset)
        p.data = values.reshape(shape).astype(np.float64).copy()
        offset += 8 * n
    if offset != len(blob):
        raise ValueError("checkpoint blob length does not match the parameter shapes")
    return model, header


def checkpoint_checksum(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
