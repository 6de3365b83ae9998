from .pipeline import (
    InferenceSettings,
    PreparedShape,
    content_rng,
    deform_to_keypoints,
    keypoints_to_normalized,
    keypoints_to_original,
    mesh_content_hash,
    prepare_mesh,
)
from .sessions import SessionError, SessionStore, builtin_mesh
from .api import create_app
from .datasets import (
    Dataset,
    DatasetRecord,
    load_dataset,
    run_align_protocol,
    run_parts_protocol,
    run_pck_protocol,
    write_synthetic_dataset,
)
from .wire import mesh_payload, parse_points, round9

__all__ = [
    "InferenceSettings",
    "PreparedShape",
    "content_rng",
    "deform_to_keypoints",
    "keypoints_to_normalized",
    "keypoints_to_original",
    "mesh_content_hash",
    "prepare_mesh",
    "SessionError",
    "SessionStore",
    "builtin_mesh",
    "create_app",
    "Dataset",
    "DatasetRecord",
    "load_dataset",
    "run_align_protocol",
    "run_parts_protocol",
    "run_pck_protocol",
    "write_synthetic_dataset",
    "mesh_payload",
    "parse_points",
    "round9",
]
