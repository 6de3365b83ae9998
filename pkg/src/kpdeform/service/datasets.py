"""On-disk datasets: materialized synthetic families with landmark and part
annotations, plus the protocol runners that evaluate a model against them.

Layout: <dir>/manifest.json, <dir>/shapes/<id>.obj, <dir>/clouds/<id>.json.
Landmarks and clouds are stored in the mesh's own coordinates; protocols
normalize them alongside the mesh.
"""
import dataclasses
import json
import math
import os

import numpy as np

from ..deformer import TrainConfig, prepare_shape
from ..evaluation import (
    LabeledCloud,
    LandmarkSet,
    alignment_benchmark,
    fit_keypoint_regressor,
    part_correlation,
    pck,
    pck_curve,
)
from ..geom import (
    LANDMARK_NAMES,
    PART_NAMES,
    Rng,
    generate_synthetic_family,
    load_obj,
    sample_surface,
    save_obj,
)
from .pipeline import prepare_mesh
from .wire import round9

DEFAULT_THRESHOLDS = (0.01, 0.02, 0.03, 0.04, 0.05, 0.075, 0.1)


@dataclasses.dataclass(frozen=True)
class DatasetRecord:
    shape_id: str
    mesh: object
    landmarks: np.ndarray
    present: np.ndarray
    cloud_points: np.ndarray
    part_labels: np.ndarray
    split: str


@dataclasses.dataclass(frozen=True)
class Dataset:
    family: str
    landmark_names: tuple
    part_names: tuple
    records: tuple

    def split(self, name):
        return [r for r in self.records if r.split == name]


def write_synthetic_dataset(family, count, seed, out_dir, n_cloud_points=256, test_fraction=0.2):
    """Generate a synthetic family and write it out with annotations; the
    trailing ``test_fraction`` of instances form the held-out split."""
    rng = Rng(seed)
    shapes = generate_synthetic_family(family, count, rng)
    landmark_names = LANDMARK_NAMES[family]
    part_names = PART_NAMES[family]
    n_test = int(math.ceil(count * test_fraction)) if count > 1 else 0
    n_train = count - n_test

    os.makedirs(os.path.join(out_dir, "shapes"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "clouds"), exist_ok=True)
    manifest_shapes = []
    for i, shape in enumerate(shapes):
        shape_id = f"shape_{i:04d}"
        mesh_rel = os.path.join("shapes", f"{shape_id}.obj")
        cloud_rel = os.path.join("clouds", f"{shape_id}.json")
        save_obj(shape.mesh, os.path.join(out_dir, mesh_rel))

        cloud, face_idx = sample_surface(shape.mesh, n_cloud_points, rng, return_face_index=True)
        labels = shape.face_parts[face_idx]
        with open(os.path.join(out_dir, cloud_rel), "w", encoding="utf-8") as fh:
            json.dump(
                {"points": round9(cloud.points), "part_labels": [int(v) for v in labels]},
                fh,
            )
            fh.write("\n")

        landmarks = shape.landmark_array(landmark_names)
        manifest_shapes.append(
            {
                "id": shape_id,
                "mesh": mesh_rel,
                "cloud": cloud_rel,
                "split": "train" if i < n_train else "test",
                "landmarks": round9(landmarks),
                "landmark_present": [True] * len(landmark_names),
                "params": {k: float(v) for k, v in shape.params.items()},
            }
        )

    manifest = {
        "format": "kpdeform-dataset",
        "version": 1,
        "family": family,
        "count": count,
        "seed": seed,
        "n_cloud_points": n_cloud_points,
        "landmark_names": list(landmark_names),
        "part_names": list(part_names),
        "shapes": manifest_shapes,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def load_dataset(path):
    """Read a dataset directory (or its manifest.json path) back into memory."""
    path = os.fspath(path)
    manifest_path = path if path.endswith(".json") else os.path.join(path, "manifest.json")
    base = os.path.dirname(manifest_path)
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != "kpdeform-dataset":
        raise ValueError(f"not a dataset manifest: {manifest_path}")

    records = []
    for entry in manifest["shapes"]:
        mesh = load_obj(os.path.join(base, entry["mesh"]))
        with open(os.path.join(base, entry["cloud"]), "r", encoding="utf-8") as fh:
            cloud = json.load(fh)
        records.append(
            DatasetRecord(
                shape_id=entry["id"],
                mesh=mesh,
                landmarks=np.asarray(entry["landmarks"], dtype=np.float64),
                present=np.asarray(entry["landmark_present"], dtype=bool),
                cloud_points=np.asarray(cloud["points"], dtype=np.float64),
                part_labels=np.asarray(cloud["part_labels"], dtype=np.int64),
                split=entry["split"],
            )
        )
    return Dataset(
        family=manifest["family"],
        landmark_names=tuple(manifest["landmark_names"]),
        part_names=tuple(manifest["part_names"]),
        records=tuple(records),
    )


def _predictions(model, records, settings):
    """Per-record (normalized keypoints, normalized landmark set)."""
    out = []
    for record in records:
        prepared = prepare_mesh(model, record.mesh, settings, with_cage=False)
        landmarks = prepared.transform.apply(record.landmarks)
        out.append((prepared, prepared.keypoints, LandmarkSet(landmarks, record.present)))
    return out


def run_pck_protocol(model, dataset, settings, thresholds=DEFAULT_THRESHOLDS, headline=0.05):
    train_split, test_split = dataset.split("train"), dataset.split("test")
    if not train_split or not test_split:
        raise ValueError("pck protocol needs both train and test splits")
    train_pred = _predictions(model, train_split, settings)
    test_pred = _predictions(model, test_split, settings)

    regressor = fit_keypoint_regressor(
        [kp for _, kp, _ in train_pred], [ann for _, _, ann in train_pred]
    )
    predicted = [regressor.predict(kp) for _, kp, _ in test_pred]
    annotations = [ann for _, _, ann in test_pred]
    curve = pck_curve(predicted, annotations, thresholds)
    headline_score = float(
        np.mean([pck(p, a.points, headline, a.present) for p, a in zip(predicted, annotations)])
    )
    return {
        "protocol": "pck",
        "threshold": headline,
        "pck": headline_score,
        "curve": {f"{t:g}": v for t, v in curve.items()},
        "n_train": len(train_split),
        "n_test": len(test_split),
        "regressor_rank_deficient": regressor.rank_deficient,
    }


def run_parts_protocol(model, dataset, settings, radius=0.05):
    test_split = dataset.split("test")
    if not test_split:
        raise ValueError("parts protocol needs a test split")
    keypoint_sets, clouds = [], []
    for record in test_split:
        prepared = prepare_mesh(model, record.mesh, settings, with_cage=False)
        keypoint_sets.append(prepared.keypoints)
        clouds.append(
            LabeledCloud(prepared.transform.apply(record.cloud_points), record.part_labels)
        )
    result = part_correlation(keypoint_sets, clouds, radius=radius)
    label_names = {
        i: (dataset.part_names[v] if v < len(dataset.part_names) else str(v))
        for i, v in enumerate(result.labels)
    }
    return {
        "protocol": "parts",
        "radius": radius,
        "score": result.score,
        "per_keypoint": [float(v) for v in result.per_keypoint],
        "labels": [label_names[i] for i in range(len(result.labels))],
        "n_test": len(test_split),
    }


def run_align_protocol(model, dataset, settings, seed=0, max_pairs=None):
    test_split = dataset.split("test")
    if len(test_split) < 2:
        raise ValueError("alignment protocol needs at least 2 test shapes")
    config = TrainConfig(
        n_keypoints=model.n_keypoints,
        n_points=settings.n_points,
        cage_margin=settings.cage_margin,
        cage_step=settings.cage_step,
        cage_max_iters=settings.cage_max_iters,
    )
    rng = Rng(seed)
    records = [prepare_shape(r.mesh, config, rng) for r in test_split]
    pairs = None
    if max_pairs is not None:
        all_pairs = [(s, t) for s in range(len(records)) for t in range(len(records)) if s != t]
        take = min(max_pairs, len(all_pairs))
        picks = rng.permutation(len(all_pairs))[:take]
        pairs = [all_pairs[i] for i in picks]
    report = alignment_benchmark(model, records, pairs=pairs)
    return {
        "protocol": "align",
        "mean_deformed_chamfer": report.mean_deformed,
        "mean_identity_chamfer": report.mean_identity,
        "ratio": report.ratio,
        "n_test": len(test_split),
        "n_pairs": len(report.entries),
        "pairs": [dict(e) for e in report.entries],
    }
