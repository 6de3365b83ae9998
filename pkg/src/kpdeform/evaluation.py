"""Evaluation protocols for discovered keypoints.

Three views of quality: how well a linear map carries them onto annotated
landmarks (PCK), how consistently they sit next to the same labeled part
(part correlation with a 0.05 neighborhood), and how much keypoint-driven
deformation closes the gap between shape pairs (alignment Chamfer vs. the
no-deformation baseline).
"""
import csv
import dataclasses
import json

import numpy as np

from .geom import chamfer_distance


@dataclasses.dataclass(frozen=True)
class LandmarkSet:
    """Annotated landmarks for one shape; ``present`` masks missing ones."""

    points: np.ndarray  # (L, 3)
    present: np.ndarray  # (L,) bool

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("landmarks must be (L, 3)")
        present = (
            np.ones(pts.shape[0], dtype=bool)
            if self.present is None
            else np.asarray(self.present, dtype=bool)
        )
        if present.shape != (pts.shape[0],):
            raise ValueError("presence mask must have one flag per landmark")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "present", present)


@dataclasses.dataclass(frozen=True)
class LabeledCloud:
    """Point cloud with an integer part label per point."""

    points: np.ndarray  # (N, 3)
    labels: np.ndarray  # (N,) int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
            raise ValueError("labeled cloud must be non-empty (N, 3)")
        if labels.shape != (pts.shape[0],):
            raise ValueError("need exactly one label per point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)


@dataclasses.dataclass(frozen=True)
class KeypointRegressor:
    """Least-squares linear map (with bias) from flattened predicted
    keypoints to flattened landmark positions."""

    matrix: np.ndarray  # (3K + 1, 3L)
    n_keypoints: int
    n_landmarks: int
    rank_deficient: bool = False

    def predict(self, keypoints):
        flat = np.asarray(keypoints, dtype=np.float64).reshape(-1)
        if flat.shape[0] != 3 * self.n_keypoints:
            raise ValueError(f"expected {self.n_keypoints} keypoints")
        x = np.concatenate([flat, [1.0]])
        return (x @ self.matrix).reshape(self.n_landmarks, 3)


def fit_keypoint_regressor(keypoint_sets, landmark_sets):
    """Fit the keypoint→landmark regressor on a training split.

    Landmarks missing on a shape are masked out of the fit; each landmark's
    columns are solved over the shapes where it is present.
    """
    if len(keypoint_sets) != len(landmark_sets):
        raise ValueError("need one landmark set per keypoint set")
    kps = [np.asarray(p, dtype=np.float64) for p in keypoint_sets]
    if not kps:
        raise ValueError("empty training split")
    k = kps[0].shape[0]
    n_in = 3 * k + 1
    if len(kps) < n_in + 1:
        raise ValueError(
            f"regressor needs at least {n_in + 1} training shapes for K={k}, got {len(kps)}"
        )
    l = landmark_sets[0].points.shape[0]

    x = np.stack([np.concatenate([p.reshape(-1), [1.0]]) for p in kps])  # (S, 3K+1)
    matrix = np.zeros((n_in, 3 * l))
    rank_deficient = False
    for j in range(l):
        rows = np.array([ann.present[j] for ann in landmark_sets], dtype=bool)
        if not rows.any():
            rank_deficient = True
            continue
        y = np.stack([landmark_sets[i].points[j] for i in np.flatnonzero(rows)])
        sol, _, rank, _ = np.linalg.lstsq(x[rows], y, rcond=None)
        matrix[:, 3 * j : 3 * j + 3] = sol
        if rank < n_in:
            rank_deficient = True
    return KeypointRegressor(matrix, k, l, rank_deficient)


def pck(predicted, annotated, threshold=0.05, present=None):
    """Fraction of landmarks whose prediction lands within ``threshold``."""
    pred = np.asarray(predicted, dtype=np.float64)
    gt = np.asarray(annotated, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ValueError("prediction/annotation shape mismatch")
    mask = np.ones(pred.shape[0], dtype=bool) if present is None else np.asarray(present, dtype=bool)
    if not mask.any():
        raise ValueError("no annotated landmarks present")
    dist = np.linalg.norm(pred[mask] - gt[mask], axis=1)
    return float(np.mean(dist <= threshold))


def pck_curve(predicted_sets, landmark_sets, thresholds):
    """Mean per-shape PCK at each threshold (mean over shapes of per-shape
    fractions)."""
    out = {}
    for t in thresholds:
        scores = [
            pck(pred, ann.points, threshold=t, present=ann.present)
            for pred, ann in zip(predicted_sets, landmark_sets)
        ]
        out[float(t)] = float(np.mean(scores))
    return out


@dataclasses.dataclass(frozen=True)
class PartCorrelationResult:
    score: float
    per_keypoint: np.ndarray  # (K,)
    labels: tuple
    frequency: np.ndarray  # (K, L): fraction of shapes where keypoint k touches part l


def part_correlation(keypoint_sets, labeled_clouds, radius=0.05):
    """Co-occurrence consistency of keypoints with labeled parts.

    A keypoint is associated with every part that has a labeled point within
    ``radius`` of it. Each keypoint index scores the fraction of shapes on
    which it is associated with its most frequent part; the final score
    averages over keypoints.
    """
    if len(keypoint_sets) != len(labeled_clouds):
        raise ValueError("need one labeled cloud per keypoint set")
    if not keypoint_sets:
        raise ValueError("no shapes to evaluate")
    kps = [np.asarray(p, dtype=np.float64) for p in keypoint_sets]
    k = kps[0].shape[0]
    labels = sorted({int(v) for cloud in labeled_clouds for v in np.unique(cloud.labels)})
    if not labels:
        raise ValueError("no part labels in the collection")
    index = {v: i for i, v in enumerate(labels)}

    counts = np.zeros((k, len(labels)))
    for kp, cloud in zip(kps, labeled_clouds):
        if kp.shape != (k, 3):
            raise ValueError("inconsistent keypoint counts across shapes")
        for value in np.unique(cloud.labels):
            part_points = cloud.points[cloud.labels == value]
            d2 = ((kp[:, None, :] - part_points[None, :, :]) ** 2).sum(axis=2).min(axis=1)
            counts[:, index[int(value)]] += d2 <= radius * radius
    frequency = counts / len(kps)
    per_keypoint = frequency.max(axis=1)
    return PartCorrelationResult(float(per_keypoint.mean()), per_keypoint, tuple(labels), frequency)


@dataclasses.dataclass(frozen=True)
class AlignmentReport:
    mean_deformed: float
    mean_identity: float
    entries: tuple

    @property
    def ratio(self):
        return self.mean_deformed / self.mean_identity if self.mean_identity > 0 else float("inf")


def alignment_benchmark(model, shape_records, pairs=None):
    """Chamfer after deforming each source toward each target's predicted
    keypoints, against the identity (no deformation) baseline.

    ``shape_records`` are prepared held-out shapes; ``pairs`` defaults to all
    ordered pairs with source != target.
    """
    n = len(shape_records)
    if n < 2:
        raise ValueError("alignment benchmark needs at least 2 shapes")
    if pairs is None:
        pairs = [(s, t) for s in range(n) for t in range(n) if s != t]

    keypoints = [model.keypoints_of(rec.cloud) for rec in shape_records]
    influences = []
    for rec, p in zip(shape_records, keypoints):
        influence, _, _ = model.compose_influence(rec.cloud, p, rec.cage)
        influences.append(influence.data)

    entries = []
    for s, t in pairs:
        source, target = shape_records[s], shape_records[t]
        delta = keypoints[t] - keypoints[s]
        deformed_cage = source.cage.vertices + influences[s] @ delta
        deformed = source.cloud_weights.weights @ deformed_cage
        entries.append(
            {
                "source": int(s),
                "target": int(t),
                "deformed": chamfer_distance(deformed, target.cloud),
                "identity": chamfer_distance(source.cloud, target.cloud),
            }
        )
    mean_deformed = float(np.mean([e["deformed"] for e in entries]))
    mean_identity = float(np.mean([e["identity"] for e in entries]))
    return AlignmentReport(mean_deformed, mean_identity, tuple(entries))


def write_report_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_csv(path, rows):
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
