"""Categorical keypoint prior: a PCA subspace over flattened keypoint
coordinates, used to synchronize unedited keypoints with a user's edit and
to sample new keypoint configurations."""
import dataclasses
import json

import numpy as np

SYNC_RIDGE = 1e-4


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True)
class PCAPrior:
    """Mean 3K-vector, ``n_basis`` orthonormal basis rows (zero rows pad a
    rank-deficient fit) and per-basis spread of the fitted collection."""

    mean: np.ndarray
    basis: np.ndarray
    singular_values: np.ndarray
    n_keypoints: int
    rank_deficient: bool = False
    model_checksum: str = ""
    n_fitted: int = 2

    def __post_init__(self):
        object.__setattr__(self, "mean", _freeze(self.mean))
        object.__setattr__(self, "basis", _freeze(self.basis))
        object.__setattr__(self, "singular_values", _freeze(self.singular_values))
        if self.mean.shape != (3 * self.n_keypoints,):
            raise ValueError("prior mean length must be 3 * n_keypoints")
        if self.basis.ndim != 2 or self.basis.shape[1] != self.mean.shape[0]:
            raise ValueError("prior basis must be (n_basis, 3 * n_keypoints)")

    @property
    def n_basis(self):
        return self.basis.shape[0]

    @property
    def component_std(self):
        """Per-basis standard deviation of the fitted keypoint collection
        (natural unit for coefficient sweeps and UI slider ranges)."""
        return self.singular_values / np.sqrt(max(self.n_fitted - 1, 1))


def fit_pca(keypoint_sets, n_basis=8, model_checksum=""):
    """Mean-centered PCA of stacked (K,3) keypoint sets via SVD, basis rows
    ordered by decreasing singular value. Basis signs are fixed by making
    each row's largest-magnitude entry positive, so refits are reproducible.
    """
    sets = [np.asarray(p, dtype=np.float64) for p in keypoint_sets]
    if not sets:
        raise ValueError("no keypoint sets to fit")
    k = sets[0].shape[0]
    for p in sets:
        if p.shape != (k, 3):
            raise ValueError("all keypoint sets must share the same (K, 3) shape")
    if len(sets) < n_basis + 1:
        raise ValueError(f"need at least {n_basis + 1} keypoint sets, got {len(sets)}")

    stacked = np.stack([p.reshape(-1) for p in sets])  # (S, 3K)
    mean = stacked.mean(axis=0)
    centered = stacked - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)

    dim = stacked.shape[1]
    basis = np.zeros((n_basis, dim))
    singular = np.zeros(n_basis)
    tol = max(s[0], 1.0) * max(stacked.shape) * np.finfo(np.float64).eps if s.size else 0.0
    rank = int(np.sum(s > tol))
    usable = min(n_basis, rank, vt.shape[0])
    basis[:usable] = vt[:usable]
    singular[:usable] = s[:usable]
    for i in range(usable):
        j = int(np.argmax(np.abs(basis[i])))
        if basis[i, j] < 0:
            basis[i] = -basis[i]
    return PCAPrior(
        mean=mean,
        basis=basis,
        singular_values=singular,
        n_keypoints=k,
        rank_deficient=usable < n_basis,
        model_checksum=model_checksum,
        n_fitted=len(sets),
    )


def project(prior, keypoints):
    """Basis coefficients of a keypoint set (zero along padded directions)."""
    flat = np.asarray(keypoints, dtype=np.float64).reshape(-1)
    return prior.basis @ (flat - prior.mean)


def reconstruct(prior, coefficients):
    return sample_prior(prior, coefficients)


def sample_prior(prior, coefficients):
    """Keypoint set at the given basis coefficients: mean + z^T basis."""
    z = np.asarray(coefficients, dtype=np.float64).reshape(-1)
    if z.shape[0] != prior.n_basis:
        raise ValueError(f"expected {prior.n_basis} coefficients, got {z.shape[0]}")
    flat = prior.mean + z @ prior.basis
    return flat.reshape(prior.n_keypoints, 3)


def synchronize(prior, keypoints, edits):
    """Move unedited keypoints consistently with the edited ones.

    Solves ridge-regularized least squares for the coefficients that best
    reconstruct the edited positions, reconstructs the full set from them,
    then overwrites the edited keypoints with their requested positions
    exactly — a drag is always honored verbatim.
    """
    p = np.asarray(keypoints, dtype=np.float64)
    if p.shape != (prior.n_keypoints, 3):
        raise ValueError(f"expected ({prior.n_keypoints}, 3) keypoints, got {p.shape}")
    edits = list(edits)
    if not edits:
        raise ValueError("synchronize needs at least one edit")
    for index, _ in edits:
        if not 0 <= index < prior.n_keypoints:
            raise IndexError(f"keypoint index {index} out of range")

    cols, targets = [], []
    for index, position in edits:
        position = np.asarray(position, dtype=np.float64).reshape(3)
        cols.extend(range(3 * index, 3 * index + 3))
        targets.extend(position)
    cols = np.asarray(cols)
    targets = np.asarray(targets)

    a = prior.basis[:, cols].T  # (3E, n_basis)
    rhs = targets - prior.mean[cols]
    gram = a.T @ a + SYNC_RIDGE * np.eye(prior.n_basis)
    z = np.linalg.solve(gram, a.T @ rhs)

    out = sample_prior(prior, z)
    for index, position in edits:
        out[index] = np.asarray(position, dtype=np.float64).reshape(3)
    return out


def save_prior(prior, path):
    payload = {
        "format": "kpdeform-prior",
        "version": 1,
        "n_keypoints": prior.n_keypoints,
        "n_basis": prior.n_basis,
        "n_fitted": prior.n_fitted,
        "mean": prior.mean.tolist(),
        "basis": prior.basis.tolist(),
        "singular_values": prior.singular_values.tolist(),
        "component_std": prior.component_std.tolist(),
        "rank_deficient": prior.rank_deficient,
        "model_checksum": prior.model_checksum,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_prior(path):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != "kpdeform-prior":
        raise ValueError(f"not a prior file: {path}")
    return PCAPrior(
        mean=np.asarray(payload["mean"], dtype=np.float64),
        basis=np.asarray(payload["basis"], dtype=np.float64),
        singular_values=np.asarray(payload["singular_values"], dtype=np.float64),
        n_keypoints=int(payload["n_keypoints"]),
        rank_deficient=bool(payload["rank_deficient"]),
        model_checksum=payload.get("model_checksum", ""),
        n_fitted=int(payload.get("n_fitted", 2)),
    )
