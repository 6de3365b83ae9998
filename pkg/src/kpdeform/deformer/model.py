"""Keypoint-driven cage deformation model.

Two point-cloud networks share nothing but architecture: one predicts K
ordered keypoints, the other a per-shape offset to a learned canonical
influence matrix. Keypoint displacements move cage vertices through the
(masked) influence matrix, and the cage carries the shape with it.
"""
import numpy as np

from ..cage import icosphere
from ..geom import as_points
from ..net import MlpHead, PointNetEncoder, Tensor, constant, parameter

KEYPOINT_BOUND = 0.6
DEFAULT_ENCODER_WIDTHS = (3, 64, 128, 256)
DEFAULT_HIDDEN_DIM = 128


class KeypointDeformer:
    """Keypoint predictor + influence predictor + canonical influence matrix.

    ``K`` keypoints, cage template with ``C`` vertices. The influence head
    and the canonical matrix start at zero, so a fresh model deforms nothing:
    training can shape the keypoints before deformations grow.
    """

    def __init__(self, n_keypoints, template, kpt_encoder, kpt_head, inf_encoder, inf_head, canonical):
        if template.n_vertices < n_keypoints:
            raise ValueError(
                f"cage template has {template.n_vertices} vertices, fewer than "
                f"{n_keypoints} keypoints; the per-keypoint mask would be empty"
            )
        self.n_keypoints = n_keypoints
        self.template = template
        self.kpt_encoder = kpt_encoder
        self.kpt_head = kpt_head
        self.inf_encoder = inf_encoder
        self.inf_head = inf_head
        self.canonical = canonical  # W_C, (C, K)

    @classmethod
    def init(cls, rng, n_keypoints, template=None, encoder_widths=DEFAULT_ENCODER_WIDTHS,
             hidden_dim=DEFAULT_HIDDEN_DIM):
        if template is None:
            template = icosphere(1)
        c = template.n_vertices
        feat = encoder_widths[-1]
        kpt_encoder = PointNetEncoder.init(rng, encoder_widths, name="kpt.encoder")
        kpt_head = MlpHead.init(rng, feat, 3 * n_keypoints, hidden_dim,
                                bound=KEYPOINT_BOUND, name="kpt.head")
        inf_encoder = PointNetEncoder.init(rng, encoder_widths, name="inf.encoder")
        inf_head = MlpHead.init(rng, feat, c * n_keypoints, hidden_dim,
                                name="inf.head", zero_out=True)
        canonical = parameter(np.zeros((c, n_keypoints)), name="canonical")
        return cls(n_keypoints, template, kpt_encoder, kpt_head, inf_encoder, inf_head, canonical)

    @property
    def n_cage_vertices(self):
        return self.template.n_vertices

    @property
    def mask_size(self):
        """Nonzeros kept per keypoint column of the influence matrix."""
        m = self.n_cage_vertices // self.n_keypoints
        if m < 1:
            raise ValueError("more keypoints than cage vertices")
        return m

    def parameters(self):
        return (
            self.kpt_encoder.parameters()
            + self.kpt_head.parameters()
            + self.inf_encoder.parameters()
            + self.inf_head.parameters()
            + [self.canonical]
        )

    # ------------------------------------------------------------------
    # forward pieces
    # ------------------------------------------------------------------
    def predict_keypoints(self, cloud):
        """Ordered (K, 3) keypoint tensor for one cloud; index carries
        identity across shapes. Invariant to permutations of the cloud."""
        feature = self.kpt_encoder(cloud)
        return self.kpt_head(feature).reshape((self.n_keypoints, 3))

    def influence_mask(self, keypoints, cage):
        """Boolean (C, K) mask keeping, per keypoint, its M nearest cage
        vertices. Computed from values only — constant under backprop."""
        kp = keypoints.data if isinstance(keypoints, Tensor) else np.asarray(keypoints, dtype=np.float64)
        cage_v = cage.vertices
        m = self.mask_size
        d2 = ((cage_v[:, None, :] - kp[None, :, :]) ** 2).sum(axis=2)  # (C, K)
        mask = np.zeros(d2.shape, dtype=bool)
        order = np.argsort(d2, axis=0, kind="stable")
        for k in range(self.n_keypoints):
            mask[order[:m, k], k] = True
        return mask

    def compose_influence(self, cloud, keypoints, cage):
        """Effective influence matrix W = (W_C + W_I(x)) ⊙ mask.

        Returns (effective W tensor, raw predicted offset W_I tensor,
        boolean mask). The mask is recomputed every forward pass from the
        predicted keypoints and held fixed during backward, so gradients of
        masked-out entries are exactly zero.
        """
        c, k = self.n_cage_vertices, self.n_keypoints
        offset = self.inf_head(self.inf_encoder(cloud)).reshape((c, k))
        mask = self.influence_mask(keypoints, cage)
        effective = (self.canonical + offset) * constant(mask.astype(np.float64))
        return effective, offset, mask

    def skin_cage(self, cage, influence, keypoints, target_keypoints):
        """Deformed cage vertices: c* = c_V + W (p' − p). Linear in all of
        W, p and p'."""
        delta = _as_tensor(target_keypoints) - _as_tensor(keypoints)
        return constant(cage.vertices) + influence @ delta

    def deform_shape(self, weights, cage, influence, keypoints, target_keypoints):
        """Deform the points behind ``weights`` (their mean-value coordinates
        w.r.t. ``cage``) by skinning the cage with keypoint displacements."""
        deformed_cage = self.skin_cage(cage, influence, keypoints, target_keypoints)
        w = weights.weights if hasattr(weights, "weights") else np.asarray(weights, dtype=np.float64)
        if w.shape[1] != cage.n_vertices:
            raise ValueError("cage weights do not match this cage topology")
        return constant(w) @ deformed_cage

    # ------------------------------------------------------------------
    # value-only inference
    # ------------------------------------------------------------------
    def keypoints_of(self, cloud):
        """(K, 3) array of predicted keypoints (no gradient tape)."""
        return self.predict_keypoints(as_points(cloud)).data.copy()

    def deform_points(self, weights, cage, cloud, target_keypoints, keypoints=None):
        """Array-in/array-out deformation of the points behind ``weights``
        (mesh vertices or a sampled cloud; their mean-value coordinates are
        precomputed). ``cloud`` feeds the networks; ``keypoints`` defaults to
        the model's own prediction on it.
        """
        p = self.predict_keypoints(as_points(cloud)) if keypoints is None else _as_tensor(keypoints)
        influence, _, _ = self.compose_influence(as_points(cloud), p, cage)
        out = self.deform_shape(weights, cage, influence, p, _as_tensor(target_keypoints))
        return out.data.copy()


def _as_tensor(value):
    return value if isinstance(value, Tensor) else constant(np.asarray(value, dtype=np.float64))
