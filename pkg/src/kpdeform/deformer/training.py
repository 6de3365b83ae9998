"""Pairwise-alignment training loop over a normalized shape collection."""
import dataclasses

import numpy as np

from ..cage import icosphere, init_cage, mean_value_coordinates
from ..geom import Rng, normalize_unit_box, sample_surface
from ..net import Adam
from .losses import total_loss
from .model import DEFAULT_ENCODER_WIDTHS, DEFAULT_HIDDEN_DIM, KeypointDeformer


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    n_keypoints: int = 12
    iterations: int = 2000
    n_points: int = 1024
    fps_count: int = None  # resolved to 2 * n_keypoints when left unset
    alpha_kpt: float = 1.0
    alpha_inf: float = 1e-6
    lr: float = 0.001
    batch_size: int = 1
    seed: int = 0
    regularize_target_keypoints: bool = False
    cage_subdivisions: int = 1
    cage_margin: float = 0.05
    cage_step: float = 0.05
    cage_max_iters: int = 100
    encoder_widths: tuple = DEFAULT_ENCODER_WIDTHS
    hidden_dim: int = DEFAULT_HIDDEN_DIM

    def __post_init__(self):
        if self.fps_count is None:
            object.__setattr__(self, "fps_count", 2 * self.n_keypoints)
        if self.n_keypoints < 1 or self.iterations < 0 or self.n_points < 1:
            raise ValueError("invalid training configuration")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")

    def as_dict(self):
        d = dataclasses.asdict(self)
        d["encoder_widths"] = list(self.encoder_widths)
        return d


@dataclasses.dataclass(frozen=True)
class ShapeRecord:
    """Per-shape cache built once before training: normalized mesh, a fixed
    sampled cloud, the shrink-wrapped cage and the cloud's cage weights."""

    mesh: object
    transform: object
    cloud: np.ndarray
    cage: object
    cloud_weights: object


@dataclasses.dataclass
class TrainResult:
    model: KeypointDeformer
    log: list
    shapes: list


class TrainingDiverged(RuntimeError):
    """Raised when the loss goes non-finite; carries the last finite model."""

    def __init__(self, iteration, model, log):
        super().__init__(f"training diverged at iteration {iteration}")
        self.iteration = iteration
        self.model = model
        self.log = log


def prepare_shape(mesh, config, rng):
    normalized, transform = normalize_unit_box(mesh)
    cloud = sample_surface(normalized, config.n_points, rng)
    cage = init_cage(
        cloud,
        icosphere(config.cage_subdivisions),
        margin=config.cage_margin,
        step=config.cage_step,
        max_iters=config.cage_max_iters,
    )
    weights = mean_value_coordinates(cloud, cage)
    return ShapeRecord(normalized, transform, cloud.points, cage, weights)


def prepare_dataset(meshes, config, rng):
    return [prepare_shape(mesh, config, rng) for mesh in meshes]


def _snapshot(params):
    return [p.data.copy() for p in params]


def _restore(params, snapshot):
    for p, data in zip(params, snapshot):
        p.data = data.copy()


def train(meshes, config, callback=None):
    """Jointly learn keypoints and the deformation model by aligning random
    ordered shape pairs. Deterministic given the config seed."""
    if len(meshes) < 2:
        raise ValueError(f"training needs at least 2 shapes, got {len(meshes)}")

    rng = Rng(config.seed)
    shapes = prepare_dataset(meshes, config, rng)
    model = KeypointDeformer.init(
        rng,
        config.n_keypoints,
        template=icosphere(config.cage_subdivisions),
        encoder_widths=config.encoder_widths,
        hidden_dim=config.hidden_dim,
    )
    params = model.parameters()
    optimizer = Adam(params, lr=config.lr)
    log = []
    last_good = _snapshot(params)

    n = len(shapes)
    for iteration in range(config.iterations):
        optimizer.zero_grad()
        sums = {"sim": 0.0, "kpt": 0.0, "inf": 0.0, "total": 0.0}
        try:
            for _ in range(config.batch_size):
                si = int(rng.integers(n))
                ti = int(rng.integers(n - 1))
                if ti >= si:
                    ti += 1
                source, target = shapes[si], shapes[ti]

                p_source = model.predict_keypoints(source.cloud)
                p_target = model.predict_keypoints(target.cloud)
                influence, offset, _ = model.compose_influence(source.cloud, p_source, source.cage)
                deformed = model.deform_shape(
                    source.cloud_weights, source.cage, influence, p_source, p_target
                )
                loss, terms = total_loss(
                    deformed, target.cloud, p_source, source.cloud, offset,
                    config, rng, target_keypoints=p_target,
                )
                (loss * (1.0 / config.batch_size)).backward()
                for key in sums:
                    sums[key] += terms[key] / config.batch_size
            optimizer.step()
        except FloatingPointError:
            _restore(params, last_good)
            raise TrainingDiverged(iteration, model, log)

        last_good = _snapshot(params)
        entry = {"iteration": iteration, **{k: sums[k] for k in ("sim", "kpt", "inf", "total")}}
        log.append(entry)
        if callback is not None:
            callback(iteration, entry)

    return TrainResult(model, log, shapes)
