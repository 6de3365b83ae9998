"""Command-line front end: train, inspect keypoints, deform, evaluate,
amplify along the prior, generate synthetic datasets, and serve the HTTP API."""
import argparse
import glob
import json
import os
import sys

import numpy as np

from ..deformer import (
    TrainConfig,
    TrainingDiverged,
    load_checkpoint,
    save_checkpoint,
    train,
)
from ..evaluation import write_report_csv, write_report_json
from ..geom import FAMILIES, Rng, generate_synthetic_family, load_obj, save_obj
from ..prior import fit_pca, load_prior, sample_prior, save_prior
from .api import create_app
from .datasets import (
    load_dataset,
    run_align_protocol,
    run_parts_protocol,
    run_pck_protocol,
    write_synthetic_dataset,
)
from .pipeline import InferenceSettings, deform_to_keypoints, keypoints_to_original, prepare_mesh
from .wire import parse_points, round9

DEFAULT_PORT_ENV = "KPDEFORM_PORT"


class CliError(Exception):
    """User-input problem: reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; this tool reserves 2 for runtime
    # failures and reports validation problems with 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_model(path):
    try:
        return load_checkpoint(path)
    except FileNotFoundError:
        raise CliError(f"checkpoint not found: {path}")
    except ValueError as exc:
        raise CliError(str(exc))


def _load_mesh(path):
    try:
        return load_obj(path)
    except FileNotFoundError:
        raise CliError(f"mesh not found: {path}")
    except ValueError as exc:
        raise CliError(f"{path}: {exc}")


def _load_prior_file(path):
    try:
        return load_prior(path)
    except FileNotFoundError:
        raise CliError(f"prior not found: {path}")
    except (ValueError, KeyError) as exc:
        raise CliError(f"{path}: {exc}")


def _training_meshes(args):
    if args.synthetic is not None:
        rng = Rng(args.seed)
        shapes = generate_synthetic_family(args.synthetic, args.count, rng)
        return [s.mesh for s in shapes], args.synthetic
    data = args.data
    manifest = os.path.join(data, "manifest.json")
    if os.path.isfile(manifest):
        dataset = load_dataset(data)
        meshes = [r.mesh for r in dataset.split("train")]
        if not meshes:
            raise CliError(f"dataset at {data} has no training split")
        return meshes, dataset.family
    paths = sorted(glob.glob(os.path.join(data, "*.obj")))
    if not paths:
        raise CliError(f"no .obj files found in {data}")
    return [_load_mesh(p) for p in paths], os.path.basename(os.path.normpath(data))


def _cmd_train(args):
    meshes, category = _training_meshes(args)
    config = TrainConfig(
        n_keypoints=args.keypoints,
        iterations=args.iters,
        n_points=args.points,
        alpha_kpt=args.alpha_kpt,
        alpha_inf=args.alpha_inf,
        lr=args.lr,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    log_path = args.log if args.log else args.out + ".log.jsonl"
    every = max(1, args.iters // 20) if args.iters else 1

    def progress(iteration, entry):
        if iteration % every == 0 or iteration == args.iters - 1:
            print(
                f"iter {iteration:5d}  sim {entry['sim']:.6f}  kpt {entry['kpt']:.6f}  "
                f"inf {entry['inf']:.3e}  total {entry['total']:.6f}"
            )

    try:
        result = train(meshes, config, callback=progress)
    except TrainingDiverged as diverged:
        save_checkpoint(
            diverged.model, args.out, category=category, hyperparameters=config.as_dict()
        )
        _write_log(log_path, diverged.log)
        print(
            f"training diverged at iteration {diverged.iteration}; "
            f"last finite model saved to {args.out}",
            file=sys.stderr,
        )
        raise
    checksum = save_checkpoint(
        result.model, args.out, category=category, hyperparameters=config.as_dict()
    )
    _write_log(log_path, result.log)
    if args.prior_out:
        keypoint_sets = [result.model.keypoints_of(rec.cloud) for rec in result.shapes]
        if len(keypoint_sets) < args.prior_basis + 1:
            raise CliError(
                f"prior needs at least {args.prior_basis + 1} training shapes, "
                f"got {len(keypoint_sets)}"
            )
        prior = fit_pca(keypoint_sets, n_basis=args.prior_basis, model_checksum=checksum)
        save_prior(prior, args.prior_out)
    print(f"checkpoint written to {args.out} (blob sha256 {checksum[:12]}...)")


def _write_log(path, log):
    with open(path, "w", encoding="utf-8") as fh:
        for entry in log:
            fh.write(json.dumps(entry, sort_keys=True))
            fh.write("\n")


def _cmd_keypoints(args):
    model, header = _load_model(args.ckpt)
    settings = InferenceSettings.from_header(header)
    mesh = _load_mesh(args.mesh)
    prepared = prepare_mesh(model, mesh, settings, with_cage=False)
    payload = {
        "n_keypoints": model.n_keypoints,
        "keypoints": round9(keypoints_to_original(prepared, prepared.keypoints)),
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_keypoints_file(path, expected):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"keypoints file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})")
    raw = data.get("keypoints") if isinstance(data, dict) else data
    try:
        return parse_points(raw, expected=expected)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}")


def _cmd_deform(args):
    model, header = _load_model(args.ckpt)
    settings = InferenceSettings.from_header(header)
    mesh = _load_mesh(args.mesh)
    targets = _read_keypoints_file(args.target_keypoints, model.n_keypoints)
    prepared = prepare_mesh(model, mesh, settings, with_cage=True)
    target_norm = prepared.transform.apply(targets)
    deformed = deform_to_keypoints(model, prepared, target_norm)
    save_obj(deformed, args.out)
    print(f"deformed mesh written to {args.out}")


def _cmd_eval(args):
    model, header = _load_model(args.ckpt)
    settings = InferenceSettings.from_header(header)
    try:
        dataset = load_dataset(args.annotations)
    except FileNotFoundError:
        raise CliError(f"annotations not found: {args.annotations}")
    except ValueError as exc:
        raise CliError(str(exc))

    if args.protocol == "pck":
        report = run_pck_protocol(model, dataset, settings, headline=args.threshold)
        csv_rows = [{"threshold": t, "pck": v} for t, v in sorted(report["curve"].items(), key=lambda kv: float(kv[0]))]
    elif args.protocol == "parts":
        report = run_parts_protocol(model, dataset, settings, radius=args.radius)
        csv_rows = [
            {"keypoint": i, "score": v} for i, v in enumerate(report["per_keypoint"])
        ]
    else:
        report = run_align_protocol(
            model, dataset, settings, seed=args.seed, max_pairs=args.max_pairs
        )
        csv_rows = [dict(e) for e in report["pairs"]]

    report["checkpoint"] = args.ckpt
    report["category"] = dataset.family
    if args.out:
        write_report_json(args.out, report)
        print(f"report written to {args.out}")
    else:
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    if args.csv:
        write_report_csv(args.csv, csv_rows)


def _parse_sweep(text):
    body = text[len("basis:"):] if text.startswith("basis:") else text
    parts = body.split(",")
    if len(parts) != 4:
        raise CliError("--sweep must look like basis:INDEX,MIN,MAX,STEPS")
    try:
        index = int(parts[0])
        lo, hi = float(parts[1]), float(parts[2])
        steps = int(parts[3])
    except ValueError:
        raise CliError("--sweep must look like basis:INDEX,MIN,MAX,STEPS")
    if steps < 1:
        raise CliError("--sweep needs at least 1 step")
    return index, lo, hi, steps


def _cmd_amplify(args):
    model, header = _load_model(args.ckpt)
    settings = InferenceSettings.from_header(header)
    prior = _load_prior_file(args.prior)
    if prior.n_keypoints != model.n_keypoints:
        raise CliError(
            f"prior has {prior.n_keypoints} keypoints, checkpoint predicts {model.n_keypoints}"
        )
    index, lo, hi, steps = _parse_sweep(args.sweep)
    if not 0 <= index < prior.n_basis:
        raise CliError(f"basis index {index} out of range (prior has {prior.n_basis})")

    mesh = _load_mesh(args.mesh)
    prepared = prepare_mesh(model, mesh, settings, with_cage=True)
    scale = float(prior.component_std[index])
    values = np.linspace(lo, hi, steps)
    os.makedirs(args.out, exist_ok=True)
    entries = []
    for i, value in enumerate(values):
        coeffs = np.zeros(prior.n_basis)
        coeffs[index] = value * scale
        target_norm = sample_prior(prior, coeffs)
        deformed = deform_to_keypoints(model, prepared, target_norm)
        name = f"amplify_basis{index}_{i:02d}.obj"
        save_obj(deformed, os.path.join(args.out, name))
        entries.append({"file": name, "sigma": float(value), "coefficient": float(value * scale)})
    with open(os.path.join(args.out, "sweep.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {"basis": index, "component_std": scale, "steps": entries}, fh, indent=2
        )
        fh.write("\n")
    print(f"{steps} meshes written to {args.out}")


def _cmd_synth(args):
    manifest = write_synthetic_dataset(
        args.family,
        args.count,
        args.seed,
        args.out,
        n_cloud_points=args.points,
        test_fraction=args.test_frac,
    )
    n_train = sum(1 for s in manifest["shapes"] if s["split"] == "train")
    print(
        f"dataset written to {args.out}: {n_train} train / "
        f"{args.count - n_train} test {args.family} shapes"
    )


def _cmd_serve(args):
    import uvicorn

    model, header = _load_model(args.ckpt)
    settings = InferenceSettings.from_header(header)
    prior = _load_prior_file(args.prior) if args.prior else None
    port = args.port if args.port is not None else int(os.environ.get(DEFAULT_PORT_ENV, "8000"))
    app = create_app(model, settings, prior=prior, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")


def build_parser():
    parser = _Parser(prog="kpdeform", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a shape collection")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", choices=sorted(FAMILIES), help="generate a synthetic family")
    src.add_argument("--data", help="directory of .obj files or a dataset directory")
    p.add_argument("--count", type=int, default=200, help="synthetic shape count")
    p.add_argument("--keypoints", type=int, default=12)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--points", type=int, default=1024, help="sampled points per shape")
    p.add_argument("--alpha-kpt", type=float, default=1.0)
    p.add_argument("--alpha-inf", type=float, default=1e-6)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--log", help="training log path (default: <out>.log.jsonl)")
    p.add_argument("--prior-out", help="also fit and write a keypoint prior")
    p.add_argument("--prior-basis", type=int, default=8)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("keypoints", help="predict keypoints for a mesh")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--out", help="JSON output path (default: stdout)")
    p.set_defaults(func=_cmd_keypoints)

    p = sub.add_parser("deform", help="deform a mesh toward target keypoints")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--target-keypoints", required=True, help="JSON file of K [x,y,z] targets")
    p.add_argument("--out", required=True, help="OBJ output path")
    p.set_defaults(func=_cmd_deform)

    p = sub.add_parser("eval", help="run an evaluation protocol against annotations")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--protocol", required=True, choices=["pck", "parts", "align"])
    p.add_argument("--annotations", required=True, help="dataset directory (see `synth`)")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="also write per-row CSV")
    p.add_argument("--threshold", type=float, default=0.05, help="pck headline threshold")
    p.add_argument("--radius", type=float, default=0.05, help="parts neighborhood radius")
    p.add_argument("--seed", type=int, default=0, help="align protocol preparation seed")
    p.add_argument("--max-pairs", type=int, help="align protocol pair cap")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("amplify", help="sweep a prior basis coefficient and export meshes")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--sweep", required=True, help="basis:INDEX,MIN,MAX,STEPS (MIN/MAX in sigma units)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_amplify)

    p = sub.add_parser("synth", help="materialize an annotated synthetic dataset")
    p.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=256, help="annotated cloud size per shape")
    p.add_argument("--test-frac", type=float, default=0.2)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="serve the interactive editing HTTP API")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--prior")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, help=f"default: ${DEFAULT_PORT_ENV} or 8000")
    p.add_argument("--ui-dir", help="static UI bundle to serve at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TrainingDiverged:
        return 2
    except KeyboardInterrupt:
        return 2
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
