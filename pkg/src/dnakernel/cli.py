"""Command-line pipeline: dataset generation, training, distances, reports.

Every command that produces files also writes a manifest next to them with
the full flag configuration, the seeds actually used, and a sha256 hash of
each artifact, so an experiment directory is self-describing and reruns are
checkable byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time

import numpy as np

from dnakernel.baselines import HEADS, ClassicalKernelModel
from dnakernel.dataset import (
    DatasetError,
    generate_triplets,
    load_triplets,
    save_triplets,
)
from dnakernel.edm import MAX_EDM_LENGTH, BudgetExceededError, edm_exact
from dnakernel.kernel import QuantumKernelModel
from dnakernel.training import (
    TrainingConfig,
    TrainingDivergedError,
    aggregate_runs,
    load_curves,
    run_experiment,
    save_curves,
    save_json,
)

JOBS_ENV_VAR = "DNAKERNEL_JOBS"


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV_VAR, "1")
    try:
        jobs = int(raw)
    except ValueError:
        raise ValueError(f"{JOBS_ENV_VAR} must be an integer, got {raw!r}")
    if jobs < 1:
        raise ValueError(f"{JOBS_ENV_VAR} must be >= 1, got {jobs}")
    return jobs


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _artifact_entry(path) -> dict:
    return {
        "path": str(path),
        "sha256": _sha256(path),
        "bytes": os.path.getsize(path),
    }


def write_manifest(out_path, command: str, config: dict, seeds, artifacts,
                   timings: dict) -> str:
    """Manifest describing one command invocation; returns its path."""
    manifest = {
        "command": command,
        "config": config,
        "seeds": list(seeds),
        "artifacts": [_artifact_entry(p) for p in artifacts],
        "timings_seconds": {k: round(v, 3) for k, v in timings.items()},
    }
    path = f"{out_path}.manifest.json"
    save_json(path, manifest)
    return path


def cmd_gen_data(args) -> int:
    if args.length < 1:
        raise ValueError(f"--length must be >= 1, got {args.length}")
    if args.length > MAX_EDM_LENGTH:
        raise ValueError(
            f"--length {args.length} exceeds the exact-distance cap of "
            f"{MAX_EDM_LENGTH}; labels would be unverifiable"
        )
    if args.count < 1:
        raise ValueError(f"--count must be >= 1, got {args.count}")
    start = time.perf_counter()
    triplets = generate_triplets(args.seed, args.count, args.length, jobs=args.jobs)
    save_triplets(triplets, args.out)
    elapsed = time.perf_counter() - start
    config = {
        "seed": args.seed,
        "count": args.count,
        "length": args.length,
        "jobs": args.jobs,
    }
    write_manifest(args.out, "gen-data", config, [args.seed], [args.out],
                   {"total": elapsed})
    print(f"wrote {len(triplets)} triplets to {args.out}")
    return 0


def _train_command(args, model) -> int:
    if args.out_summary is None:
        base = os.path.splitext(args.out_curves)[0]
        args.out_summary = f"{base}.summary.json"
    t0 = time.perf_counter()
    train_set = load_triplets(args.train)
    test_set = load_triplets(args.test)
    load_seconds = time.perf_counter() - t0

    config = TrainingConfig(
        num_layers=args.layers,
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch,
        runs=args.runs,
        seed=args.seed,
    )
    t1 = time.perf_counter()
    curves, finals = run_experiment(model, config, train_set, test_set,
                                    jobs=args.jobs)
    train_seconds = time.perf_counter() - t1

    save_curves(args.out_curves, curves)
    checkpoints = {
        "runs": [
            model.checkpoint_payload(flat, curve.seed, curve.records[-1].epoch)
            for curve, flat in zip(curves, finals)
        ]
    }
    save_json(args.out_checkpoints, checkpoints)

    summary: dict = {"per_run_best": [c.best for c in curves]}
    if len(curves) >= 2:
        agg = aggregate_runs(curves)
        summary.update(
            mean_best=agg.mean,
            ci95_halfwidth=agg.ci95_halfwidth,
            mean_best_so_far=list(agg.mean_best_so_far),
        )
    else:
        summary.update(
            mean_best=curves[0].best,
            note="confidence interval omitted: requires at least 2 runs",
        )
    save_json(args.out_summary, summary)

    flag_config = {
        "train": args.train,
        "test": args.test,
        "layers": args.layers,
        "lr": args.lr,
        "epochs": args.epochs,
        "batch": args.batch,
        "runs": args.runs,
        "seed": args.seed,
        "jobs": args.jobs,
        "num_parameters": model.num_parameters,
    }
    if hasattr(args, "kernel"):
        flag_config["kernel"] = args.kernel
    write_manifest(
        args.out_curves,
        args.command,
        flag_config,
        [c.seed for c in curves],
        [args.out_curves, args.out_checkpoints, args.out_summary],
        {"load": load_seconds, "train": train_seconds},
    )
    mean = summary["mean_best"]
    if "ci95_halfwidth" in summary:
        print(f"mean best order accuracy {mean:.4f} "
              f"+/- {summary['ci95_halfwidth']:.4f} over {len(curves)} runs")
    else:
        print(f"best order accuracy {mean:.4f} (single run, no interval)")
    return 0


def _sequence_length(path) -> int:
    triplets = load_triplets(path, verify_fraction=0.0)
    return len(triplets[0].a)


def cmd_train_quantum(args) -> int:
    model = QuantumKernelModel(
        num_qubits=_sequence_length(args.train), num_layers=args.layers
    )
    return _train_command(args, model)


def cmd_train_classical(args) -> int:
    model = ClassicalKernelModel(
        seq_length=_sequence_length(args.train), head=args.kernel
    )
    return _train_command(args, model)


def cmd_edm(args) -> int:
    print(edm_exact(args.a, args.b))
    return 0


def cmd_report(args) -> int:
    rows = []
    artifacts = []
    for spec in args.curves:
        if "=" not in spec:
            raise ValueError(
                f"--curves entries must look like LABEL=PATH, got {spec!r}"
            )
        label, path = spec.split("=", 1)
        curves = load_curves(path)
        if not curves:
            raise ValueError(f"{path}: no learning curves found")
        if len(curves) >= 2:
            agg = aggregate_runs(curves)
            rows.append((label, len(curves), agg.mean, agg.ci95_halfwidth))
            mean_curve = agg.mean_best_so_far
        else:
            rows.append((label, 1, curves[0].best, None))
            mean_curve = tuple(r.best_so_far for r in curves[0].records)
        if args.out_dir is not None:
            os.makedirs(args.out_dir, exist_ok=True)
            out = os.path.join(args.out_dir, f"mean_best_so_far_{label}.csv")
            tmp = f"{out}.tmp.{os.getpid()}"
            with open(tmp, "w") as fh:
                fh.write("epoch,mean_best_so_far\n")
                for epoch, value in enumerate(mean_curve):
                    fh.write(f"{epoch},{value!r}\n")
            os.replace(tmp, out)
            artifacts.append(out)

    width = max(5, max(len(r[0]) for r in rows))
    print(f"{'model':<{width}}  runs  best order accuracy")
    for label, runs, mean, hw in rows:
        if hw is None:
            print(f"{label:<{width}}  {runs:>4}  {100 * mean:5.1f}%  "
                  "(single run, no interval)")
        else:
            print(f"{label:<{width}}  {runs:>4}  {100 * mean:5.1f} +/- {100 * hw:3.1f}%")
    if artifacts:
        write_manifest(
            os.path.join(args.out_dir, "report"),
            "report",
            {"curves": list(args.curves), "out_dir": args.out_dir},
            [],
            artifacts,
            {},
        )
    return 0


def _add_train_flags(parser, default_layers=24):
    parser.add_argument("--train", required=True, help="training triplet file")
    parser.add_argument("--test", required=True, help="test triplet file")
    parser.add_argument("--layers", type=int, default=default_layers)
    parser.add_argument("--lr", type=float, default=0.01)
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-curves", required=True)
    parser.add_argument("--out-checkpoints", required=True)
    parser.add_argument("--out-summary", default=None,
                        help="defaults to the curve path with a .summary.json suffix")
    parser.add_argument("--jobs", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnakernel",
        description="Sequence-similarity kernels trained on exact "
                    "edit-distance-with-moves labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a labeled triplet dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=3200)
    p.add_argument("--length", type=int, default=8)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train-quantum", help="train the variational kernel")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train_quantum)

    p = sub.add_parser("train-classical", help="train a deep-kernel baseline")
    p.add_argument("--kernel", choices=sorted(HEADS), required=True)
    _add_train_flags(p)
    p.set_defaults(func=cmd_train_classical)

    p = sub.add_parser("edm", help="exact edit distance with moves")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_edm)

    p = sub.add_parser("report", help="summarize learning-curve files")
    p.add_argument("--curves", nargs="+", required=True, metavar="LABEL=PATH")
    p.add_argument("--out-dir", default=None,
                   help="also write averaged best-so-far curves here")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "jobs"):
            if args.jobs is None:
                args.jobs = _default_jobs()
            if args.jobs < 1:
                raise ValueError(f"--jobs must be >= 1, got {args.jobs}")
        return args.func(args)
    except (ValueError, DatasetError, BudgetExceededError,
            TrainingDivergedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
