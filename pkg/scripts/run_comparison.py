#!/usr/bin/env python3
"""Full model comparison: quantum kernels at 3 depths vs classical baselines.

Reuses one train/test dataset pair for six models (quantum with 6, 12, and
24 layers; classical deep kernels with cosine, RBF, and degree-2 polynomial
heads) and prints a single summary table. At full scale this is a multi-hour
job; scale down with --runs/--epochs/--count for a smoke pass.
"""

import argparse
import os
import sys

from dnakernel.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results/comparison")
    parser.add_argument("--count", type=int, default=3200)
    parser.add_argument("--length", type=int, default=8)
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    os.makedirs(args.out_dir, exist_ok=True)
    train = os.path.join(args.out_dir, "train.jsonl")
    test = os.path.join(args.out_dir, "test.jsonl")

    for seed, path in [(args.seed, train), (args.seed + 1, test)]:
        rc = cli(["gen-data", "--seed", str(seed), "--count", str(args.count),
                  "--length", str(args.length), "--out", path,
                  "--jobs", str(args.jobs)])
        if rc != 0:
            return rc

    common = ["--train", train, "--test", test, "--epochs", str(args.epochs),
              "--runs", str(args.runs), "--jobs", str(args.jobs)]
    labels = []
    for i, layers in enumerate((6, 12, 24)):
        label = f"QKernel-{layers}"
        curves = os.path.join(args.out_dir, f"qkernel{layers}_curves.csv")
        rc = cli(["train-quantum", *common, "--layers", str(layers),
                  "--seed", str(args.seed + 2 + i),
                  "--out-curves", curves,
                  "--out-checkpoints",
                  os.path.join(args.out_dir, f"qkernel{layers}_checkpoints.json")])
        if rc != 0:
            return rc
        labels.append(f"{label}={curves}")

    for i, head in enumerate(("cosine", "rbf", "poly2")):
        label = f"CKernel-{head}"
        curves = os.path.join(args.out_dir, f"ckernel_{head}_curves.csv")
        rc = cli(["train-classical", "--kernel", head, *common,
                  "--seed", str(args.seed + 5 + i),
                  "--out-curves", curves,
                  "--out-checkpoints",
                  os.path.join(args.out_dir, f"ckernel_{head}_checkpoints.json")])
        if rc != 0:
            return rc
        labels.append(f"{label}={curves}")

    return cli(["report", "--curves", *labels, "--out-dir", args.out_dir])


if __name__ == "__main__":
    sys.exit(run())
