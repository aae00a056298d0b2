#!/usr/bin/env python3
"""Headline experiment: train the 24-layer kernel and report its accuracy.

Generates the train and test triplet sets, runs the full multi-run training
protocol, and prints the summary table. All defaults match the reference
protocol (3200 triplets per set, length 8, 24 layers, lr 0.01, 100 epochs,
batch 32, 10 runs); expect this to take hours at full scale. Use --runs and
--epochs to scale it down for a smoke run.
"""

import argparse
import os
import sys

from dnakernel.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results/headline")
    parser.add_argument("--count", type=int, default=3200)
    parser.add_argument("--length", type=int, default=8)
    parser.add_argument("--layers", type=int, default=24)
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    os.makedirs(args.out_dir, exist_ok=True)
    train = os.path.join(args.out_dir, "train.jsonl")
    test = os.path.join(args.out_dir, "test.jsonl")
    curves = os.path.join(args.out_dir, "qkernel_curves.csv")

    steps = [
        ["gen-data", "--seed", str(args.seed), "--count", str(args.count),
         "--length", str(args.length), "--out", train, "--jobs", str(args.jobs)],
        ["gen-data", "--seed", str(args.seed + 1), "--count", str(args.count),
         "--length", str(args.length), "--out", test, "--jobs", str(args.jobs)],
        ["train-quantum", "--train", train, "--test", test,
         "--layers", str(args.layers), "--epochs", str(args.epochs),
         "--runs", str(args.runs), "--seed", str(args.seed + 2),
         "--out-curves", curves,
         "--out-checkpoints", os.path.join(args.out_dir, "qkernel_checkpoints.json"),
         "--jobs", str(args.jobs)],
        ["report", "--curves", f"QKernel-{args.layers}={curves}",
         "--out-dir", args.out_dir],
    ]
    for step in steps:
        rc = cli(step)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(run())
