"""Shared SGD protocol: pair regression on similarity labels, ranking eval.

Both kernel families train the same way: minimize the mean squared error
between kernel outputs and the normalized EDM similarities over the two
labeled pairs of every training triplet, then score test triplets by whether
the kernel orders (a,b) against (a,c) the same way the ground truth does.
A model here is anything with init_params / kernel_batch /
kernel_and_grad_batch over code arrays and a flat parameter vector.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from scipy import stats

from dnakernel.kernel import encode_sequences

EVAL_CHUNK = 1024

CURVE_HEADER = "run,epoch,train_mse,test_order_accuracy,best_so_far"


class TrainingDivergedError(RuntimeError):
    """Non-finite loss or gradient encountered during training."""


@dataclass(frozen=True)
class TrainingConfig:
    num_layers: int = 24
    learning_rate: float = 0.01
    epochs: int = 100
    batch_size: int = 32
    runs: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class CurveRecord:
    epoch: int
    train_mse: float
    test_order_accuracy: float
    best_so_far: float


@dataclass(frozen=True)
class LearningCurve:
    run: int
    seed: int
    records: tuple

    @property
    def best(self) -> float:
        return self.records[-1].best_so_far


@dataclass(frozen=True)
class RunSummary:
    per_run_best: tuple
    mean: float
    ci95_halfwidth: float
    mean_best_so_far: tuple  # averaged across runs, indexed by record order


def mse_loss(pred: float, target: float) -> float:
    """Squared error of one prediction."""
    return (pred - target) ** 2


@dataclass(frozen=True)
class PairSet:
    """Training pairs as aligned code arrays plus similarity targets."""

    codes_a: np.ndarray
    codes_b: np.ndarray
    targets: np.ndarray

    def __len__(self) -> int:
        return self.targets.shape[0]


def pairs_from_triplets(triplets) -> PairSet:
    """Two labeled pairs per triplet: (a, b, s_ab) and (a, c, s_ac)."""
    seq_a, seq_b, targets = [], [], []
    for t in triplets:
        seq_a.append(t.a)
        seq_b.append(t.b)
        targets.append(t.s_ab)
        seq_a.append(t.a)
        seq_b.append(t.c)
        targets.append(t.s_ac)
    return PairSet(
        encode_sequences(seq_a),
        encode_sequences(seq_b),
        np.asarray(targets, dtype=np.float64),
    )


def dataset_mse(model, params, pairs: PairSet, chunk: int = EVAL_CHUNK) -> float:
    """Mean squared error over a pair set without updating parameters."""
    total = 0.0
    for lo in range(0, len(pairs), chunk):
        sl = slice(lo, lo + chunk)
        k = model.kernel_batch(params, pairs.codes_a[sl], pairs.codes_b[sl])
        total += float(np.sum((k - pairs.targets[sl]) ** 2))
    return total / len(pairs)


def train_epoch(model, params, pairs: PairSet, config: TrainingConfig, rng):
    """One SGD pass: shuffled mini-batches, exact gradients, plain steps.

    Returns (updated params, epoch mean MSE). The loss derivative per pair
    is 2 (K - target) dK/dtheta, averaged within each batch.
    """
    if len(pairs) == 0:
        raise ValueError("empty training pair set")
    params = np.asarray(params, dtype=np.float64).copy()
    order = rng.permutation(len(pairs))
    total_loss = 0.0
    for lo in range(0, len(pairs), config.batch_size):
        idx = order[lo : lo + config.batch_size]
        k, grads = model.kernel_and_grad_batch(
            params, pairs.codes_a[idx], pairs.codes_b[idx]
        )
        resid = k - pairs.targets[idx]
        total_loss += float(np.sum(resid**2))
        grad = (2.0 / idx.size) * (resid[:, None] * grads).sum(axis=0)
        if not np.isfinite(grad).all():
            raise TrainingDivergedError(
                f"non-finite gradient in batch starting at pair {lo}"
            )
        params -= config.learning_rate * grad
    return params, total_loss / len(pairs)


def order_accuracy(model, params, triplets, chunk: int = EVAL_CHUNK) -> float:
    """Fraction of triplets whose kernel ranking matches the ground truth.

    A predicted exact tie counts as incorrect; a ground-truth tie is a
    dataset defect and rejected.
    """
    if not triplets:
        raise ValueError("empty triplet list")
    s_ab = np.array([t.s_ab for t in triplets])
    s_ac = np.array([t.s_ac for t in triplets])
    if np.any(s_ab == s_ac):
        raise ValueError("ground-truth tie: order accuracy is undefined")
    codes_a = encode_sequences([t.a for t in triplets])
    codes_b = encode_sequences([t.b for t in triplets])
    codes_c = encode_sequences([t.c for t in triplets])
    correct = 0
    for lo in range(0, len(triplets), chunk):
        sl = slice(lo, lo + chunk)
        k_ab = model.kernel_batch(params, codes_a[sl], codes_b[sl])
        k_ac = model.kernel_batch(params, codes_a[sl], codes_c[sl])
        correct += int(np.sum(np.sign(k_ab - k_ac) == np.sign(s_ab[sl] - s_ac[sl])))
    return correct / len(triplets)


def train_run(model, config: TrainingConfig, train_triplets, test_triplets,
              run_seed: int, run_index: int = 0):
    """One full training run, evaluated on the test set after every epoch.

    Returns (curve, final flat parameters). The curve always starts with an
    epoch-0 record of the freshly initialized model, so even epochs=0 yields
    one evaluation.
    """
    rng = np.random.default_rng(run_seed)
    params = model.init_params(rng)
    pairs = pairs_from_triplets(train_triplets)
    records = []
    acc = order_accuracy(model, params, test_triplets)
    best = acc
    records.append(CurveRecord(0, dataset_mse(model, params, pairs), acc, best))
    for epoch in range(1, config.epochs + 1):
        params, train_mse = train_epoch(model, params, pairs, config, rng)
        acc = order_accuracy(model, params, test_triplets)
        best = max(best, acc)
        records.append(CurveRecord(epoch, train_mse, acc, best))
    curve = LearningCurve(run_index, run_seed, tuple(records))
    return curve, params


def aggregate_runs(curves) -> RunSummary:
    """Mean and Student-t 95% interval of the per-run best accuracies."""
    if len(curves) < 2:
        raise ValueError("need at least 2 runs for summary statistics")
    lengths = {len(c.records) for c in curves}
    if len(lengths) != 1:
        raise ValueError("runs have differing epoch counts")
    bests = np.array([c.best for c in curves])
    mean = float(bests.mean())
    sd = float(bests.std(ddof=1))
    tcrit = float(stats.t.ppf(0.975, len(bests) - 1))
    hw = tcrit * sd / np.sqrt(len(bests))
    per_epoch = np.array([[r.best_so_far for r in c.records] for c in curves])
    return RunSummary(
        per_run_best=tuple(float(b) for b in bests),
        mean=mean,
        ci95_halfwidth=float(hw),
        mean_best_so_far=tuple(float(v) for v in per_epoch.mean(axis=0)),
    )


def run_experiment(model, config: TrainingConfig, train_triplets, test_triplets,
                   jobs: int = 1):
    """Independent runs with per-run child seeds; returns (curves, params list)."""
    run_seeds = [
        int(ss.generate_state(1)[0])
        for ss in np.random.SeedSequence(config.seed).spawn(config.runs)
    ]
    args = [
        (model, config, train_triplets, test_triplets, seed, i)
        for i, seed in enumerate(run_seeds)
    ]
    if jobs > 1:
        from multiprocessing import Pool

        with Pool(min(jobs, len(args))) as pool:
            results = pool.map(_train_run_star, args)
    else:
        results = [_train_run_star(a) for a in args]
    curves = [r[0] for r in results]
    final_params = [r[1] for r in results]
    return curves, final_params


def _train_run_star(arg):
    model, config, train_triplets, test_triplets, seed, index = arg
    return train_run(model, config, train_triplets, test_triplets, seed, index)


def save_curves(path, curves) -> None:
    """Learning curves as delimited text, one row per (run, epoch)."""
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(CURVE_HEADER + "\n")
        for c in curves:
            for r in c.records:
                fh.write(
                    f"{c.run},{r.epoch},{r.train_mse!r},"
                    f"{r.test_order_accuracy!r},{r.best_so_far!r}\n"
                )
    os.replace(tmp, path)


def load_curves(path):
    """Read a curve file back into LearningCurve objects (seeds not stored)."""
    runs: dict[int, list] = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CURVE_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            parts = line.strip().split(",")
            if len(parts) != 5:
                raise ValueError(f"{path}: line {lineno}: expected 5 fields")
            run, epoch = int(parts[0]), int(parts[1])
            runs.setdefault(run, []).append(
                CurveRecord(epoch, float(parts[2]), float(parts[3]), float(parts[4]))
            )
    return [
        LearningCurve(run, -1, tuple(records)) for run, records in sorted(runs.items())
    ]


def save_json(path, payload: dict) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
