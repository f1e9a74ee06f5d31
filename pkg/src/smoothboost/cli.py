"""Command-line harness: dataset generation, boosting runs, communication sweeps.

Every run is deterministic under its master seed.  Trial i uses seed
master + i for data generation, sharding, and the protocol itself, so
reruns reproduce files byte for byte.  Output lands in --out (or the
SMOOTHBOOST_OUT environment variable), CSVs always, figures unless
--no-figures.
"""
from __future__ import annotations

import argparse
import os
import statistics
import sys
from pathlib import Path
from typing import List, Optional

from .boost import BoostConfig, error_rate, run_smooth_boost
from .data import (PARTITION_STRATEGIES, LabeledDataset, gen_long_servedio,
                   inject_label_noise, parse_libsvm, partition,
                   dataset_to_csv, dataset_to_libsvm, split_train_test)
from .distboost import (ProtocolReport, report_to_csv, run_dist_adaboost,
                        run_dist_smooth_boost)
from .netsim import CommStats, Network
from .projection import ShardedWeights, distributed_project
from .rng import derive_rng

ALGORITHMS = ("smooth", "adaboost", "centralized-smooth")

COMMSCAN_HEADER = "mode,n,k,eps,words,rounds"
SUMMARY_HEADER = "trial,seed,algo,k,test_err,train_err,words,rounds"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothboost",
        description="Distributed smooth boosting experiments on simulated entities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic train/test pair")
    p_gen.add_argument("--n", type=int, default=50000,
                       help="total examples before the split (default 50000)")
    p_gen.add_argument("--noise", type=float, default=0.01,
                       help="training label flip rate (default 0.01)")
    p_gen.add_argument("--train-frac", type=float, default=0.8,
                       help="fraction of examples in the training file (default 0.8)")
    p_gen.add_argument("--seed", type=int, default=0)
    add_out_flag(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_boost = sub.add_parser("boost", help="run boosting trials and write reports")
    p_boost.add_argument("--algo", choices=ALGORITHMS, default="smooth")
    p_boost.add_argument("--data", type=Path, default=None,
                         help="LibSVM file to boost on (default: generate synthetic data)")
    p_boost.add_argument("--n", type=int, default=50000,
                         help="synthetic examples before the split (default 50000)")
    p_boost.add_argument("--noise", type=float, default=0.01,
                         help="training label flip rate (default 0.01)")
    p_boost.add_argument("--train-frac", type=float, default=0.8)
    p_boost.add_argument("--k", type=int, default=4, help="number of entities (default 4)")
    p_boost.add_argument("--partition", choices=PARTITION_STRATEGIES, default="uniform")
    p_boost.add_argument("--beta", type=float, default=0.2,
                         help="weak-learner error bound beta (default 0.2)")
    p_boost.add_argument("--gamma", type=float, default=None,
                         help="edge parameter; default (1/2)(1/2 - beta)")
    p_boost.add_argument("--eps", type=float, default=0.1,
                         help="smoothness / target error parameter (default 0.1)")
    p_boost.add_argument("--rounds", type=parse_rounds, default=100,
                         help="boosting rounds, or 'auto' (default 100)")
    p_boost.add_argument("--sample-budget", type=int, default=2000,
                         help="examples the center samples per round (default 2000)")
    p_boost.add_argument("--full-data", action="store_true",
                         help="ship shards to the center once instead of sampling")
    p_boost.add_argument("--trials", type=int, default=10)
    p_boost.add_argument("--seed", type=int, default=0, help="master seed; trial i uses seed+i")
    p_boost.add_argument("--no-figures", action="store_true")
    add_out_flag(p_boost)
    p_boost.set_defaults(func=cmd_boost)

    p_scan = sub.add_parser("commscan",
                            help="sweep n/k/eps and record words moved per projection and per run")
    p_scan.add_argument("--n", type=int, nargs="+",
                        default=[2 ** e for e in range(6, 15)],
                        help="union sizes to sweep (default 64..16384)")
    p_scan.add_argument("--k", type=int, nargs="+", default=[8])
    p_scan.add_argument("--eps", type=float, nargs="+", default=[0.1])
    p_scan.add_argument("--rounds", type=int, default=5,
                        help="boosting rounds for the full-protocol sweep (default 5)")
    p_scan.add_argument("--sample-budget", type=int, default=200)
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.add_argument("--no-figures", action="store_true")
    add_out_flag(p_scan)
    p_scan.set_defaults(func=cmd_commscan)
    return parser


def add_out_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", type=Path,
                     default=Path(os.environ.get("SMOOTHBOOST_OUT", "smoothboost-out")),
                     help="output directory (default $SMOOTHBOOST_OUT or ./smoothboost-out)")


def parse_rounds(text: str):
    if text == "auto":
        return text
    return int(text)


# ---------------------------- gen ---------------------------- #


def cmd_gen(args, parser) -> int:
    if args.n < 2:
        parser.error("--n must be at least 2 (need a nonempty train/test split)")
    if not 0.0 <= args.noise <= 1.0:
        parser.error("--noise must be in [0, 1]")
    out = ensure_dir(args.out)
    train, test = make_synthetic(args.n, args.noise, args.train_frac, args.seed)
    dataset_to_csv(train, out / "train.csv")
    dataset_to_csv(test, out / "test.csv")
    dataset_to_libsvm(train, out / "train.libsvm")
    dataset_to_libsvm(test, out / "test.libsvm")
    print(f"wrote {len(train)} train / {len(test)} test examples to {out}")
    return 0


def make_synthetic(n: int, noise: float, train_frac: float, seed: int):
    """Clean mixture, split, then flip training labels only."""
    ds = gen_long_servedio(n, seed)
    train, test = split_train_test(ds, train_frac, derive_rng(seed, 1).integers(2 ** 62))
    train = inject_label_noise(train, noise, derive_rng(seed, 2).integers(2 ** 62))
    return train, test


# ---------------------------- boost ---------------------------- #


def cmd_boost(args, parser) -> int:
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    if args.k < 1:
        parser.error("--k must be at least 1")
    out = ensure_dir(args.out)
    fixed = load_libsvm(args.data) if args.data is not None else None

    rows = []
    curves = {}
    for trial in range(args.trials):
        seed = args.seed + trial
        config = BoostConfig(gamma=args.gamma, beta=args.beta, epsilon=args.eps,
                             rounds=args.rounds, sample_budget=args.sample_budget,
                             seed=seed)
        if fixed is not None:
            train, test = split_train_test(fixed, args.train_frac,
                                           derive_rng(seed, 1).integers(2 ** 62))
        else:
            train, test = make_synthetic(args.n, args.noise, args.train_frac, seed)
        report = run_trial(args.algo, train, config, args.k, args.partition,
                           args.full_data, seed)
        test_err = error_rate(report.ensemble, test)
        train_err = report.rounds[-1].train_err_so_far
        report_to_csv(report, out, prefix=f"trial{trial}_")
        rows.append((trial, seed, test_err, train_err,
                     report.comm.words, report.comm.rounds))
        curves[f"trial {trial}"] = report.rounds

    write_summary(out / "summary.csv", args, rows)
    if not args.no_figures:
        from .figures import plot_training_curves

        plot_training_curves(curves, out / "training_curves.png")
    errs = [r[2] for r in rows]
    words = [r[4] for r in rows]
    spread = statistics.stdev(errs) if len(errs) > 1 else 0.0
    print(f"algo={args.algo} k={args.k} trials={args.trials} "
          f"test_err={statistics.mean(errs):.4f} +- {spread:.4f} "
          f"words={statistics.mean(words):.0f}")
    return 0


def run_trial(algo: str, train: LabeledDataset, config: BoostConfig, k: int,
              strategy: str, full_data: bool, seed: int) -> ProtocolReport:
    if algo == "centralized-smooth":
        ensemble, records = run_smooth_boost(train, config)
        return ProtocolReport(ensemble, CommStats(), records, len(train))
    shards = partition(train, k, strategy, seed=derive_rng(seed, 3).integers(2 ** 62))
    runner = run_dist_smooth_boost if algo == "smooth" else run_dist_adaboost
    return runner(shards, config, full_data=full_data)


def load_libsvm(path: Path) -> LabeledDataset:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from None
    return parse_libsvm(text)


def write_summary(path: Path, args, rows) -> None:
    with open(path, "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for trial, seed, test_err, train_err, words, rounds in rows:
            fh.write(f"{trial},{seed},{args.algo},{args.k},"
                     f"{test_err!r},{train_err!r},{words},{rounds}\n")


# ---------------------------- commscan ---------------------------- #


def cmd_commscan(args, parser) -> int:
    if not args.n or not args.k or not args.eps:
        parser.error("sweep lists must be nonempty")
    if any(n < 4 for n in args.n) or any(k < 1 for k in args.k):
        parser.error("need n >= 4 and k >= 1")
    if any(k > min(args.n) for k in args.k):
        parser.error("every k must be <= every n in the sweep")
    out = ensure_dir(args.out)

    rows = []
    for n in args.n:
        for k in args.k:
            for eps in args.eps:
                rows.append(projection_point(n, k, eps, args.seed))
                rows.append(protocol_point(n, k, eps, args))

    path = out / "commscan.csv"
    with open(path, "w") as fh:
        fh.write(COMMSCAN_HEADER + "\n")
        for r in rows:
            fh.write(f"{r['mode']},{r['n']},{r['k']},{r['eps']!r},"
                     f"{r['words']},{r['rounds']}\n")
    if not args.no_figures:
        from .figures import plot_comm_scaling

        plot_comm_scaling(rows, out / "commscan.png")
    print(f"wrote {len(rows)} sweep rows to {path}")
    return 0


def projection_point(n: int, k: int, eps: float, seed: int) -> dict:
    """Words for one projection of a skewed random weight vector."""
    rng = derive_rng(seed, n, k, int(round(eps * 1000)))
    w = rng.random(n) ** 3 + 1e-9  # heavy skew so the clip set is nonempty
    w /= w.sum()
    shards = [w[i::k] for i in range(k)]
    net = Network(k)
    distributed_project(ShardedWeights(shards), eps, net)
    return {"mode": "projection", "n": n, "k": k, "eps": eps,
            "words": net.stats.words, "rounds": 0}


def protocol_point(n: int, k: int, eps: float, args) -> dict:
    """Words and round count for a short full-protocol run on n examples."""
    ds = gen_long_servedio(n, args.seed)
    shards = partition(ds, k, "round-robin")
    config = BoostConfig(beta=0.2, epsilon=eps, rounds=args.rounds,
                         sample_budget=args.sample_budget, seed=args.seed)
    report = run_dist_smooth_boost(shards, config)
    return {"mode": "protocol", "n": n, "k": k, "eps": eps,
            "words": report.comm.words, "rounds": report.comm.rounds}


# ---------------------------- shared ---------------------------- #


def ensure_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


if __name__ == "__main__":
    sys.exit(main())
