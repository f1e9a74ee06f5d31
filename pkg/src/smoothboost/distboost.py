"""Distributed boosting over a star network: smooth boosting and an AdaBoost baseline.

Each round the center learns roughly how much weight every entity holds,
splits a fixed sampling budget across entities proportionally, trains a
stump on the union of the returned samples, and broadcasts it.  Entities
then update their local weights and the group renormalizes and (for smooth
boosting) projects onto the smooth set, all through counted messages.

A full-data mode replaces sampling: the static shard contents travel to the
center once up front, and each round entities ship their current weights so
the center can train on the exact weighted union.  With everything on one
shard this reproduces the centralized loop bit for bit, and any resharding
of the same dataset yields the identical hypothesis sequence, because
weights start uniform over the union and flow back into source order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .boost import BoostConfig, Distribution, RoundRecord, round_records_to_csv
from .data import LabeledDataset, Shards
from .netsim import CENTER, CommStats, Network, comm_stats_to_csv, entity
from .projection import (ShardedWeights, distributed_normalize,
                         distributed_project)
from .rng import derive_rng
from .weaklearn import (Stump, VotedEnsemble, ensemble_to_csv, predict_dataset,
                        train_stump, vote_sign)

# stream tags for per-round seed derivation
_ALLOC_STREAM = 1
_ENTITY_STREAM = 0

_MAX_ALPHA = 0.5 * math.log(1e6)  # stand-in for a zero-error round

Learner = Callable[[LabeledDataset, np.ndarray], Stump]


@dataclass(frozen=True)
class ProtocolReport:
    ensemble: VotedEnsemble
    comm: CommStats
    rounds: List[RoundRecord]
    per_round_examples: int


# ---------------------------- Sampling helpers ---------------------------- #


def multinomial_allocate(sums, budget: int, rng: np.random.Generator) -> np.ndarray:
    """Split `budget` draws across entities proportionally to their weight sums."""
    sums = np.asarray(sums, dtype=np.float64)
    if budget < 1:
        raise ValueError("budget must be positive")
    if np.any(sums < 0):
        raise ValueError("weight sums must be nonnegative")
    total = float(np.sum(sums))
    if total <= 0.0:
        raise ValueError("weight sums must have positive total")
    return rng.multinomial(budget, sums / total)


def entity_sample(shard: LabeledDataset, weights: np.ndarray, count: int,
                  rng: np.random.Generator) -> LabeledDataset:
    """Sample `count` examples with replacement, proportionally to local weights."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (len(shard),):
        raise ValueError("weights must align with the shard")
    if count < 0:
        raise ValueError("count must be nonnegative")
    total = float(np.sum(weights))
    if count > 0 and total <= 0.0:
        raise ValueError("cannot sample from zero local mass")
    if count == 0:
        return shard.subset(np.empty(0, dtype=np.int64))
    picks = rng.choice(len(shard), size=count, replace=True, p=weights / total)
    return shard.subset(picks)


# ---------------------------- Shared round machinery ---------------------------- #


class _ProtocolState:
    """Everything both protocols share: network, weights, instrumentation."""

    def __init__(self, shards: Shards, config: BoostConfig, full_data: bool,
                 count_instrumentation: bool):
        self.shards = shards
        self.config = config
        self.full_data = full_data
        self.counted = count_instrumentation
        if any(len(part) == 0 for part in shards.parts):
            raise ValueError("every shard must be nonempty")
        self.net = Network(shards.k)
        sizes = self.net.gather([len(part) for part in shards.parts])
        self.n = sum(sizes)
        self.net.broadcast(self.n)
        # uniform over the union, so any sharding simulates the same run
        self.weights = [np.full(len(part), 1.0 / self.n) for part in shards.parts]
        self.scores = [np.zeros(len(part)) for part in shards.parts]
        if full_data:
            # static shard contents move once; weights travel per round
            self.full_ds = self._receive_static()

    def _receive_static(self) -> LabeledDataset:
        X = np.empty((self.n, self.shards.parts[0].dim))
        y = np.empty(self.n, dtype=np.int64)
        for i, (part, idx) in enumerate(zip(self.shards.parts, self.shards.indices)):
            self.net.send(entity(i), CENTER,
                          (np.asarray(idx, dtype=np.int64), part.features, part.labels))
            X[idx] = part.features
            y[idx] = part.labels
        return LabeledDataset(X, y)

    def gather_weight_sums(self) -> List[float]:
        return self.net.gather([float(np.sum(w)) for w in self.weights])

    def full_weight_vector(self) -> np.ndarray:
        for i, w in enumerate(self.weights):
            self.net.send(entity(i), CENTER, w)
        return self.shards.flatten(self.weights)

    def sampled_union(self, round_no: int, sums: List[float]) -> LabeledDataset:
        counts = multinomial_allocate(
            sums, self.config.sample_budget,
            derive_rng(self.config.seed, round_no, _ALLOC_STREAM))
        parts = []
        for i, count in enumerate(counts):
            self.net.send(CENTER, entity(i), int(count))
            if count == 0:
                continue
            sample = entity_sample(
                self.shards.parts[i], self.weights[i], int(count),
                derive_rng(self.config.seed, round_no, _ENTITY_STREAM, i))
            self.net.send(entity(i), CENTER, (sample.features, sample.labels))
            parts.append(sample)
        X = np.concatenate([p.features for p in parts])
        y = np.concatenate([p.labels for p in parts])
        return LabeledDataset(X, y)

    def instrument(self, values: List[float]) -> float:
        """Aggregate per-entity scalars; counted as traffic only when asked."""
        if self.counted:
            self.net.gather(values)
        return float(sum(values))

    def edge_of(self, preds: List[np.ndarray]) -> float:
        terms = [float(np.sum(w * (p != part.labels)))
                 for w, p, part in zip(self.weights, preds, self.shards.parts)]
        return 0.5 - self.instrument(terms)

    def vote_progress(self, preds: List[np.ndarray], alpha: float = 1.0) -> float:
        counts = []
        for i, p in enumerate(preds):
            self.scores[i] += alpha * p
            counts.append(float(np.count_nonzero(
                vote_sign(self.scores[i]) != self.shards.parts[i].labels)))
        return self.instrument(counts) / self.n

    def max_weight(self) -> float:
        local = [float(np.max(w)) if w.size else 0.0 for w in self.weights]
        self.instrument(local)
        return max(local)


# ---------------------------- Protocols ---------------------------- #


def run_dist_smooth_boost(
    shards: Shards,
    config: BoostConfig,
    full_data: bool = False,
    count_instrumentation: bool = False,
    learner: Learner = train_stump,
    pivot: str = "local-medians",
    on_round: Optional[Callable[[int, Stump, Distribution], None]] = None,
) -> ProtocolReport:
    """Distributed smooth boosting; see the module docstring for the round shape."""
    state = _ProtocolState(shards, config, full_data, count_instrumentation)
    gamma, epsilon = config.gamma, config.epsilon
    members: List[Stump] = []
    records: List[RoundRecord] = []
    for t in range(1, config.num_rounds + 1):
        state.net.begin_round()
        sums = state.gather_weight_sums()
        if full_data:
            stump = learner(state.full_ds, state.full_weight_vector())
        else:
            union = state.sampled_union(t, sums)
            stump = learner(union, np.full(len(union), 1.0 / len(union)))
        state.net.broadcast(stump)
        members.append(stump)

        preds = [predict_dataset(stump, part) for part in shards.parts]
        edge = state.edge_of(preds)
        state.weights = [np.where(p == part.labels, w * (1.0 - gamma), w)
                         for p, part, w in zip(preds, shards.parts, state.weights)]
        sharded, z = distributed_normalize(ShardedWeights(state.weights), state.net)
        sharded = distributed_project(sharded, epsilon, state.net, pivot=pivot,
                                      seed=derive_rng(config.seed, t, 2).integers(2 ** 62))
        state.weights = sharded.shards

        train_err = state.vote_progress(preds)
        records.append(RoundRecord(t, edge, z, state.max_weight(), train_err))
        state.net.end_round()
        if on_round is not None:
            on_round(t, stump, Distribution(shards.flatten(state.weights)))
    return ProtocolReport(VotedEnsemble(members), state.net.stats, records,
                          state.n if full_data else config.sample_budget)


def run_dist_adaboost(
    shards: Shards,
    config: BoostConfig,
    full_data: bool = False,
    count_instrumentation: bool = False,
    learner: Learner = train_stump,
    on_round: Optional[Callable[[int, Stump, Distribution], None]] = None,
) -> ProtocolReport:
    """Same skeleton without the smoothness projection: plain AdaBoost weights.

    The stump weight alpha comes from the weighted error on what the center
    saw this round (the sampled union, or the exact weighted union in
    full-data mode); zero-error rounds use a fixed large alpha instead of
    infinity, and rounds no better than chance get alpha 0.
    """
    state = _ProtocolState(shards, config, full_data, count_instrumentation)
    members: List[Stump] = []
    alphas: List[float] = []
    records: List[RoundRecord] = []
    for t in range(1, config.num_rounds + 1):
        state.net.begin_round()
        sums = state.gather_weight_sums()
        if full_data:
            weight_vec = state.full_weight_vector()
            stump = learner(state.full_ds, weight_vec)
            pred_full = predict_dataset(stump, state.full_ds)
            err = float(np.sum(weight_vec * (pred_full != state.full_ds.labels)))
            err /= float(np.sum(weight_vec))
        else:
            union = state.sampled_union(t, sums)
            stump = learner(union, np.full(len(union), 1.0 / len(union)))
            err = float(np.mean(predict_dataset(stump, union) != union.labels))
        alpha = _ada_alpha(err)
        state.net.broadcast((stump, alpha))
        members.append(stump)
        alphas.append(alpha)

        preds = [predict_dataset(stump, part) for part in shards.parts]
        edge = state.edge_of(preds)
        state.weights = [w * np.exp(-alpha * part.labels * p)
                         for w, part, p in zip(state.weights, shards.parts, preds)]
        sharded, z = distributed_normalize(ShardedWeights(state.weights), state.net)
        state.weights = sharded.shards

        train_err = state.vote_progress(preds, alpha)
        records.append(RoundRecord(t, edge, z, state.max_weight(), train_err))
        state.net.end_round()
        if on_round is not None:
            on_round(t, stump, Distribution(shards.flatten(state.weights)))
    return ProtocolReport(VotedEnsemble(members, np.array(alphas)), state.net.stats,
                          records, state.n if full_data else config.sample_budget)


def _ada_alpha(err: float) -> float:
    if err <= 0.0:
        return _MAX_ALPHA
    if err >= 0.5:
        return 0.0
    return 0.5 * math.log((1.0 - err) / err)


# ---------------------------- Report export ---------------------------- #


def report_to_csv(report: ProtocolReport, directory, prefix: str = "") -> None:
    """Write {prefix}ensemble.csv, {prefix}rounds.csv, {prefix}comm.csv."""
    from pathlib import Path

    base = Path(directory)
    base.mkdir(parents=True, exist_ok=True)
    ensemble_to_csv(report.ensemble, base / f"{prefix}ensemble.csv")
    round_records_to_csv(report.rounds, base / f"{prefix}rounds.csv")
    comm_stats_to_csv(report.comm, base / f"{prefix}comm.csv")
