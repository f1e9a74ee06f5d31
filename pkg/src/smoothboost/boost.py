"""Centralized smooth boosting: multiplicative weights plus a smoothness projection.

The round loop keeps a distribution over training examples, multiplies the
weight of every correctly classified example by (1 - gamma), renormalizes,
and then projects (in relative entropy) onto the set of epsilon-smooth
distributions, i.e. those with no coordinate above 1/(epsilon * n).  The
final hypothesis is the unweighted majority vote of the per-round stumps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .data import LabeledDataset
from .weaklearn import (Stump, VotedEnsemble, predict_dataset, train_stump,
                        vote_sign, weighted_error)

# Relative slack on every "value exceeds the cap" comparison.  The distributed
# projection must take the same branches as the centralized scan, so both use
# this single predicate.
CAP_SLACK = 1e-12
# Absolute tolerance for "no mass left" / "no target mass left" in the scan.
MASS_TOL = 1e-12


def exceeds_cap(value: float, cap: float) -> bool:
    return value > cap * (1.0 + CAP_SLACK)


# ---------------------------- Distributions ---------------------------- #


@dataclass(frozen=True)
class Distribution:
    """Nonnegative weights summing to 1 (within 1e-9)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d array")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(float(np.sum(w)) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    @staticmethod
    def uniform(n: int) -> "Distribution":
        if n < 1:
            raise ValueError("n must be positive")
        return Distribution(np.full(n, 1.0 / n))


def smoothness_cap(epsilon: float, n: int) -> float:
    return 1.0 / (epsilon * n)


def is_smooth(dist: Distribution, epsilon: float, tol: float = 1e-9) -> bool:
    return float(np.max(dist.weights)) <= smoothness_cap(epsilon, dist.n) + tol


def relative_entropy(p: np.ndarray, q: np.ndarray) -> float:
    """RE(p || q) = sum_i p_i ln(p_i / q_i), with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError("shape mismatch")
    live = p > 0
    if np.any(q[live] <= 0):
        return math.inf
    return float(np.sum(p[live] * np.log(p[live] / q[live])))


# ---------------------------- Updates ---------------------------- #


def mw_update(dist: Distribution, losses: np.ndarray, gamma: float) -> Tuple[Distribution, float]:
    """Multiply weight i by (1 - gamma) where losses[i] = 1, renormalize.

    Returns the new distribution and the normalization factor Z.  In the
    boosting loop losses[i] = 1 means example i was classified correctly,
    so correct examples lose weight.
    """
    if not 0.0 < gamma <= 0.5:
        raise ValueError("gamma must be in (0, 1/2]")
    losses = np.asarray(losses)
    if losses.shape != dist.weights.shape:
        raise ValueError("losses must align with the distribution")
    if not np.all(np.isin(losses, (0, 1))):
        raise ValueError("losses must be 0 or 1")
    scaled = np.where(losses == 1, dist.weights * (1.0 - gamma), dist.weights)
    z = float(np.sum(scaled))
    return Distribution(scaled / z), z


def project_smooth(dist: Distribution, epsilon: float) -> Distribution:
    """Relative-entropy projection onto the epsilon-smooth distributions.

    Finds the least m such that clipping the m largest coordinates to
    1/(epsilon n) and rescaling the rest to total mass 1 - m/(epsilon n)
    leaves every coordinate at or below the cap.  The rescale factor is
    recomputed from the kept coordinates in source order so that the
    distributed protocol produces the identical floats on one shard.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    w = dist.weights
    n = w.size
    cap = smoothness_cap(epsilon, n)
    sw = np.sort(w)[::-1]
    suffix = np.concatenate((np.cumsum(sw[::-1])[::-1], [0.0]))  # suffix[m] = sum(sw[m:])

    for m in range(n + 1):
        target = 1.0 - m * cap
        if target < -MASS_TOL:
            break  # clipped mass alone exceeds 1; no larger m can work
        remaining = suffix[m]
        if remaining <= MASS_TOL:
            if target > MASS_TOL:
                continue  # mass deficit: nothing left to carry the target
            scale = 0.0
        else:
            scale = target / remaining
            if m < n and exceeds_cap(sw[m] * scale, cap):
                continue
        theta = -math.inf if m == n else float(sw[m])
        clip = w > theta
        if int(np.count_nonzero(clip)) != m:
            continue  # boundary would split a run of equal coordinates
        if m == n:
            out = np.full(n, cap)
        else:
            kept_mass = float(np.sum(w[~clip]))
            factor = 0.0 if kept_mass <= MASS_TOL else target / kept_mass
            out = np.where(clip, cap, w * factor)
        out = out / float(np.sum(out))
        result = Distribution(out)
        if not is_smooth(result, epsilon):
            raise AssertionError("projection produced a non-smooth distribution")
        return result
    raise ValueError(
        "projection infeasible: too little mass spread below the cap "
        "(requires enough positive coordinates for the target epsilon)")


# ---------------------------- Round budget ---------------------------- #


def auto_round_count(gamma: float, epsilon: float) -> int:
    """Rounds sufficient for the edge-gamma guarantee: ceil(2 ln(1/eps) / gamma^2) + 1."""
    if not 0.0 < gamma <= 0.5:
        raise ValueError("gamma must be in (0, 1/2]")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    return math.ceil(2.0 * math.log(1.0 / epsilon) / gamma ** 2) + 1


@dataclass(frozen=True)
class BoostConfig:
    """Shared knobs for the centralized and distributed boosting loops.

    gamma defaults to (1/2)(1/2 - beta); rounds="auto" uses the round budget
    formula above.  sample_budget is the per-round number of examples the
    center requests in the distributed protocol.
    """

    gamma: Optional[float] = None
    beta: float = 0.2
    epsilon: float = 0.1
    rounds: Union[int, str] = "auto"
    sample_budget: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.beta < 0.5:
            raise ValueError("beta must be in [0, 1/2)")
        if self.gamma is None:
            object.__setattr__(self, "gamma", 0.5 * (0.5 - self.beta))
        if not 0.0 < self.gamma <= 0.5:
            raise ValueError("gamma must be in (0, 1/2]")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must be in (0, 1)")
        if self.rounds != "auto" and (not isinstance(self.rounds, int) or self.rounds < 1):
            raise ValueError("rounds must be a positive integer or 'auto'")
        if self.sample_budget < 1:
            raise ValueError("sample_budget must be positive")

    @property
    def num_rounds(self) -> int:
        if self.rounds == "auto":
            return auto_round_count(self.gamma, self.epsilon)
        return self.rounds


@dataclass(frozen=True)
class RoundRecord:
    round: int
    edge: float  # 1/2 minus the stump's weighted error under this round's distribution
    z: float  # normalization factor of the multiplicative update
    max_weight: float  # largest coordinate after this round's projection/normalization
    train_err_so_far: float  # error of the vote over stumps 1..t


# ---------------------------- Boosting loop ---------------------------- #

Learner = Callable[[LabeledDataset, np.ndarray], Stump]


def run_smooth_boost(
    ds: LabeledDataset,
    config: BoostConfig,
    learner: Learner = train_stump,
    on_round: Optional[Callable[[int, Stump, Distribution], None]] = None,
) -> Tuple[VotedEnsemble, List[RoundRecord]]:
    """Run the full smooth-boosting loop on one in-memory dataset."""
    n = len(ds)
    if n == 0:
        raise ValueError("empty dataset")
    rounds = config.num_rounds
    dist = Distribution.uniform(n)
    members: List[Stump] = []
    records: List[RoundRecord] = []
    scores = np.zeros(n)
    for t in range(1, rounds + 1):
        stump = learner(ds, dist.weights)
        pred = predict_dataset(stump, ds)
        edge = 0.5 - weighted_error(stump, ds, dist.weights)
        updated, z = mw_update(dist, (pred == ds.labels).astype(np.int64), config.gamma)
        dist = project_smooth(updated, config.epsilon)
        members.append(stump)
        scores += pred
        train_err = float(np.mean(vote_sign(scores) != ds.labels))
        records.append(RoundRecord(t, edge, z, float(np.max(dist.weights)), train_err))
        if on_round is not None:
            on_round(t, stump, dist)
    return VotedEnsemble(members), records


def error_rate(ensemble: VotedEnsemble, ds: LabeledDataset) -> float:
    from .weaklearn import predict_ensemble_dataset

    if len(ds) == 0:
        raise ValueError("empty dataset")
    return float(np.mean(predict_ensemble_dataset(ensemble, ds) != ds.labels))


# ---------------------------- Serialization ---------------------------- #

ROUND_HEADER = "round,edge,z,max_weight,train_err_so_far"


def round_records_to_csv(records: List[RoundRecord], path) -> None:
    with open(path, "w") as fh:
        fh.write(ROUND_HEADER + "\n")
        for r in records:
            fh.write(f"{r.round},{r.edge!r},{r.z!r},{r.max_weight!r},{r.train_err_so_far!r}\n")


def round_records_from_csv(path) -> List[RoundRecord]:
    records = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != ROUND_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            if not line.strip():
                continue
            f = line.split(",")
            records.append(RoundRecord(int(f[0]), float(f[1]), float(f[2]),
                                       float(f[3]), float(f[4])))
    return records
