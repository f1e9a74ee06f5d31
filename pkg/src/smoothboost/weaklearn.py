"""Decision stumps: exact weighted training, voting ensembles, serialization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .data import LabeledDataset, ParseError


@dataclass(frozen=True)
class Stump:
    """Predict `polarity` where x[feature] > threshold, else -polarity."""

    feature: int
    threshold: float
    polarity: int

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError("polarity must be -1 or +1")
        if self.feature < 0:
            raise ValueError("feature index must be nonnegative")


@dataclass(frozen=True)
class VotedEnsemble:
    """Sign of the (optionally alpha-weighted) mean member vote; sign(0) = +1."""

    members: List[Stump]
    alphas: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.alphas is not None:
            alphas = np.array(self.alphas, dtype=np.float64)
            if alphas.shape != (len(self.members),):
                raise ValueError("alphas must align with members")
            object.__setattr__(self, "alphas", alphas)


# ---------------------------- Prediction ---------------------------- #


def predict(stump: Stump, x: np.ndarray) -> int:
    x = np.asarray(x)
    if stump.feature >= x.shape[-1]:
        raise ValueError("stump feature index exceeds example dimension")
    return stump.polarity if x[stump.feature] > stump.threshold else -stump.polarity


def predict_dataset(stump: Stump, ds: LabeledDataset) -> np.ndarray:
    if stump.feature >= ds.dim:
        raise ValueError("stump feature index exceeds dataset dimension")
    return np.where(ds.features[:, stump.feature] > stump.threshold,
                    stump.polarity, -stump.polarity)


def ensemble_scores(ensemble: VotedEnsemble, ds: LabeledDataset) -> np.ndarray:
    """Sum of member votes, alpha-weighted when alphas are present."""
    if not ensemble.members:
        raise ValueError("empty ensemble")
    scores = np.zeros(len(ds))
    for t, member in enumerate(ensemble.members):
        vote = predict_dataset(member, ds)
        scores += vote if ensemble.alphas is None else ensemble.alphas[t] * vote
    return scores


def predict_ensemble_dataset(ensemble: VotedEnsemble, ds: LabeledDataset) -> np.ndarray:
    return vote_sign(ensemble_scores(ensemble, ds))


def predict_ensemble(ensemble: VotedEnsemble, x: np.ndarray) -> int:
    score = 0.0
    for t, member in enumerate(ensemble.members):
        vote = predict(member, x)
        score += vote if ensemble.alphas is None else ensemble.alphas[t] * vote
    return 1 if score >= 0 else -1


def vote_sign(scores: np.ndarray) -> np.ndarray:
    # ties go to +1
    return np.where(scores >= 0, 1, -1)


def weighted_error(stump: Stump, ds: LabeledDataset, weights: np.ndarray) -> float:
    """Total weight of misclassified examples (weights need not be normalized)."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (len(ds),):
        raise ValueError("weights must align with the dataset")
    mistakes = predict_dataset(stump, ds) != ds.labels
    return float(np.sum(weights * mistakes))


# ---------------------------- Training ---------------------------- #


def train_stump(ds: LabeledDataset, weights: np.ndarray) -> Stump:
    """Exact minimizer of weighted error over all (feature, threshold, polarity).

    Candidate thresholds per feature are -inf, the midpoints between
    consecutive distinct sorted values, and +inf, which covers every
    distinct labeling a stump can realize.  Ties break deterministically:
    lowest feature, then lowest threshold, then polarity +1 first.
    """
    if len(ds) == 0:
        raise ValueError("empty dataset")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (len(ds),):
        raise ValueError("weights must align with the dataset")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = float(np.sum(w))
    if total <= 0.0:
        raise ValueError("weights must have positive total mass")

    pos_w = np.where(ds.labels == 1, w, 0.0)
    neg_w = np.where(ds.labels == -1, w, 0.0)
    best_err = np.inf
    best = None
    for f in range(ds.dim):
        values = ds.features[:, f]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        # prefix[c] = weight mass among the c smallest values
        pos_prefix = np.concatenate(([0.0], np.cumsum(pos_w[order])))
        neg_prefix = np.concatenate(([0.0], np.cumsum(neg_w[order])))
        neg_total = neg_prefix[-1]

        distinct = np.flatnonzero(sv[1:] != sv[:-1]) + 1
        cuts = np.concatenate(([0], distinct, [len(sv)]))
        thresholds = np.concatenate(
            ([-np.inf], (sv[distinct - 1] + sv[distinct]) / 2.0, [np.inf]))

        # threshold at cut c sends the c smallest values to -polarity
        err_plus = pos_prefix[cuts] + (neg_total - neg_prefix[cuts])
        errs = np.column_stack((err_plus, total - err_plus)).ravel()
        at = int(np.argmin(errs))  # first minimum respects the tie order
        if errs[at] < best_err:
            best_err = errs[at]
            best = Stump(f, float(thresholds[at // 2]), 1 if at % 2 == 0 else -1)
    return best


# ---------------------------- Serialization ---------------------------- #


def ensemble_to_csv(ensemble: VotedEnsemble, path) -> None:
    """One `feature,threshold,polarity[,alpha]` line per member, no header."""
    with open(path, "w") as fh:
        for t, member in enumerate(ensemble.members):
            row = f"{member.feature},{repr(member.threshold)},{member.polarity}"
            if ensemble.alphas is not None:
                row += f",{repr(float(ensemble.alphas[t]))}"
            fh.write(row + "\n")


def ensemble_from_csv(path) -> VotedEnsemble:
    members = []
    alphas = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) not in (3, 4):
                raise ParseError(f"expected 3 or 4 fields, got {line!r}")
            members.append(Stump(int(fields[0]), float(fields[1]), int(fields[2])))
            if len(fields) == 4:
                alphas.append(float(fields[3]))
    if alphas and len(alphas) != len(members):
        raise ParseError("mixed weighted and unweighted rows")
    return VotedEnsemble(members, np.array(alphas) if alphas else None)
