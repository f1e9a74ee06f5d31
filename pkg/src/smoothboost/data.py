"""Datasets: generation, parsing, noise injection, and sharding across entities."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .rng import make_rng


class ParseError(ValueError):
    """Raised when an input file does not follow the expected format."""


# ---------------------------- Core containers ---------------------------- #


@dataclass(frozen=True)
class LabeledDataset:
    """Dense feature matrix plus +-1 labels.

    Arrays are copied on construction and frozen so a dataset can be shared
    between simulated entities without aliasing surprises.
    """

    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64, values in {-1, +1}

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        y = np.array(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise ValueError("features must be a 2-d array")
        if y.shape != (X.shape[0],):
            raise ValueError("labels must be 1-d and match the number of rows")
        if not np.all(np.isin(y, (-1, 1))):
            raise ValueError("labels must be -1 or +1")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.features[indices], self.labels[indices])


@dataclass(frozen=True)
class Shards:
    """Disjoint pieces of one dataset, one per entity.

    `indices[i][j]` is the position in the source dataset of example j of
    shard i, so a sharded quantity can be flattened back into source order.
    """

    parts: List[LabeledDataset]
    indices: List[np.ndarray]

    def __post_init__(self):
        if len(self.parts) != len(self.indices):
            raise ValueError("parts and indices must align")
        for part, idx in zip(self.parts, self.indices):
            if len(part) != len(idx):
                raise ValueError("shard and index lengths must align")

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> int:
        return sum(len(p) for p in self.parts)

    def flatten(self, per_shard: List[np.ndarray]) -> np.ndarray:
        """Reassemble per-shard values into source order."""
        out = np.empty(self.total)
        for idx, values in zip(self.indices, per_shard):
            out[idx] = values
        return out


# ---------------------------- LibSVM parsing ---------------------------- #

# Raw label alphabets we accept, each mapped onto {-1, +1} by ascending order.
_LABEL_MAPS = [
    ({-1.0, 1.0}, {-1.0: -1, 1.0: 1}),
    ({0.0, 1.0}, {0.0: -1, 1.0: 1}),
    ({1.0, 2.0}, {1.0: -1, 2.0: 1}),
]


def parse_libsvm(text: str) -> LabeledDataset:
    """Parse LibSVM-style lines ``<label> <index>:<value> ...``.

    Indices are 1-based and must be strictly increasing within a line; the
    dataset dimension is the largest index seen anywhere.  Labels may use
    {-1,+1}, {0,1} or {1,2} and are normalized to {-1,+1}.
    """
    raw_labels: list[float] = []
    rows: list[list[tuple[int, float]]] = []
    max_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            label = float(fields[0])
        except ValueError:
            raise ParseError(f"line {lineno}: bad label {fields[0]!r}") from None
        pairs = []
        prev_index = 0
        for field in fields[1:]:
            if ":" not in field:
                raise ParseError(f"line {lineno}: expected index:value, got {field!r}")
            idx_text, _, val_text = field.partition(":")
            try:
                index = int(idx_text)
                value = float(val_text)
            except ValueError:
                raise ParseError(f"line {lineno}: bad feature {field!r}") from None
            if index < 1:
                raise ParseError(f"line {lineno}: feature indices are 1-based")
            if index <= prev_index:
                raise ParseError(f"line {lineno}: indices must be strictly increasing")
            prev_index = index
            pairs.append((index, value))
        max_index = max(max_index, prev_index)
        raw_labels.append(label)
        rows.append(pairs)
    if not rows:
        raise ParseError("empty input")
    if max_index == 0:
        raise ParseError("no features present")

    seen = set(raw_labels)
    for alphabet, mapping in _LABEL_MAPS:
        if seen <= alphabet:
            labels = [mapping[v] for v in raw_labels]
            break
    else:
        raise ParseError(f"unsupported label alphabet {sorted(seen)}")

    X = np.zeros((len(rows), max_index))
    for i, pairs in enumerate(rows):
        for index, value in pairs:
            X[i, index - 1] = value
    return LabeledDataset(X, np.array(labels))


# ---------------------------- Synthetic data ---------------------------- #


def gen_long_servedio(n: int, seed: int) -> LabeledDataset:
    """Sample the 21-dimensional pattern mixture that defeats convex boosters.

    Each example draws a uniform +-1 label y, then one of three branches:
    with probability 1/4 every coordinate equals y; with probability 1/4 the
    first 11 coordinates equal y and the last 10 equal -y; with probability
    1/2 a random 5-subset of the first 11 and a random 6-subset of the last
    10 equal y and the rest equal -y.  The clean mixture is linearly
    separable (the majority vote over all 21 coordinates is always right).
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(seed)
    y = rng.integers(0, 2, size=n) * 2 - 1
    branch = rng.choice(3, size=n, p=(0.25, 0.25, 0.5))
    X = np.repeat(-y[:, None], 21, axis=1).astype(np.float64)

    a = branch == 0
    X[a] = np.repeat(y[a][:, None], 21, axis=1)

    b = branch == 1
    X[b, :11] = np.repeat(y[b][:, None], 11, axis=1)

    c = np.flatnonzero(branch == 2)
    if c.size:
        # argsort of iid uniforms = uniform random permutation per row
        head = rng.random((c.size, 11)).argsort(axis=1)[:, :5]
        tail = rng.random((c.size, 10)).argsort(axis=1)[:, :6] + 11
        rows = np.repeat(c, 5)
        X[rows, head.ravel()] = y[c].repeat(5)
        rows = np.repeat(c, 6)
        X[rows, tail.ravel()] = y[c].repeat(6)
    return LabeledDataset(X, y)


def inject_label_noise(ds: LabeledDataset, rate: float, seed: int) -> LabeledDataset:
    """Flip each label independently with probability `rate`."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("noise rate must be in [0, 1]")
    rng = make_rng(seed)
    flip = rng.random(len(ds)) < rate
    labels = np.where(flip, -ds.labels, ds.labels)
    return LabeledDataset(ds.features, labels)


# ---------------------------- Splits and shards ---------------------------- #


def split_train_test(ds: LabeledDataset, train_frac: float, seed: int):
    """Random split with ceil(n * train_frac) training examples."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must be strictly between 0 and 1")
    order = make_rng(seed).permutation(len(ds))
    n_train = int(np.ceil(len(ds) * train_frac))
    if n_train >= len(ds):
        raise ValueError("split leaves an empty test set")
    return ds.subset(order[:n_train]), ds.subset(order[n_train:])


PARTITION_STRATEGIES = ("uniform", "by-label", "round-robin")


def partition(ds: LabeledDataset, k: int, strategy: str = "uniform", seed: int = 0) -> Shards:
    """Split a dataset into k shards.

    uniform: random shuffle, near-equal contiguous chunks.
    by-label: stable sort by label, contiguous chunks (skews label marginals).
    round-robin: example i goes to shard i mod k.
    """
    n = len(ds)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if strategy not in PARTITION_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if k == 1:
        chunks = [np.arange(n)]
    elif strategy == "round-robin":
        chunks = [np.arange(j, n, k) for j in range(k)]
    else:
        if strategy == "uniform":
            order = make_rng(seed).permutation(n)
        else:
            order = np.argsort(ds.labels, kind="stable")
        chunks = np.array_split(order, k)
    return Shards([ds.subset(idx) for idx in chunks], [np.asarray(idx) for idx in chunks])


# ---------------------------- Serialization ---------------------------- #


def dataset_to_csv(ds: LabeledDataset, path) -> None:
    """Write `label,f1,...,fd` rows; floats use repr so values round-trip."""
    with open(path, "w") as fh:
        fh.write("label," + ",".join(f"f{j + 1}" for j in range(ds.dim)) + "\n")
        for x, y in zip(ds.features, ds.labels):
            fh.write(f"{int(y)}," + ",".join(_fmt(v) for v in x) + "\n")


def dataset_to_libsvm(ds: LabeledDataset, path) -> None:
    """Write ``<label> <index>:<value>`` lines, omitting exact zeros."""
    with open(path, "w") as fh:
        for x, y in zip(ds.features, ds.labels):
            pairs = " ".join(f"{j + 1}:{_fmt(v)}" for j, v in enumerate(x) if v != 0.0)
            fh.write(f"{int(y):+d} {pairs}".rstrip() + "\n")


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)
