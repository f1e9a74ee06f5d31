"""Distributed median and smoothness projection over sharded weights.

Entities hold disjoint weight shards; the center never sees raw vectors.
Each entity keeps its shard sorted locally and tracks the surviving
candidate range as a window into that order, so every probe answers with a
couple of binary searches and O(1) prefix-sum lookups.

The median runs a counting elimination loop: the center proposes a pivot
that is guaranteed to be a live element (the size-weighted median of the
local medians, or a random element in the quickselect variant), entities
report how their windows split around it, and the center either answers or
recurses into the side holding the target rank.  Exact rank bookkeeping
makes the result identical to the sorted-union median even with heavy
duplicates, where trimming equal counts off both extremes can evict the
true median.

The projection binary-searches candidate thresholds by that median, keeping
running totals of the coordinates committed to clipping, and finally
broadcasts the boundary and rescale factor.  The rescale factor is computed
from the kept mass in source order, matching the centralized scan bit for
bit when everything lives on one shard.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .boost import MASS_TOL, exceeds_cap, smoothness_cap
from .netsim import CENTER, Network, entity
from .rng import make_rng

PIVOT_MODES = ("local-medians", "random")

# branch codes broadcast after every probe
_KEEP_GT = 0
_KEEP_LT = 1
_KEEP_LT_REPORT_MAX_BELOW = 2


@dataclass
class ShardedWeights:
    """One 1-d weight array per entity."""

    shards: List[np.ndarray]

    def __post_init__(self):
        arrays = []
        for shard in self.shards:
            arr = np.array(shard, dtype=np.float64)
            if arr.ndim != 1:
                raise ValueError("each shard must be a 1-d array")
            arrays.append(arr)
        if not arrays:
            raise ValueError("need at least one shard")
        self.shards = arrays

    @property
    def k(self) -> int:
        return len(self.shards)

    @property
    def n(self) -> int:
        return sum(shard.size for shard in self.shards)

    def total_mass(self) -> float:
        return float(sum(float(np.sum(shard)) for shard in self.shards))

    def concat(self) -> np.ndarray:
        return np.concatenate(self.shards)


class _EntityView:
    """Entity-local search state: sorted copy plus a candidate window."""

    __slots__ = ("original", "order", "prefix", "lo", "hi")

    def __init__(self, values: np.ndarray):
        self.original = values
        self.order = np.sort(values)
        self.prefix = np.concatenate(([0.0], np.cumsum(self.order)))
        self.lo = 0
        self.hi = values.size

    @property
    def size(self) -> int:
        return self.hi - self.lo

    def split(self, theta: float, lo: int, hi: int) -> Tuple[int, int]:
        """Window positions (first >= theta, first > theta) clamped to [lo, hi)."""
        left = int(np.searchsorted(self.order, theta, side="left"))
        right = int(np.searchsorted(self.order, theta, side="right"))
        return min(max(left, lo), hi), min(max(right, lo), hi)

    def window_median(self, lo: int, hi: int) -> float:
        # lower median: ascending rank ceil(size / 2)
        return float(self.order[lo + (hi - lo + 1) // 2 - 1])

    def probe_stats(self, theta: float) -> Tuple[int, int, int, float, float, float]:
        """Counts and masses of the window split (below, equal, above theta)."""
        left, right = self.split(theta, self.lo, self.hi)
        below = left - self.lo
        equal = right - left
        above = self.hi - right
        mass_below = float(self.prefix[left] - self.prefix[self.lo])
        mass_equal = float(self.prefix[right] - self.prefix[left])
        mass_above = float(self.prefix[self.hi] - self.prefix[right])
        return below, equal, above, mass_below, mass_equal, mass_above

    def restrict(self, theta: float, keep_lt: bool) -> None:
        left, right = self.split(theta, self.lo, self.hi)
        if keep_lt:
            self.hi = left
        else:
            self.lo = right

    def max_below(self, theta: float) -> float:
        """Largest original value strictly below theta, -inf when none exists."""
        i = int(np.searchsorted(self.order, theta, side="left"))
        return float(self.order[i - 1]) if i > 0 else -math.inf


# ---------------------------- Distributed median ---------------------------- #


def _weighted_lower_median(pairs: List[Tuple[float, int]]) -> float:
    """Smallest value whose cumulative size reaches half the total."""
    pairs = sorted(pairs)
    total = sum(size for _, size in pairs)
    threshold = (total + 1) // 2
    cum = 0
    for value, size in pairs:
        cum += size
        if cum >= threshold:
            return value
    raise AssertionError("unreachable: empty weighted median input")


def _select_rank(
    views: List[_EntityView],
    net: Network,
    rank: int,
    pivot: str = "local-medians",
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Value of ascending rank `rank` within the current candidate windows.

    Works on scratch copies of the window bounds so a caller's candidate
    state survives the search.  Every iteration eliminates at least the
    pivot itself, and the center needs only O(k) words per iteration.
    """
    bounds = [(v.lo, v.hi) for v in views]
    sizes = [hi - lo for lo, hi in bounds]
    remaining = sum(sizes)
    if not 1 <= rank <= remaining:
        raise ValueError("rank out of range")
    while True:
        if pivot == "random":
            # center draws an entity by window size and asks it for a
            # uniformly random live element
            p = np.asarray(sizes, dtype=np.float64)
            j = int(rng.choice(len(views), p=p / p.sum()))
            net.send(CENTER, entity(j), 1)
            lo, hi = bounds[j]
            theta = float(views[j].order[int(rng.integers(lo, hi))])
            net.send(entity(j), CENTER, theta)
        else:
            pairs = []
            for i, view in enumerate(views):
                lo, hi = bounds[i]
                if hi > lo:
                    med = view.window_median(lo, hi)
                    net.send(entity(i), CENTER, med)
                    pairs.append((med, hi - lo))
            theta = _weighted_lower_median(pairs)
        net.broadcast(theta)

        splits = []
        count_lt = count_eq = 0
        for i, view in enumerate(views):
            lo, hi = bounds[i]
            if hi == lo:
                splits.append((lo, lo))
                continue
            left, right = view.split(theta, lo, hi)
            splits.append((left, right))
            net.send(entity(i), CENTER, (left - lo, right - left))
            count_lt += left - lo
            count_eq += right - left

        if rank <= count_lt:
            net.broadcast(_KEEP_LT)
            bounds = [(lo, left) for (lo, _), (left, _) in zip(bounds, splits)]
        elif rank <= count_lt + count_eq:
            return theta
        else:
            net.broadcast(_KEEP_GT)
            rank -= count_lt + count_eq
            bounds = [(right, hi) for (_, hi), (_, right) in zip(bounds, splits)]
        sizes = [hi - lo for lo, hi in bounds]
        remaining = sum(sizes)


def distributed_median(
    sw: ShardedWeights,
    net: Optional[Network] = None,
    pivot: str = "local-medians",
    seed: Optional[int] = None,
) -> float:
    """Lower median (ascending rank ceil(n/2)) of the union of all shards."""
    if pivot not in PIVOT_MODES:
        raise ValueError(f"unknown pivot mode {pivot!r}")
    n = sw.n
    if n == 0:
        raise ValueError("median of an empty multiset")
    net = net or Network(sw.k)
    rng = make_rng(0 if seed is None else seed) if pivot == "random" else None
    views = [_EntityView(shard) for shard in sw.shards]
    net.gather([view.size for view in views])
    return _select_rank(views, net, (n + 1) // 2, pivot=pivot, rng=rng)


# ---------------------------- Distributed normalize ---------------------------- #


def distributed_normalize(
    sw: ShardedWeights, net: Optional[Network] = None
) -> Tuple[ShardedWeights, float]:
    """Divide every shard by the global sum; returns (result, global sum)."""
    net = net or Network(sw.k)
    sums = net.gather([float(np.sum(shard)) for shard in sw.shards])
    total = float(sum(sums))
    if total <= 0.0:
        raise ValueError("cannot normalize: total mass is not positive")
    net.broadcast(total)
    return ShardedWeights([shard / total for shard in sw.shards]), total


# ---------------------------- Distributed projection ---------------------------- #


def distributed_project(
    sw: ShardedWeights,
    epsilon: float,
    net: Optional[Network] = None,
    pivot: str = "local-medians",
    seed: Optional[int] = None,
    trace: Optional[list] = None,
) -> ShardedWeights:
    """Project sharded weights onto the epsilon-smooth set without pooling them.

    Matches `boost.project_smooth` applied to the concatenated vector.  Each
    probe takes the median of the surviving candidate thresholds, so the
    candidate set at least halves per probe and the word cost stays
    O(k log^2 n).  `trace`, when given, collects one dict per probe.
    """
    if pivot not in PIVOT_MODES:
        raise ValueError(f"unknown pivot mode {pivot!r}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    for shard in sw.shards:
        if shard.size and float(np.min(shard)) < 0.0:
            raise ValueError("weights must be nonnegative")
    n = sw.n
    if n == 0:
        raise ValueError("cannot project an empty weight vector")
    if abs(sw.total_mass() - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1 before projection")

    net = net or Network(sw.k)
    rng = make_rng(0 if seed is None else seed) if pivot == "random" else None
    cap = smoothness_cap(epsilon, n)
    views = [_EntityView(shard) for shard in sw.shards]
    net.gather([view.size for view in views])

    clipped_count = 0
    clipped_mass = 0.0
    theta = math.inf
    candidates = n
    while candidates > 0:
        theta = _select_rank(views, net, (candidates + 1) // 2, pivot=pivot, rng=rng)
        below = equal = above = 0
        mass_equal = mass_above = 0.0
        for i, view in enumerate(views):
            if view.size == 0:
                continue
            stats = view.probe_stats(theta)
            net.send(entity(i), CENTER, stats)
            below += stats[0]
            equal += stats[1]
            above += stats[2]
            mass_equal += stats[4]
            mass_above += stats[5]

        # feasibility of placing the clip boundary at theta: everything above
        # gets the cap, theta itself scales; must_clip means theta overflows
        target = 1.0 - (clipped_count + above) * cap
        denom = 1.0 - (clipped_mass + mass_above)
        if denom <= MASS_TOL:
            scale = math.inf
            must_clip = target > MASS_TOL
        else:
            scale = target / denom
            must_clip = exceeds_cap(theta * scale, cap)
        if trace is not None:
            trace.append({"theta": theta, "L": below, "M": equal, "H": above,
                          "m0": scale, "branch": "clip" if must_clip else "keep"})

        if must_clip:
            clipped_count += above + equal
            clipped_mass += mass_above + mass_equal
            if below == 0:
                net.broadcast(_KEEP_LT_REPORT_MAX_BELOW)
                reports = net.gather([view.max_below(theta) for view in views])
                for view in views:
                    view.restrict(theta, keep_lt=True)
                theta = max(reports)
            else:
                net.broadcast(_KEEP_LT)
                for view in views:
                    view.restrict(theta, keep_lt=True)
            candidates = below
        else:
            net.broadcast(_KEEP_GT)
            for view in views:
                view.restrict(theta, keep_lt=False)
            candidates = above

    return _finalize(views, net, theta, clipped_count, cap)


def _finalize(
    views: List[_EntityView],
    net: Network,
    theta: float,
    clipped_count: int,
    cap: float,
) -> ShardedWeights:
    actual_above = sum(int(np.count_nonzero(view.original > theta)) for view in views)
    if actual_above != clipped_count:
        raise AssertionError("projection bookkeeping lost track of the clip set")

    target = 1.0 - clipped_count * cap
    if theta == -math.inf:
        # every coordinate is clipped; only consistent when the caps alone
        # carry the whole mass (epsilon == 1)
        if abs(target) > MASS_TOL:
            raise ValueError(
                "projection infeasible: too little mass spread below the cap "
                "(requires enough positive coordinates for the target epsilon)")
        outputs = [np.full(view.original.size, cap) for view in views]
    else:
        kept = net.gather(
            [float(np.sum(view.original[view.original <= theta])) for view in views])
        kept_mass = float(sum(kept))
        if target < -MASS_TOL or (kept_mass <= MASS_TOL and target > MASS_TOL):
            raise ValueError(
                "projection infeasible: too little mass spread below the cap "
                "(requires enough positive coordinates for the target epsilon)")
        factor = 0.0 if kept_mass <= MASS_TOL else target / kept_mass
        net.broadcast((theta, factor))
        outputs = [np.where(view.original > theta, cap, view.original * factor)
                   for view in views]

    sums = net.gather([float(np.sum(out)) for out in outputs])
    total = float(sum(sums))
    net.broadcast(total)
    outputs = [out / total for out in outputs]
    high = max(float(np.max(out)) if out.size else 0.0 for out in outputs)
    if high > cap * (1.0 + 1e-9):
        raise AssertionError("projection produced a non-smooth distribution")
    return ShardedWeights(outputs)


TRACE_HEADER = "theta,L,M,H,m0,branch"


def projection_trace_to_csv(trace: List[dict], path) -> None:
    """Write the per-probe debug trace collected by distributed_project."""
    with open(path, "w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for row in trace:
            fh.write(f"{row['theta']!r},{row['L']},{row['M']},{row['H']},"
                     f"{row['m0']!r},{row['branch']}\n")
