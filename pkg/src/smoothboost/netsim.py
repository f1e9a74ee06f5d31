"""Star-topology message accounting for the simulated protocols.

Every protocol message flows through a Network, which prices payloads in
words: a scalar costs 1, a length-d vector costs d, a labeled example costs
d + 1, a stump costs 3, and a sequence costs the sum of its parts.  The
simulator delivers payloads by returning them to the caller; only the
bookkeeping is real.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .weaklearn import Stump


class TopologyError(ValueError):
    """Raised when a message does not follow the star topology."""


@dataclass(frozen=True)
class Endpoint:
    kind: str  # "center" or "entity"
    index: Optional[int] = None


CENTER = Endpoint("center")


def entity(i: int) -> Endpoint:
    if i < 0:
        raise ValueError("entity index must be nonnegative")
    return Endpoint("entity", i)


def payload_words(payload) -> int:
    """Total word cost of a payload; raises on unpriceable types."""
    if isinstance(payload, Stump):
        return 3
    if isinstance(payload, (bool, int, float, np.integer, np.floating, np.bool_)):
        return 1
    if isinstance(payload, np.ndarray):
        return int(payload.size)
    if isinstance(payload, (list, tuple)):
        return sum(payload_words(part) for part in payload)
    raise TypeError(f"no word cost defined for {type(payload).__name__}")


@dataclass
class CommStats:
    words: int = 0
    messages: int = 0
    rounds: int = 0
    per_round: List[Tuple[int, int]] = field(default_factory=list)  # (round, words)


class Network:
    """Counts messages between k entities and one center; rejects all else."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("need at least one entity")
        self.k = k
        self.stats = CommStats()
        self._round_open = False
        self._words_at_begin = 0

    # ----- message passing ----- #

    def send(self, src: Endpoint, dst: Endpoint, payload):
        """Account a point-to-point message and hand the payload to the caller."""
        self._check_endpoint(src)
        self._check_endpoint(dst)
        if (src.kind == "center") == (dst.kind == "center"):
            raise TopologyError(f"only entity<->center messages are allowed "
                                f"({src.kind} -> {dst.kind})")
        self.stats.words += payload_words(payload)
        self.stats.messages += 1
        return payload

    def broadcast(self, payload):
        """Center-to-all-entities send; costs k times the payload."""
        self.stats.words += self.k * payload_words(payload)
        self.stats.messages += self.k
        return payload

    def gather(self, payloads):
        """One send per entity, center-bound; `payloads[i]` comes from entity i."""
        if len(payloads) != self.k:
            raise ValueError("gather needs one payload per entity")
        for i, payload in enumerate(payloads):
            self.send(entity(i), CENTER, payload)
        return list(payloads)

    # ----- round brackets ----- #

    def begin_round(self) -> None:
        if self._round_open:
            raise ValueError("round already open")
        self._round_open = True
        self._words_at_begin = self.stats.words

    def end_round(self) -> None:
        if not self._round_open:
            raise ValueError("no open round")
        self._round_open = False
        self.stats.rounds += 1
        self.stats.per_round.append(
            (self.stats.rounds, self.stats.words - self._words_at_begin))

    # ----- helpers ----- #

    def _check_endpoint(self, ep: Endpoint) -> None:
        if ep.kind == "center":
            return
        if ep.kind == "entity" and ep.index is not None and 0 <= ep.index < self.k:
            return
        raise TopologyError(f"bad endpoint {ep!r} for k={self.k}")


# ---------------------------- Serialization ---------------------------- #

COMM_HEADER = "round,words"
COMM_SUMMARY_HEADER = "total_words,total_messages,total_rounds"


def comm_stats_to_csv(stats: CommStats, path) -> None:
    """Per-round rows, then a two-line total summary."""
    with open(path, "w") as fh:
        fh.write(COMM_HEADER + "\n")
        for rnd, words in stats.per_round:
            fh.write(f"{rnd},{words}\n")
        fh.write(COMM_SUMMARY_HEADER + "\n")
        fh.write(f"{stats.words},{stats.messages},{stats.rounds}\n")


def comm_stats_from_csv(path) -> CommStats:
    stats = CommStats()
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != COMM_HEADER:
        raise ValueError("unexpected comm header")
    i = 1
    while i < len(lines) and lines[i] != COMM_SUMMARY_HEADER:
        rnd, words = lines[i].split(",")
        stats.per_round.append((int(rnd), int(words)))
        i += 1
    if i + 1 >= len(lines):
        raise ValueError("missing comm summary")
    words, messages, rounds = lines[i + 1].split(",")
    stats.words, stats.messages, stats.rounds = int(words), int(messages), int(rounds)
    return stats
