from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..graphs import Graph
from ..pseudorandom import SeedBudget

MAX_ROUNDS = 100_000


@dataclass
class SpreadTrace:
    protocol: str
    n: int
    source: int
    T: int | None
    informed_counts: list[int] = field(default_factory=list)
    transmissions: list[int] = field(default_factory=list)
    newly_informed: list[list[int]] = field(default_factory=list)
    completion_round: int | None = None
    ids: list[int] | None = None
    budget: SeedBudget = field(default_factory=SeedBudget)
    extras: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return len(self.transmissions)

    @property
    def success(self) -> bool:
        return self.completion_round is not None

    @property
    def bits(self) -> int:
        return self.budget.bits_drawn

    def informed_after(self, t: int) -> set[int]:
        out = {self.source}
        for batch in self.newly_informed[:t]:
            out.update(batch)
        return out

    def to_dict(self) -> dict:
        return {"protocol": self.protocol, "n": self.n, "source": self.source, "T": self.T,
                "completion_round": self.completion_round, "informed_counts": self.informed_counts,
                "transmissions": self.transmissions, "newly_informed": self.newly_informed,
                "ids": self.ids, "budget": self.budget.to_dict(), "extras": self.extras}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)

    def summary_row(self, trial: int) -> dict:
        rounds = self.completion_round if self.success else self.rounds
        return {"trial": trial, "rounds": rounds, "bits": self.bits, "success": int(self.success)}


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x)}")


class SpreadState:
    """Informed set, IDs and budget of one run; informed only grows."""

    def __init__(self, g: Graph, source: int, protocol: str, T: int | None, with_ids: bool = False):
        if not 0 <= source < g.n:
            raise ValueError("source outside the node range")
        self.g = g
        self.informed = np.zeros(g.n, dtype=bool)
        self.informed[source] = True
        self.t = 0
        self.ids = np.full(g.n, -1, dtype=np.int64) if with_ids else None
        if with_ids:
            self.ids[source] = 0
        self.trace = SpreadTrace(protocol, g.n, source, T, informed_counts=[1])
        if g.n == 1:
            self.trace.completion_round = 0

    @property
    def budget(self) -> SeedBudget:
        return self.trace.budget

    @property
    def complete(self) -> bool:
        return bool(self.informed.all())

    @property
    def uninformed(self) -> np.ndarray:
        return np.flatnonzero(~self.informed)

    def finish_round(self, new_nodes, transmissions: int) -> None:
        new_nodes = np.unique(np.asarray(new_nodes, dtype=np.int64))
        new_nodes = new_nodes[~self.informed[new_nodes]]
        self.informed[new_nodes] = True
        self.t += 1
        tr = self.trace
        tr.newly_informed.append(new_nodes.tolist())
        tr.transmissions.append(int(transmissions))
        tr.informed_counts.append(int(self.informed.sum()))
        if tr.completion_round is None and self.complete:
            tr.completion_round = self.t

    def assign_ids(self, senders: np.ndarray, targets: np.ndarray, capacity_bits: int | None = None) -> None:
        """New node gets 2^(t-1) + (smallest informer ID) for round t = self.t + 1."""
        fresh = ~self.informed[targets]
        if not fresh.any():
            return
        t = self.t + 1
        if capacity_bits is not None and t > capacity_bits:
            raise OverflowError(f"round {t} IDs exceed the {capacity_bits}-bit ID space")
        cand = np.full(self.g.n, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(cand, targets[fresh], self.ids[senders[fresh]])
        hit = cand < np.iinfo(np.int64).max
        self.ids[hit] = (1 << (t - 1)) + cand[hit]

    def close(self) -> SpreadTrace:
        if self.ids is not None:
            self.trace.ids = self.ids.tolist()
        return self.trace


def round_limit(T: int | None) -> int:
    return MAX_ROUNDS if T is None else int(T)
