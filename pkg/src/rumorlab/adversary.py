"""Adjacency-list orderings that defeat protocols using few random bits.

Protocols are explicit tables f(x, u, t) in [deg(u)] over seeds x in [2^l],
nodes u and rounds t, read as an index into u's (ordered) true neighbor list.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graphs import Graph

ENUM_BUDGET = 1 << 24


class Infeasible(Exception):
    pass


@dataclass
class TabulatedProtocol:
    l: int
    T: int
    push: np.ndarray | None = None  # (2^l, n, T)
    pull: np.ndarray | None = None

    def __post_init__(self):
        if self.push is None and self.pull is None:
            raise ValueError("need a push table, a pull table, or both")
        for tab in (self.push, self.pull):
            if tab is not None and (tab.ndim != 3 or tab.shape[0] != 1 << self.l or tab.shape[2] != self.T):
                raise ValueError("table shape must be (2^l, n, T)")

    def check_range(self, g: Graph) -> None:
        for tab in (self.push, self.pull):
            if tab is not None and ((tab < 0).any() or (tab >= g.deg[None, :, None]).any()):
                raise ValueError("table entry outside [deg(u)]")

    @property
    def mode(self) -> str:
        if self.push is not None and self.pull is not None:
            return "push-pull"
        return "push" if self.push is not None else "pull"

    @classmethod
    def from_function(cls, fn: Callable[[int, int, int, int], int], l: int, T: int, g: Graph,
                      mode: str = "push") -> "TabulatedProtocol":
        tab = np.array([[[fn(x, u, t, int(g.deg[u])) for t in range(T)] for u in range(g.n)]
                        for x in range(1 << l)], dtype=np.int64)
        if mode == "push-pull":
            return cls(l, T, push=tab, pull=tab.copy())
        return cls(l, T, **{mode: tab})

    @classmethod
    def random(cls, l: int, T: int, g: Graph, rng: np.random.Generator, mode: str = "push") -> "TabulatedProtocol":
        def draw():
            return (rng.random((1 << l, g.n, T)) * g.deg[None, :, None]).astype(np.int64)
        if mode == "push-pull":
            return cls(l, T, push=draw(), pull=draw())
        return cls(l, T, **{mode: draw()})

    def index_sets(self, which: str) -> list[set[int]]:
        tab = self.push if which == "push" else self.pull
        return [set(tab[:, u, :].ravel().tolist()) for u in range(tab.shape[1])]


def pairwise_push_table(g: Graph, T: int, p: int) -> TabulatedProtocol:
    """Push to ((a (u + n t) + b) mod p) mod deg(u) with seed bits split into (a, b), each reduced mod p."""
    bits = (p - 1).bit_length()
    l = 2 * bits

    def fn(x, u, t, d):
        a, b = (x >> bits) % p, (x & ((1 << bits) - 1)) % p
        return ((a * (u + g.n * t) + b) % p) % d
    return TabulatedProtocol.from_function(fn, l, T, g)


def simulate_table(g: Graph, P: TabulatedProtocol, s: int, x: int) -> list[np.ndarray]:
    """Informed indicator after each round (index 0 = start) for seed x."""
    informed = np.zeros(g.n, dtype=bool)
    informed[s] = True
    history = [informed.copy()]
    for t in range(P.T):
        before = informed.copy()
        for u in range(g.n):
            if before[u] and P.push is not None:
                informed[g.lists[u][P.push[x, u, t]]] = True
            elif not before[u] and P.pull is not None:
                if before[g.lists[u][P.pull[x, u, t]]]:
                    informed[u] = True
        history.append(informed.copy())
    return history


@dataclass
class AdversaryResult:
    ordering: Graph
    mode: str
    victim: int | None = None
    cut: list[int] | None = None
    theorem_condition: bool = False
    attempts: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "victim": self.victim, "cut": self.cut,
                "theorem_condition": self.theorem_condition, "attempts": self.attempts,
                "ordering": {str(u): nb for u, nb in enumerate(self.ordering.lists)}}


def _place(neighbors: list[int], forbidden_slots: set[int], avoid: set[int]) -> list[int] | None:
    """Order so that no slot in `forbidden_slots` holds a node from `avoid`."""
    d = len(neighbors)
    bad = [v for v in neighbors if v in avoid]
    good = [v for v in neighbors if v not in avoid]
    free = [i for i in range(d) if i not in forbidden_slots]
    if len(bad) > len(free):
        return None
    out: list[int | None] = [None] * d
    for slot, v in zip(free, bad):
        out[slot] = v
    rest = iter(good)
    for i in range(d):
        if out[i] is None:
            out[i] = next(rest)
    return out


def _victim_ordering(g: Graph, index_sets: list[set[int]], candidates) -> tuple[int, list[list[int]]]:
    for v in candidates:
        lists = [list(nb) for nb in g.lists]
        ok = True
        for u in g.lists[v]:
            placed = _place(g.lists[u], index_sets[u], {v})
            if placed is None:
                ok = False
                break
            lists[u] = placed
        if ok:
            return v, lists
    raise Infeasible("every candidate victim is reachable through some used index")


def build_push_adversary(g: Graph, s: int, P: TabulatedProtocol) -> AdversaryResult:
    """Hide a victim v != s behind indices the protocol never uses."""
    if P.push is None:
        raise ValueError("push adversary needs a push table")
    P.check_range(g)
    cond = (1 << P.l) * P.T <= g.delta - 1
    v, lists = _victim_ordering(g, P.index_sets("push"), [v for v in range(g.n) if v != s])
    return AdversaryResult(g.with_ordering(lists), "push", victim=v, theorem_condition=cond)


def build_pull_adversary(g: Graph, s: int, P: TabulatedProtocol) -> AdversaryResult:
    """Neighbors of s never pull from s, so the rumor stays put."""
    if P.pull is None:
        raise ValueError("pull adversary needs a pull table")
    P.check_range(g)
    cond = (1 << P.l) * P.T <= g.delta - 1
    v, lists = _victim_ordering(g, P.index_sets("pull"), [s])
    return AdversaryResult(g.with_ordering(lists), "pull", victim=v, theorem_condition=cond)


def balanced(g: Graph, S: set[int]) -> bool:
    for u in range(g.n):
        inside = sum(1 for v in g.lists[u] if v in S)
        if not g.deg[u] / 4 <= inside <= 3 * g.deg[u] / 4:
            return False
    return True


def find_balanced_set(g: Graph, s: int, rng: np.random.Generator, budget: int | None = None):
    budget = budget if budget is not None else 100 * g.n
    others = np.array([v for v in range(g.n) if v != s])
    for attempt in range(1, budget + 1):
        pick = rng.choice(others, size=g.n // 2 - 1, replace=False)
        S = {s, *pick.tolist()}
        if balanced(g, S):
            return S, attempt
    return None, budget


def build_pushpull_adversary(g: Graph, s: int, P: TabulatedProtocol,
                             rng: np.random.Generator | None = None) -> AdversaryResult:
    """S pushes only inside S, V - S pulls only inside V - S, so informed nodes stay in S."""
    if P.push is None or P.pull is None:
        raise ValueError("push-pull adversary needs both tables")
    P.check_range(g)
    rng = rng or np.random.default_rng(0)
    cond = P.l <= math.log2(g.delta) - math.log2(P.T) - 2
    S, attempts = find_balanced_set(g, s, rng)
    if S is None:
        raise Infeasible(f"no balanced cut found in {attempts} samples")
    push_sets, pull_sets = P.index_sets("push"), P.index_sets("pull")
    lists = []
    for u in range(g.n):
        if u in S:
            placed = _place(g.lists[u], push_sets[u], set(g.lists[u]) - S)
        else:
            placed = _place(g.lists[u], pull_sets[u], S)
        if placed is None:
            raise Infeasible(f"node {u} uses more indices than the cut leaves available")
        lists.append(placed)
    return AdversaryResult(g.with_ordering(lists), "push-pull", cut=sorted(S),
                           theorem_condition=cond, attempts=attempts)


def verify_adversary(ordering: Graph, P: TabulatedProtocol, s: int, cut=None) -> dict:
    """Run every seed. Defeated: some node misses the rumor under every seed
    (push / pull), or the informed set never leaves the cut (push-pull)."""
    seeds = 1 << P.l
    if seeds * P.T * ordering.n > ENUM_BUDGET:
        raise ValueError("seed space too large to enumerate")
    P.check_range(ordering)
    cut_set = set(cut) if cut is not None else None
    complete_seeds = 0
    cut_held = True
    missed_everywhere = np.ones(ordering.n, dtype=bool)
    for x in range(seeds):
        hist = simulate_table(ordering, P, s, x)
        final = hist[-1]
        complete_seeds += int(final.all())
        missed_everywhere &= ~final
        if cut_set is not None:
            for h in hist:
                if any(u not in cut_set for u in np.flatnonzero(h)):
                    cut_held = False
    if cut_set is not None:
        defeated = cut_held
    else:
        defeated = complete_seeds == 0
    return {"defeated": bool(defeated), "spread_completed": complete_seeds == seeds,
            "complete_seeds": complete_seeds, "seeds": seeds,
            "never_informed": np.flatnonzero(missed_everywhere).tolist(), "cut_held": cut_held}


def random_ordering(g: Graph, rng: np.random.Generator) -> Graph:
    return g.with_ordering([rng.permutation(nb).tolist() for nb in g.lists])


def search_defeating_ordering(g: Graph, P: TabulatedProtocol, s: int, rng: np.random.Generator,
                              budget: int | None = None) -> dict:
    """Try random orderings; evidence (not proof) about whether any defeats P."""
    budget = budget if budget is not None else 100 * g.n
    for attempt in range(1, budget + 1):
        cand = random_ordering(g, rng)
        if verify_adversary(cand, P, s)["defeated"]:
            return {"found": True, "attempts": attempt, "ordering": cand}
    return {"found": False, "attempts": budget, "ordering": None}


def ordering_json(result: AdversaryResult) -> str:
    return json.dumps(result.to_dict(), sort_keys=True)
