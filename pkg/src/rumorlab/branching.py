"""Layered branching programs, exact PRG distance, and walk-tracking programs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .walks import thresholds

ENUM_LIMIT = 1 << 22
WIDTH_LIMIT = 48 * 48


@dataclass
class BranchingProgram:
    tables: np.ndarray  # (L, W, D) next-state table

    def __post_init__(self):
        self.tables = np.asarray(self.tables, dtype=np.int64)
        if self.tables.ndim != 3:
            raise ValueError("tables must have shape (L, W, D)")
        if self.tables.size and (self.tables.min() < 0 or self.tables.max() >= self.W):
            raise ValueError("transition table entry outside [W]")

    @property
    def L(self) -> int:
        return self.tables.shape[0]

    @property
    def W(self) -> int:
        return self.tables.shape[1]

    @property
    def D(self) -> int:
        return self.tables.shape[2]

    @classmethod
    def empty(cls, W: int, D: int) -> "BranchingProgram":
        return cls(np.zeros((0, W, D), dtype=np.int64))

    def end_distribution(self, s: int) -> np.ndarray:
        """End-state distribution for uniformly random labels, propagated layer by layer."""
        v = np.zeros(self.W)
        v[s] = 1.0
        for t in self.tables:
            nxt = np.zeros(self.W)
            np.add.at(nxt, t, v[:, None] / self.D)
            v = nxt
        return v

    def run_many(self, s, inputs: np.ndarray) -> np.ndarray:
        """End states for each row of `inputs` (shape (count, L))."""
        inputs = np.asarray(inputs, dtype=np.int64)
        state = np.broadcast_to(np.asarray(s, dtype=np.int64), inputs.shape[:1]).copy()
        for i in range(self.L):
            state = self.tables[i][state, inputs[:, i]]
        return state


def bp_eval(B: BranchingProgram, s: int, x) -> int:
    if len(x) != B.L:
        raise ValueError(f"input length {len(x)} does not match program length {B.L}")
    if not 0 <= s < B.W:
        raise ValueError("start state outside [W]")
    state = int(s)
    for i, label in enumerate(x):
        if not 0 <= int(label) < B.D:
            raise ValueError("label outside [D]")
        state = int(B.tables[i, state, int(label)])
    return state


def random_program(L: int, W: int, D: int, rng: np.random.Generator) -> BranchingProgram:
    return BranchingProgram(rng.integers(0, W, size=(L, W, D)))


class FullInputs:
    """The identity generator: seed i is the i-th input of [D]^L."""

    def __init__(self, L: int, D: int):
        self.L, self.D = L, D
        self.seed_space = D ** L

    def expand(self, seed: int) -> np.ndarray:
        out = np.empty(self.L, dtype=np.int64)
        for i in range(self.L):
            seed, out[i] = divmod(seed, self.D)
        return out

    def all_outputs(self) -> np.ndarray:
        return np.array(list(itertools.product(range(self.D), repeat=self.L)), dtype=np.int64)


def generator_outputs(G) -> np.ndarray:
    if hasattr(G, "all_outputs"):
        return G.all_outputs()
    if isinstance(G, np.ndarray):
        return G
    if G.seed_space > ENUM_LIMIT:
        raise ValueError(f"{G.seed_space} seeds exceed the enumeration budget")
    if hasattr(G, "blocks"):
        seeds = np.arange(G.seed_space, dtype=np.uint64)
        return np.stack([G.blocks(seeds, np.full(len(seeds), i)) for i in range(G.L)], axis=1)
    return np.array([G.expand(s) for s in range(G.seed_space)])


def prg_distance(B: BranchingProgram, s, G) -> float:
    """Exact L1 distance between end states under G's seeds and under uniform labels.

    `s` may be a start state or the string "all" (max over start states).
    """
    if B.D ** B.L > ENUM_LIMIT:
        raise ValueError("uniform input space exceeds the enumeration budget")
    outputs = generator_outputs(G)[:, : B.L]
    if outputs.shape[1] < B.L:
        raise ValueError("generator output shorter than the program")
    starts = range(B.W) if s == "all" else [int(s)]
    worst = 0.0
    for s0 in starts:
        ends = B.run_many(s0, outputs)
        emp = np.bincount(ends, minlength=B.W) / len(outputs)
        worst = max(worst, float(np.abs(emp - B.end_distribution(s0)).sum()))
    return worst


# ---- walk tracking --------------------------------------------------------

def _label_digits(label: int, base: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        label, d = divmod(label, base)
        out.append(d)
    return out


def reversed_coin_space(g: Graph) -> int:
    """Discrete stand-in for r(i, u): uniform over [Delta^E] with E = Delta - delta."""
    return g.Delta ** (g.Delta - g.delta)


def walk_tracker_bp(g: Graph, mode: str, patterns, direction: str = "forward",
                    threshold: str = "source") -> BranchingProgram:
    """Program whose layer i applies walk step i given one round's randomness as the label.

    Forward labels encode f(i, .) in [Delta]^n. Reversed labels encode, per
    node, the two pushes of the paired rounds and a coin in [Delta^E] that is
    accepted with probability exactly (1 - 1/Delta)^(Delta - deg).
    """
    if mode == "single":
        pats = [np.asarray(patterns, dtype=bool)]
        W = g.n
    elif mode == "pair":
        pats = [np.asarray(p, dtype=bool) for p in patterns]
        W = g.n * g.n
        if W > WIDTH_LIMIT:
            raise ValueError("pair-mode width overflow")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    k = len(pats[0])
    n, Delta = g.n, g.Delta
    coins = reversed_coin_space(g)
    per_node = Delta if direction == "forward" else Delta * Delta * coins
    D = per_node ** n
    if D * W * k > 1 << 26:
        raise ValueError("label alphabet too large to tabulate")
    E = Delta - g.delta
    accept = [(Delta - 1) ** (Delta - int(g.deg[u])) * Delta ** (E - (Delta - int(g.deg[u])))
              for u in range(n)]

    def step_target(label_digits, p):
        """Where a non-lazy step from p goes under this label."""
        if direction == "forward":
            return int(g.padded[p, label_digits[p]])
        cands = []
        for v in range(n):
            if v == p:
                continue
            code = label_digits[v]
            fa, code = code % Delta, code // Delta
            fb = code % Delta
            a, b = g.padded[v, fa], g.padded[v, fb]
            if a <= b and p in (a, b):
                cands.append(v)
        if len(cands) != 1:
            return p
        u = cands[0]
        coin = label_digits[p] // (Delta * Delta)
        x = p if threshold == "source" else u
        return u if coin < accept[x] else p

    moves = np.empty((D, n), dtype=np.int64)
    for label in range(D):
        digits = _label_digits(label, per_node, n)
        for p in range(n):
            moves[label, p] = step_target(digits, p)
    tables = np.empty((k, W, D), dtype=np.int64)
    stay = np.arange(n)
    for i in range(k):
        if mode == "single":
            tables[i] = (moves if pats[0][i] else np.broadcast_to(stay, (D, n))).T
        else:
            m1 = moves if pats[0][i] else np.broadcast_to(stay, (D, n))
            m2 = moves if pats[1][i] else np.broadcast_to(stay, (D, n))
            pair = m1[:, :, None] * n + m2[:, None, :]
            tables[i] = pair.reshape(D, W).T
    return BranchingProgram(tables)
