"""Matching-based protocol and the averaging process it drives.

Each round every node u reads r = G_u(y_i) mod 4 Delta from a pairwise
generator whose seed y_i = G'_i(x) comes from an INW generator. The low bit of
r is activity (0 = active), the rest w = r // 2 indexes [2 Delta]; u selects
padded[u][w] when w < Delta and that entry is a true neighbor. {u, v} is a
good pair when u is active, v inactive and u is the only node selecting v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..gf import next_prime
from ..graphs import Graph
from ..markov import StochasticChain
from ..pseudorandom import InwGen, PairwiseGen
from .common import SpreadState, SpreadTrace


@dataclass
class GoodPairRound:
    w: np.ndarray
    z: np.ndarray
    selects: np.ndarray  # selected node or -1
    pairs: list[tuple[int, int]]  # (active, inactive)
    partner: np.ndarray = field(repr=False, default=None)  # -1 when unmatched (strict mode only)

    @property
    def active(self) -> np.ndarray:
        return self.z == 0


def good_pair_round(g: Graph, r: np.ndarray, unique: bool = True) -> GoodPairRound:
    """Pairs from per-node values r in [4 Delta]."""
    r = np.asarray(r, dtype=np.int64)
    w, z = r // 2, r % 2
    nodes = np.arange(g.n)
    valid = w < g.Delta
    target = np.where(valid, g.padded[nodes, np.minimum(w, g.Delta - 1)], nodes)
    selects = np.where(valid & (target != nodes), target, -1)
    count = np.bincount(selects[selects >= 0], minlength=g.n)
    active = z == 0
    ok = active & (selects >= 0)
    ok[ok] &= ~active[selects[ok]]
    if unique:
        ok[ok] &= count[selects[ok]] == 1
    us = np.flatnonzero(ok)
    pairs = [(int(u), int(selects[u])) for u in us]
    partner = None
    if unique:
        partner = np.full(g.n, -1, dtype=np.int64)
        partner[us] = selects[us]
        partner[selects[us]] = us
    return GoodPairRound(w, z, selects, pairs, partner)


def is_matching(rnd: GoodPairRound) -> bool:
    seen = set()
    for u, v in rnd.pairs:
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def averaging_matrix(rnd: GoodPairRound, n: int) -> StochasticChain:
    P = np.eye(n)
    for u, v in rnd.pairs:
        P[u, u] = P[v, v] = P[u, v] = P[v, u] = 0.5
    return StochasticChain(P, n)


def averaging_matrix_exact(rnd: GoodPairRound, n: int) -> list[list[Fraction]]:
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    half = Fraction(1, 2)
    for u, v in rnd.pairs:
        P[u][u] = P[v][v] = P[u][v] = P[v][u] = half
    return P


def mat_mul_exact(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def vec_mul_exact(v, P):
    n = len(P[0])
    return [sum((v[t] * P[t][j] for t in range(len(v))), Fraction(0)) for j in range(n)]


@dataclass
class Protocol5Config:
    T: int
    p: int | None = None
    level_degree: int = 4
    construction_seed: int = 0
    unique: bool = True

    def generators(self, g: Graph) -> tuple[PairwiseGen, InwGen]:
        p = self.p or next_prime(max(g.n, 16 * g.Delta**2))
        if p < 4 * g.Delta:
            raise ValueError("generator output space must be at least 4 Delta")
        G = PairwiseGen(p, g.n)
        Gp = InwGen.for_blocks(self.T, G.seed_space, self.level_degree, self.construction_seed)
        return G, Gp

    def seed_bits(self, g: Graph) -> int:
        return self.generators(g)[1].seed_bits

    def describe(self, g: Graph) -> dict:
        G, Gp = self.generators(g)
        return {"protocol": "protocol5", "T": self.T, "p": G.q, "level_degree": self.level_degree,
                "construction_seed": self.construction_seed, "unique": self.unique,
                "G": G.describe(), "G_prime": Gp.describe(), "seed_bits": Gp.seed_bits,
                "stated_seed_bits": 2 * Gp.seed_bits}


def round_values(g: Graph, G: PairwiseGen, seed_index: int) -> np.ndarray:
    a, b = divmod(int(seed_index), G.q)
    return G.eval((a, b), np.arange(g.n)) % (4 * g.Delta)


@dataclass
class AveragingRun:
    trace: SpreadTrace
    values: list  # v(0), v(1), ... (numpy arrays, or lists of Fractions when exact)
    rounds: list[GoodPairRound]


def run_protocol5(g: Graph, s: int, cfg: Protocol5Config, rng: np.random.Generator,
                  with_averaging: bool = False, exact: bool = False, generators=None,
                  stop_at: float | None = None, keep_rounds: bool = False) -> AveragingRun:
    """Spread (and optionally average) for cfg.T rounds.

    Without averaging the run stops once everyone is informed; with averaging
    it stops when ||v^perp||_2 < stop_at (if given) or after T rounds.
    """
    G, Gp = generators or cfg.generators(g)
    if with_averaging and not cfg.unique:
        raise ValueError("averaging needs the strict (unique selector) good pairs")
    st = SpreadState(g, s, "protocol5", cfg.T)
    x = Gp.draw(rng)
    st.budget.draw("x", Gp.seed_bits)
    seeds = Gp.blocks(x, np.arange(cfg.T))
    if exact:
        v = [Fraction(0)] * g.n
        v[s] = Fraction(1)
    else:
        v = np.zeros(g.n)
        v[s] = 1.0
    values = [list(v) if exact else v.copy()] if with_averaging else []
    kept = []
    norms = []
    for i in range(cfg.T):
        if with_averaging:
            norm = perp_norm(v)
            norms.append(norm)
            if stop_at is not None and norm < stop_at:
                break
        elif st.complete:
            break
        rnd = good_pair_round(g, round_values(g, G, seeds[i]), cfg.unique)
        if keep_rounds:
            kept.append(rnd)
        crossing = [(u, w) for u, w in rnd.pairs if st.informed[u] or st.informed[w]]
        new = [w if st.informed[u] else u for u, w in crossing]
        if with_averaging:
            for u, w in crossing:
                mean = (v[u] + v[w]) / 2
                v[u] = v[w] = mean
            values.append(list(v) if exact else v.copy())
        st.finish_round(new, len(crossing))
    trace = st.close()
    trace.extras["seed_bits_drawn"] = Gp.seed_bits
    trace.extras["stated_seed_bits"] = 2 * Gp.seed_bits
    if with_averaging:
        if stop_at is None or norms[-1] >= stop_at:
            norms.append(perp_norm(v))
        trace.extras["perp_norms"] = norms
    return AveragingRun(trace, values, kept)


def perp_norm(v) -> float:
    arr = np.array([float(x) for x in v])
    return float(np.linalg.norm(arr - arr.mean()))


def rounds_to_accuracy(norms: list[float], delta: float) -> int | None:
    for k, x in enumerate(norms):
        if x < delta:
            return k
    return None


def good_pair_probabilities(g: Graph, p: int, unique: bool = True) -> np.ndarray:
    """Pr[{u, v} is a good pair] over all p^2 seeds of the pairwise generator G: F_p^2 -> [p]^n."""
    G = PairwiseGen(p, g.n)
    if p < 4 * g.Delta:
        raise ValueError("generator output space must be at least 4 Delta")
    counts = np.zeros((g.n, g.n))
    for seed in range(G.seed_space):
        for u, v in good_pair_round(g, round_values(g, G, seed), unique).pairs:
            counts[u, v] += 1
            counts[v, u] += 1
    return counts / G.seed_space


def doubled_matrix(rnd: GoodPairRound, n: int) -> np.ndarray:
    """2 M(x) as an integer matrix, so exact checks avoid rationals."""
    A = 2 * np.eye(n, dtype=np.int64)
    for u, v in rnd.pairs:
        A[u, u] = A[v, v] = A[u, v] = A[v, u] = 1
    return A


def idempotent_exact(rnd: GoodPairRound, n: int) -> bool:
    """M(x)^2 = M(x) exactly, i.e. (2M)^2 = 2 (2M) over the integers."""
    A = doubled_matrix(rnd, n)
    return bool(np.array_equal(A @ A, 2 * A))
