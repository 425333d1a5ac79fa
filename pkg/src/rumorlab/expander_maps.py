"""Unbalanced bipartite expanders from low-degree polynomials.

Left vertex u is the polynomial whose coefficients are the base-q digits of u;
its y-th neighbor is p_u(y) inside right block y (or the packed pair
y*q + p_u(y) in the strong variant).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .gf import FieldError, eval_ids, is_prime

EXHAUSTIVE_LIMIT = 200_000


@dataclass(frozen=True)
class UnbalancedExpander:
    q: int
    degree_bound: int
    N: int | None = None
    packed: bool = False

    def __post_init__(self):
        if not is_prime(self.q):
            raise FieldError(f"{self.q} is not prime")
        cap = self.q ** (self.degree_bound + 1)
        if self.N is None:
            object.__setattr__(self, "N", cap)
        elif self.N > cap:
            raise ValueError(f"N={self.N} exceeds the {cap} available polynomials")

    @property
    def D(self) -> int:
        return self.q

    @property
    def M(self) -> int:
        return self.q * self.q if self.packed else self.q

    def gamma(self, u, y):
        u_arr = np.asarray(u, dtype=np.int64)
        if np.any(u_arr < 0) or np.any(u_arr >= self.N) or not 0 <= int(y) < self.D:
            raise IndexError("left vertex or edge label out of range")
        val = eval_ids(np.atleast_1d(u_arr), int(y), self.q, self.degree_bound)
        if self.packed:
            val = int(y) * self.q + val
        return val.reshape(u_arr.shape) if u_arr.ndim else int(val[0])

    def neighborhood(self, S) -> int:
        """|N(S)| in the disjoint union of right blocks."""
        S = np.asarray(list(S), dtype=np.int64)
        return sum(len(np.unique(self.gamma(S, y))) for y in range(self.D))

    def epsilon_bound(self) -> float:
        """Collision-based eps for K=2: distinct polynomials agree on <= t points."""
        return self.degree_bound / self.q

    def describe(self) -> dict:
        return {"kind": "polynomial", "q": self.q, "degree_bound": self.degree_bound,
                "N": self.N, "packed": self.packed, "D": self.D, "M": self.M}


def gamma(e: UnbalancedExpander, u, y):
    return e.gamma(u, y)


@dataclass
class ExpansionCertificate:
    K: int
    A: float
    witness: tuple[int, ...]
    examined: int
    exhaustive: bool
    epsilon: float  # the graph is a (K, (1 - epsilon) D) expander on the examined sets

    def to_dict(self) -> dict:
        return {"K": self.K, "A": self.A, "witness": list(self.witness),
                "examined": self.examined, "exhaustive": self.exhaustive, "epsilon": self.epsilon}


def expansion_certify(e: UnbalancedExpander, K: int, samples: int | None = None,
                      rng: np.random.Generator | None = None) -> ExpansionCertificate:
    """Worst examined |N(S)|/K over K-subsets: all of them, or `samples` random ones."""
    if K < 1 or K > e.N:
        raise ValueError("set size out of range")
    total = math.comb(e.N, K)
    if samples is None:
        if total > EXHAUSTIVE_LIMIT:
            raise ValueError(f"{total} subsets is too many for exhaustive certification")
        subsets = itertools.combinations(range(e.N), K)
        exhaustive = True
    else:
        rng = rng or np.random.default_rng(0)
        subsets = (tuple(sorted(rng.choice(e.N, size=K, replace=False).tolist())) for _ in range(samples))
        exhaustive = False
    # one table of right neighbors for all left vertices, per label
    table = np.stack([e.gamma(np.arange(e.N), y) for y in range(e.D)], axis=1) if e.N <= 1 << 16 else None
    best, witness, count = math.inf, (), 0
    for S in subsets:
        count += 1
        if table is not None:
            rows = table[list(S)]
            size = sum(len(set(rows[:, y].tolist())) for y in range(e.D))
        else:
            size = e.neighborhood(S)
        if size < best:
            best, witness = size, tuple(S)
    return ExpansionCertificate(K, best / K, witness, count, exhaustive, 1.0 - best / K / e.D)


def dispersion_check(e: UnbalancedExpander, S, eps: float) -> float:
    """Fraction of labels y whose image of S keeps at least (1 - sqrt(eps))|S| points."""
    S = np.asarray(list(S), dtype=np.int64)
    need = (1 - math.sqrt(max(eps, 0.0))) * len(S)
    good = sum(1 for y in range(e.D) if len(np.unique(e.gamma(S, y))) >= need - 1e-12)
    return good / e.D


def collision_count(e: UnbalancedExpander, u: int, w: int) -> int:
    return sum(1 for y in range(e.D) if e.gamma(u, y) == e.gamma(w, y))
