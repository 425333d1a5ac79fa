"""Forward and reversed random walks driven by protocol round randomness.

A pattern is a boolean vector, True meaning a non-lazy step. RoundRandomness
holds f(i, u) in [Delta] (padded-list index pushed by u in round i) and the
auxiliary r(i, u) as 64-bit fixed-point uniforms.

Reversed step i reads rounds T-1-2i and T-2-2i. Node v contributes
N_v = {target_a, target_b} when target_a <= target_b numerically (else nothing),
and a walk at p moves to u when {v != p : p in N_v} = {u} and r(i, p) passes
the threshold (1 - 1/Delta)^(Delta - deg(x)). By default x is the current
node p, which makes every true neighbor reachable with probability
(1/Delta)(1 - 1/Delta)^(Delta-1); threshold="target" uses x = u instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph

TWO64 = float(2**64)


def sample_pattern(gamma: float, k: int, rng: np.random.Generator) -> np.ndarray:
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return rng.random(k) < gamma


def pattern_weight(S, gamma: float) -> float:
    S = np.asarray(S, dtype=bool)
    active = int(S.sum())
    return (1 - gamma) ** (len(S) - active) * gamma ** active


@dataclass
class RoundRandomness:
    f: np.ndarray  # (T, n) indices into padded lists
    r: np.ndarray  # (T, n) uint64

    @property
    def T(self) -> int:
        return self.f.shape[0]

    @classmethod
    def uniform(cls, g: Graph, T: int, rng: np.random.Generator) -> "RoundRandomness":
        f = rng.integers(0, g.Delta, size=(T, g.n))
        r = rng.integers(0, 2**64, size=(T, g.n), dtype=np.uint64)
        return cls(f, r)


def thresholds(g: Graph) -> np.ndarray:
    """Fixed-point per-node thresholds (1 - 1/Delta)^(Delta - deg(u)) scaled to 2^64."""
    thr = (1 - 1 / g.Delta) ** (g.Delta - g.deg).astype(float)
    # largest double below 2^64; exact 1 must accept every draw
    out = np.where(thr >= 1.0, 0.0, np.minimum(thr * TWO64, np.nextafter(TWO64, 0)))
    return np.where(thr >= 1.0, np.uint64(2**64 - 1), out.astype(np.uint64))


def forward_walk(g: Graph, start: int, S, rr: RoundRandomness) -> list[int]:
    path = [int(start)]
    p = int(start)
    for i, active in enumerate(S):
        if active:
            p = int(g.padded[p, rr.f[i, p]])
        path.append(p)
    return path


def reversed_candidates(g: Graph, fa: np.ndarray, fb: np.ndarray, p: int, rank=None) -> list[int]:
    """{v != p : p in N_v} for one pair of rounds."""
    rank = np.arange(g.n) if rank is None else rank
    out = []
    for v in range(g.n):
        if v == p:
            continue
        a, b = g.padded[v, fa[v]], g.padded[v, fb[v]]
        if rank[a] <= rank[b] and p in (a, b):
            out.append(v)
    return out


def reversed_walk(g: Graph, start: int, S, rr: RoundRandomness, order=None,
                  threshold: str = "source") -> list[int]:
    if rr.T % 2:
        raise ValueError("reversed walks need an even number of rounds")
    if len(S) > rr.T // 2:
        raise ValueError("pattern longer than the available round pairs")
    rank = np.arange(g.n) if order is None else np.argsort(np.asarray(order))
    thr = thresholds(g)
    path = [int(start)]
    p = int(start)
    for i, active in enumerate(S):
        if active:
            fa, fb = rr.f[rr.T - 1 - 2 * i], rr.f[rr.T - 2 - 2 * i]
            cands = reversed_candidates(g, fa, fb, p, rank)
            if len(cands) == 1:
                u = cands[0]
                x = p if threshold == "source" else u
                if rr.r[rr.T - 1 - 2 * i, p] <= thr[x]:
                    p = u
        path.append(p)
    return path


# ---- vectorized Monte Carlo ----------------------------------------------

def _forward_step(g: Graph, pos: np.ndarray, active: np.ndarray, f: np.ndarray) -> np.ndarray:
    rows = np.arange(len(pos))
    moved = g.padded[pos, f[rows, pos]]
    return np.where(active, moved, pos)


def _reversed_step(g: Graph, pos, active, fa, fb, r, thr, threshold: str):
    trials, n = fa.shape
    nodes = np.arange(n)
    a = g.padded[nodes[None, :], fa]
    b = g.padded[nodes[None, :], fb]
    valid = a <= b
    p = pos[:, None]
    hit = valid & ((a == p) | (b == p)) & (nodes[None, :] != p)
    count = hit.sum(axis=1)
    u = hit.argmax(axis=1)
    rows = np.arange(trials)
    x = pos if threshold == "source" else u
    ok = (count == 1) & (r[rows, pos] <= thr[x]) & active
    return np.where(ok, u, pos)


def walk_endpoints(g: Graph, start: int, k: int, gamma: float, trials: int,
                   rng: np.random.Generator, direction: str = "forward",
                   threshold: str = "source") -> np.ndarray:
    """Empirical distribution of X (forward) or Y (reversed) after k steps."""
    thr = thresholds(g)
    pos = np.full(trials, int(start), dtype=np.int64)
    for _ in range(k):
        active = rng.random(trials) < gamma
        if direction == "forward":
            f = rng.integers(0, g.Delta, size=(trials, g.n))
            pos = _forward_step(g, pos, active, f)
        else:
            fa = rng.integers(0, g.Delta, size=(trials, g.n))
            fb = rng.integers(0, g.Delta, size=(trials, g.n))
            r = rng.integers(0, 2**64, size=(trials, g.n), dtype=np.uint64)
            pos = _reversed_step(g, pos, active, fa, fb, r, thr, threshold)
    return np.bincount(pos, minlength=g.n) / trials


def pair_walk_moments(g: Graph, start: tuple[int, int], k: int, gamma: float, trials: int,
                      rng: np.random.Generator, direction: str = "forward",
                      threshold: str = "source") -> np.ndarray:
    """Empirical joint endpoint distribution over V x V of two walks sharing round randomness."""
    thr = thresholds(g)
    p1 = np.full(trials, int(start[0]), dtype=np.int64)
    p2 = np.full(trials, int(start[1]), dtype=np.int64)
    for _ in range(k):
        a1 = rng.random(trials) < gamma
        a2 = rng.random(trials) < gamma
        if direction == "forward":
            f = rng.integers(0, g.Delta, size=(trials, g.n))
            p1, p2 = _forward_step(g, p1, a1, f), _forward_step(g, p2, a2, f)
        else:
            fa = rng.integers(0, g.Delta, size=(trials, g.n))
            fb = rng.integers(0, g.Delta, size=(trials, g.n))
            r = rng.integers(0, 2**64, size=(trials, g.n), dtype=np.uint64)
            p1, p2 = (_reversed_step(g, p1, a1, fa, fb, r, thr, threshold),
                      _reversed_step(g, p2, a2, fa, fb, r, thr, threshold))
    joint = np.bincount(p1 * g.n + p2, minlength=g.n * g.n) / trials
    return joint.reshape(g.n, g.n)
