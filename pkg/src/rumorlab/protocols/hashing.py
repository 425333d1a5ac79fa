"""Two-level hashing protocols with on-the-fly ID assignment.

The source draws s_i = (x_i, y_i) for every round up front and the rumor
carries them. In round i an informed node with ID u computes r = p_u(x_i)
(its polynomial expander neighbor) and hashes r with the round seed y_i:

* Protocol 3: y = ((a r + b) mod p mod m) mod Delta, push to index y only if
  y < deg(u).
* Protocol 4: index = G_r(y_i) mod deg(u) with G the pairwise + INW combined
  generator.

A node first informed in round t by a node with ID u gets ID 2^(t-1) + u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..expander_maps import UnbalancedExpander
from ..gf import eval_ids, next_prime
from ..graphs import Graph
from ..pseudorandom import CombinedGen, InwGen, PairwiseGen, bits_for
from .common import SpreadState, SpreadTrace

MAX_ID_BITS = 62


def expander_field(eps: float, id_bits: int) -> tuple[int, int]:
    """Smallest prime q (and degree bound t) with q >= 2t/eps^2 and q^(t+1) >= 2^id_bits."""
    q = next_prime(math.ceil(2 / eps**2))
    while True:
        t = max(0, math.ceil(id_bits / math.log2(q)) - 1)
        while q ** (t + 1) < 2**id_bits:
            t += 1
        need = math.ceil(2 * t / eps**2)
        if q >= need:
            return q, t
        q = next_prime(need)


@dataclass
class HashingConfig:
    kind: str  # "protocol3" or "protocol4"
    T: int
    eps: float
    q_expander: int
    degree_bound: int
    p: int
    m: int
    packed: bool = False
    level_degree: int = 4
    construction_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("protocol3", "protocol4"):
            raise ValueError(f"unknown hashing protocol {self.kind!r}")
        if self.T > MAX_ID_BITS:
            raise ValueError(f"T={self.T} exceeds the {MAX_ID_BITS}-bit ID space")
        if self.q_expander ** (self.degree_bound + 1) < 2**self.T:
            raise ValueError("expander cannot carry all IDs in [2^T]")
        if self.kind == "protocol3" and self.m & (self.m - 1):
            raise ValueError("Protocol 3 needs m to be a power of two")
        if self.p < self.M:
            raise ValueError("hash field must cover every right vertex")

    @classmethod
    def derive(cls, kind: str, g: Graph, T: int, eps: float | None = None, **kw) -> "HashingConfig":
        Delta = max(g.Delta, 2)
        eps = eps if eps is not None else min(0.25, Delta ** -0.5)
        q, t = expander_field(eps, T)
        packed = kw.pop("packed", False)
        M = q * q if packed else q
        if kind == "protocol3":
            m = 1 << math.ceil(math.log2(4 / eps))
        else:
            m = math.ceil(4 * math.log2(max(g.n, 2)) / eps)
        p = next_prime(max(M, m))
        if kind == "protocol4":
            m = p
        return cls(kind, T, eps, q, t, p, m, packed=packed, **kw)

    @property
    def M(self) -> int:
        return self.q_expander ** 2 if self.packed else self.q_expander

    def expander(self) -> UnbalancedExpander:
        return UnbalancedExpander(self.q_expander, self.degree_bound, packed=self.packed)

    def generator(self):
        """Built once per configuration; generators are immutable."""
        key = (self.kind, self.p, self.M, self.level_degree, self.construction_seed)
        cached = self.__dict__.get("_gen")
        if cached is not None and cached[0] == key:
            return cached[1]
        pw = PairwiseGen(self.p, self.M)
        gen = pw
        if self.kind == "protocol4":
            gen = CombinedGen(pw, InwGen.for_blocks(self.M, self.p, self.level_degree, self.construction_seed))
        self.__dict__["_gen"] = (key, gen)
        return gen

    def round_bits(self) -> int:
        return bits_for(self.q_expander) + self.generator().seed_bits

    def seed_bits(self) -> int:
        return self.T * self.round_bits()

    def describe(self) -> dict:
        return {"protocol": self.kind, "T": self.T, "eps": self.eps, "q_expander": self.q_expander,
                "degree_bound": self.degree_bound, "p": self.p, "m": self.m, "M": self.M,
                "packed": self.packed, "level_degree": self.level_degree,
                "construction_seed": self.construction_seed, "round_bits": self.round_bits(),
                "seed_bits": self.seed_bits(), "generator": self.generator().describe()}


def _run_hashing(g: Graph, s: int, cfg: HashingConfig, rng: np.random.Generator, gen=None) -> SpreadTrace:
    gen = gen or cfg.generator()
    q, t = cfg.q_expander, cfg.degree_bound
    st = SpreadState(g, s, cfg.kind, cfg.T, with_ids=True)
    xs = rng.integers(0, q, size=cfg.T)
    ab = rng.integers(0, cfg.p, size=(cfg.T, 2))
    inw_seeds = None
    st.budget.draw("x", cfg.T * bits_for(q))
    if cfg.kind == "protocol3":
        st.budget.draw("y", cfg.T * gen.seed_bits)
    else:
        inw_seeds = [gen.inw.draw(rng) for _ in range(cfg.T)]
        st.budget.draw("y-pairwise", cfg.T * gen.pairwise.seed_bits)
        st.budget.draw("y-inw", cfg.T * gen.inw.seed_bits)
    deg = g.deg
    for i in range(cfg.T):
        if st.complete:
            break
        senders = np.flatnonzero(st.informed)
        x = int(xs[i])
        r = eval_ids(st.ids[senders], x, q, t)
        if cfg.packed:
            r = x * q + r
        a, b = int(ab[i, 0]), int(ab[i, 1])
        if cfg.kind == "protocol3":
            y = ((a * r + b) % cfg.p) % cfg.m % g.Delta
            act = y < deg[senders]
            senders, idx = senders[act], y[act]
        else:
            val = gen.eval(((a, b), inw_seeds[i]), r)
            idx = val % deg[senders]
        targets = g.padded[senders, idx]
        st.assign_ids(senders, targets, capacity_bits=cfg.T)
        st.finish_round(targets, len(targets))
    trace = st.close()
    trace.extras["seed_bits_closed_form"] = cfg.seed_bits()
    return trace


def run_protocol3(g: Graph, s: int, cfg: HashingConfig, rng: np.random.Generator, gen=None) -> SpreadTrace:
    if cfg.kind != "protocol3":
        raise ValueError("configuration is not for Protocol 3")
    return _run_hashing(g, s, cfg, rng, gen)


def run_protocol4(g: Graph, s: int, cfg: HashingConfig, rng: np.random.Generator, gen=None) -> SpreadTrace:
    if cfg.kind != "protocol4":
        raise ValueError("configuration is not for Protocol 4")
    return _run_hashing(g, s, cfg, rng, gen)
