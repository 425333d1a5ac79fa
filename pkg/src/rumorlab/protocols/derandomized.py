"""Two-seed protocol: a rectangle generator G driven by an INW generator G'.

Round i < T/2 pushes to index G_u(G'_i(x)) mod Delta. Round i >= T/2 uses
j = floor((T - i - 1) / 2) and v = G_u(G'_j(y)) mod Delta^2 split as
(r0, r1) = (v // Delta, v % Delta); r0 is used when i = T-1-2j, r1 otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graphs import Graph
from ..pseudorandom import InwGen
from .common import SpreadState, SpreadTrace


@dataclass
class Protocol2Config:
    T: int
    m: int = 1 << 16  # alphabet of G; must cover Delta^2 with small bias
    level_degree: int = 4
    construction_seed: int = 0
    ablation: bool = False  # replace G' by fresh uniform seeds of G each round

    def __post_init__(self):
        if self.T < 2 or self.T % 2:
            raise ValueError("Protocol 2 needs an even number of rounds")

    def generators(self, g: Graph) -> tuple[InwGen, InwGen]:
        if self.m < g.Delta ** 2:
            raise ValueError("G alphabet must be at least Delta^2")
        G = InwGen.for_blocks(g.n, self.m, self.level_degree, self.construction_seed)
        Gp = InwGen.for_blocks(self.T // 2, G.seed_space, self.level_degree, self.construction_seed + 1)
        return G, Gp

    def seed_bits(self, g: Graph) -> int:
        G, Gp = self.generators(g)
        if self.ablation:
            return self.T * G.seed_bits
        return 2 * Gp.seed_bits

    def describe(self, g: Graph) -> dict:
        G, Gp = self.generators(g)
        return {"protocol": "protocol2", "T": self.T, "m": self.m, "level_degree": self.level_degree,
                "construction_seed": self.construction_seed, "ablation": self.ablation,
                "G": G.describe(), "G_prime": Gp.describe(), "seed_bits": self.seed_bits(g)}


def run_protocol2(g: Graph, s: int, cfg: Protocol2Config, rng: np.random.Generator,
                  generators: tuple[InwGen, InwGen] | None = None) -> SpreadTrace:
    G, Gp = generators or cfg.generators(g)
    if G.L < g.n:
        raise ValueError("G has fewer coordinates than nodes")
    T, Delta = cfg.T, g.Delta
    st = SpreadState(g, s, "protocol2", T)
    half = T // 2
    if cfg.ablation:
        fwd_seeds = [G.draw(rng) for _ in range(half)]
        rev_seeds = [G.draw(rng) for _ in range(half)]
        st.budget.draw("G-seeds", T * G.seed_bits)
    else:
        x, y = Gp.draw(rng), Gp.draw(rng)
        st.budget.draw("x", Gp.seed_bits)
        st.budget.draw("y", Gp.seed_bits)
        fwd_seeds = Gp.blocks(x, np.arange(half)).tolist()
        rev_seeds = Gp.blocks(y, np.arange(half)).tolist()
    for i in range(T):
        if st.complete:
            break
        senders = np.flatnonzero(st.informed)
        if i < half:
            idx = G.blocks(fwd_seeds[i], senders) % Delta
        else:
            j = (T - i - 1) // 2
            v = G.blocks(rev_seeds[j], senders) % (Delta * Delta)
            idx = v // Delta if i == T - 1 - 2 * j else v % Delta
        targets = g.padded[senders, idx]
        real = targets != senders
        st.finish_round(targets[real], int(real.sum()))
    trace = st.close()
    trace.extras["seed_bits_closed_form"] = cfg.seed_bits(g)
    return trace
