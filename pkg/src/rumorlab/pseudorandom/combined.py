from __future__ import annotations

import numpy as np

from .inw import InwGen, rectangle_member
from .pairwise import PairwiseGen


class CombinedGen:
    """Coordinatewise sum mod q of a pairwise generator and an INW generator.

    Seeds are pairs (x, y): x = (a, b) for the pairwise part, y an INW seed.
    Output space is [q]^d with q the pairwise field size; INW blocks are
    reduced mod q when the INW alphabet is larger.
    """

    def __init__(self, pairwise: PairwiseGen, inw: InwGen):
        if inw.L < pairwise.d:
            raise ValueError("INW part produces fewer blocks than the pairwise dimension")
        if inw.base < pairwise.q:
            raise ValueError("INW alphabet smaller than the output space")
        self.pairwise = pairwise
        self.inw = inw

    @property
    def m(self) -> int:
        return self.pairwise.q

    @property
    def d(self) -> int:
        return self.pairwise.d

    @property
    def seed_bits(self) -> int:
        return self.pairwise.seed_bits + self.inw.seed_bits

    def rectangle_error(self) -> float | None:
        eps = self.inw.rectangle_error()
        if eps is None:
            return None
        if self.inw.base == self.m:
            return eps
        return eps + self.d * self.m / self.inw.base

    def eval(self, seed, i):
        (a, b), y = seed
        i = np.asarray(i, dtype=np.int64)
        if np.any(i >= self.d) or np.any(i < 0):
            raise IndexError(f"coordinate out of range [0, {self.d})")
        shift = self.inw.blocks(y, i) % self.m
        return (a * i + b + shift) % self.m

    def expand(self, seed) -> np.ndarray:
        return self.eval(seed, np.arange(self.d))

    @property
    def L(self) -> int:
        return self.d

    def describe(self) -> dict:
        return {"kind": "combined", "pairwise": self.pairwise.describe(),
                "inw": self.inw.describe(), "seed_bits": self.seed_bits}


def combined_eval(g: CombinedGen, seed, i) -> int:
    return int(g.eval(seed, i))


def combined_rectangle_eval(g: CombinedGen, seed, rectangle) -> bool:
    if len(rectangle) > g.d:
        raise ValueError("rectangle dimension exceeds the output dimension")
    return rectangle_member(g.expand(seed)[: len(rectangle)], [set(a) for a in rectangle])
