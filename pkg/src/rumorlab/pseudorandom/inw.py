"""Recursive expander-walk generator for branching programs.

A level-k seed is an integer s in [S_k] with S_0 = base and S_k = S_{k-1} * d_k.
It splits as x = s mod S_{k-1} (the recursive seed) and y = s // S_{k-1} (the
neighbor index), and expands to expand(x) followed by expand(Gamma_k(x, y)).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .budget import bits_for
from .levels import CERTIFY_LIMIT, make_level


class InwGen:
    def __init__(self, L: int, base: int, degrees: Sequence[int] | int = 4,
                 construction_seed: int = 0, certify_limit: int = CERTIFY_LIMIT):
        if L < 1 or L & (L - 1):
            raise ValueError("output length L must be a power of two")
        if base < 2:
            raise ValueError("block alphabet needs at least two symbols")
        self.L = int(L)
        self.base = int(base)
        self.levels_count = self.L.bit_length() - 1
        if isinstance(degrees, int):
            degrees = [degrees] * self.levels_count
        if len(degrees) != self.levels_count:
            raise ValueError(f"need {self.levels_count} level degrees, got {len(degrees)}")
        self.construction_seed = int(construction_seed)
        self.levels = []
        self.sizes = [self.base]
        for k, d in enumerate(degrees):
            lvl = make_level(self.sizes[-1], int(d), self.construction_seed * 7919 + k, certify_limit)
            self.levels.append(lvl)
            self.sizes.append(self.sizes[-1] * lvl.degree)
        if self.sizes[-1] > 1 << 62:
            raise ValueError("seed space exceeds 62 bits; lower L, base or degrees")

    @classmethod
    def for_blocks(cls, blocks: int, base: int, degree: int = 4, construction_seed: int = 0,
                   certify_limit: int = CERTIFY_LIMIT) -> "InwGen":
        L = 1 << max(0, (int(blocks) - 1).bit_length())
        return cls(L, base, degree, construction_seed, certify_limit)

    @property
    def b(self) -> int:
        return bits_for(self.base)

    @property
    def seed_space(self) -> int:
        return self.sizes[-1]

    @property
    def seed_bits(self) -> int:
        return self.b + sum(bits_for(lvl.degree) for lvl in self.levels)

    @property
    def certified(self) -> bool:
        return all(lvl.lam is not None for lvl in self.levels)

    def epsilon(self, width: int) -> float | None:
        """Certified L1 error against (L, width, base) programs.

        eps_k = 2 eps_{k-1} + lam_k (width - 1): expander mixing per level plus
        the two recursive halves. None when some level has no certificate.
        """
        if not self.certified:
            return None
        eps = 0.0
        for lvl in self.levels:
            eps = 2 * eps + lvl.lam * (width - 1)
        return eps

    def rectangle_error(self) -> float | None:
        """Bound on |Pr[G(seed) in R] - |R|/base^d| for any rectangle R."""
        eps = self.epsilon(2)
        return None if eps is None else eps / 2

    def check_seed(self, seed) -> None:
        s = np.asarray(seed)
        if np.any(s < 0) or np.any(s >= self.seed_space):
            raise ValueError(f"seed outside [0, {self.seed_space})")

    def blocks(self, seed, index) -> np.ndarray:
        """Block `index` of the expansion of `seed`; vectorized over both arguments."""
        seed = np.asarray(seed, dtype=np.uint64)
        index = np.asarray(index, dtype=np.int64)
        if np.any(index < 0) or np.any(index >= self.L):
            raise IndexError(f"block index outside [0, {self.L})")
        s, idx = np.broadcast_arrays(seed, index)
        s = np.array(s, dtype=np.uint64, ndmin=1)
        idx = np.array(idx, ndmin=1)
        for k in range(self.levels_count, 0, -1):
            size = np.uint64(self.sizes[k - 1])
            x, y = s % size, s // size
            right = ((idx >> (k - 1)) & 1).astype(bool)
            s = x
            if right.any():
                s[right] = self.levels[k - 1].neighbor(x[right], y[right])
        out = s.astype(np.int64)
        return out.reshape(np.broadcast(seed, index).shape)

    def expand(self, seed) -> np.ndarray:
        self.check_seed(seed)
        return self.blocks(np.full(self.L, seed, dtype=np.uint64), np.arange(self.L))

    def seed_from_bits(self, bits: str) -> int:
        """Pack a bit string when every component space is a power of two."""
        sizes = [self.base] + [lvl.degree for lvl in self.levels]
        if any(s & (s - 1) for s in sizes):
            raise ValueError("bit-string seeds need power-of-two component spaces")
        if len(bits) != self.seed_bits:
            raise ValueError(f"seed needs {self.seed_bits} bits, got {len(bits)}")
        return int(bits, 2) if bits else 0

    def draw(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.seed_space, dtype=np.uint64))

    def describe(self) -> dict:
        return {"kind": "inw", "L": self.L, "base": self.base, "b": self.b,
                "construction_seed": self.construction_seed, "seed_bits": self.seed_bits,
                "levels": [lvl.describe() for lvl in self.levels],
                "epsilon_width2": self.epsilon(2)}


def inw_expand(g: InwGen, seed) -> tuple[int, ...]:
    if isinstance(seed, str):
        seed = g.seed_from_bits(seed)
    return tuple(int(v) for v in g.expand(seed))


def rectangle_member(values: Sequence[int], rectangle: Sequence[Sequence[int]]) -> bool:
    """Width-2 program: state 1 means every coordinate so far was accepted."""
    state = 1
    for v, accept in zip(values, rectangle):
        state = state & (1 if int(v) in accept else 0)
    return bool(state)


def rectangle_eval(g, seed, rectangle: Sequence[Sequence[int]]) -> bool:
    if len(rectangle) > g.L:
        raise ValueError("rectangle has more coordinates than the generator outputs")
    values = g.expand(seed)[: len(rectangle)]
    return rectangle_member(values, [set(a) for a in rectangle])
