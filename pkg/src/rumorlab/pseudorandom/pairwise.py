from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..gf import FieldError, is_prime
from .budget import bits_for


@dataclass(frozen=True)
class PairwiseGen:
    """Seed (a, b) in F_q^2, coordinate i maps to a*i + b."""
    q: int
    d: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise FieldError(f"{self.q} is not prime")
        if not 1 <= self.d <= self.q:
            raise ValueError(f"dimension {self.d} must lie in [1, q={self.q}]")

    @property
    def seed_space(self) -> int:
        return self.q * self.q

    @property
    def seed_bits(self) -> int:
        return 2 * bits_for(self.q)

    def split(self, index):
        """Seed index a*q + b -> (a, b); works on arrays."""
        return np.divmod(index, self.q) if isinstance(index, np.ndarray) else divmod(int(index), self.q)

    def eval(self, seed, i):
        a, b = seed
        if np.any(np.asarray(i) >= self.d) or np.any(np.asarray(i) < 0):
            raise IndexError(f"coordinate out of range [0, {self.d})")
        return (a * i + b) % self.q

    def expand(self, seed) -> np.ndarray:
        return self.eval(seed, np.arange(self.d, dtype=np.int64))

    def describe(self) -> dict:
        return {"kind": "pairwise", "q": self.q, "d": self.d, "seed_bits": self.seed_bits}


def pairwise_eval(g: PairwiseGen, seed, i):
    if np.any(np.asarray(i) >= g.q):
        raise IndexError("coordinate index must be a field element")
    return g.eval(seed, i)


def mod_reduce(values: Sequence[int], targets: Sequence[int]) -> tuple[int, ...]:
    if len(values) != len(targets):
        raise ValueError("values and targets differ in length")
    return tuple(int(v) % int(t) for v, t in zip(values, targets))


def all_outputs(g: PairwiseGen) -> np.ndarray:
    """Every seed's output row, shape (q^2, d)."""
    seeds = np.arange(g.seed_space, dtype=np.int64)
    a, b = np.divmod(seeds, g.q)
    return (a[:, None] * np.arange(g.d)[None, :] + b[:, None]) % g.q


def independence_defect(g: PairwiseGen) -> int:
    """Max |count - 1| over coordinate pairs i < j and value pairs; 0 means exact."""
    out = all_outputs(g)
    worst = 0
    for i in range(g.d):
        for j in range(i + 1, g.d):
            counts = np.bincount(out[:, i] * g.q + out[:, j], minlength=g.q * g.q)
            worst = max(worst, int(np.abs(counts - 1).max()))
    return worst


def modulo_deviation(table: np.ndarray, targets: Sequence[int]) -> Fraction:
    """Max deviation of single and pair probabilities of the reduced table from uniform.

    `table` lists every output row of a generator with equal weight.
    """
    table = np.asarray(table, dtype=np.int64)
    rows, d = table.shape
    if len(targets) != d:
        raise ValueError("one target per coordinate")
    red = table % np.asarray(targets, dtype=np.int64)[None, :]
    worst = Fraction(0)
    for i in range(d):
        counts = np.bincount(red[:, i], minlength=targets[i])
        for c in counts.tolist():
            worst = max(worst, abs(Fraction(c, rows) - Fraction(1, targets[i])))
        for j in range(i + 1, d):
            counts = np.bincount(red[:, i] * targets[j] + red[:, j], minlength=targets[i] * targets[j])
            for c in counts.tolist():
                worst = max(worst, abs(Fraction(c, rows) - Fraction(1, targets[i] * targets[j])))
    return worst


def product_table(m: int, d: int) -> np.ndarray:
    """The uniform distribution on [m]^d as an explicit table (pairwise independent for any m)."""
    grids = np.meshgrid(*[np.arange(m)] * d, indexing="ij")
    return np.stack([x.ravel() for x in grids], axis=1)
