"""Regular expanders on seed spaces, used as INW level graphs.

Every level graph exposes `neighbor(x, y)` vectorized over numpy arrays, its
size N, degree d, and `lam`, a certified bound on the second largest absolute
eigenvalue of the normalized adjacency matrix (None when not certified).
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
CERTIFY_LIMIT = 1024
_ROUNDS = 4


class CompleteLevel:
    """Gamma(x, y) = y: the complete graph with loops, lam = 0."""

    kind = "complete"

    def __init__(self, size: int):
        self.size = int(size)
        self.degree = int(size)
        self.lam = 0.0

    def neighbor(self, x, y):
        return np.asarray(y, dtype=np.uint64) + np.zeros_like(np.asarray(x, dtype=np.uint64))

    def describe(self) -> dict:
        return {"kind": self.kind, "size": self.size, "degree": self.degree, "lam": self.lam}


def normalized_adjacency(perms: np.ndarray, size: int) -> np.ndarray:
    a = np.zeros((size, size))
    rows = np.arange(size)
    for p in perms:
        np.add.at(a, (rows, p), 1.0)
        np.add.at(a, (p, rows), 1.0)
    return a / (2 * len(perms))


def second_eigenvalue(a: np.ndarray) -> float:
    ev = np.linalg.eigvalsh(a)
    return float(max(abs(ev[0]), abs(ev[-2])))


class TablePermutationLevel:
    """d/2 random permutations plus their inverses, stored explicitly.

    Built from `construction_seed`; among `tries` candidates the one with the
    smallest certified eigenvalue is kept.
    """

    kind = "table"

    def __init__(self, size: int, degree: int, construction_seed: int, tries: int = 8):
        if degree % 2 or degree < 2:
            raise ValueError("permutation levels need an even degree")
        self.size, self.degree = int(size), int(degree)
        self.construction_seed = int(construction_seed)
        best = None
        for t in range(tries):
            rng = np.random.default_rng([self.construction_seed, t])
            perms = np.array([rng.permutation(self.size) for _ in range(self.degree // 2)])
            lam = second_eigenvalue(normalized_adjacency(perms, self.size))
            if best is None or lam < best[0]:
                best = (lam, perms, t)
        self.lam, perms, self.attempt = best
        self.perms = perms.astype(np.uint64)
        self.inverses = np.argsort(perms, axis=1).astype(np.uint64)
        self.tables = np.concatenate([self.perms, self.inverses])

    def neighbor(self, x, y):
        x = np.asarray(x, dtype=np.uint64)
        y = np.asarray(y, dtype=np.uint64)
        return self.tables[y.astype(np.int64), x.astype(np.int64)]

    def describe(self) -> dict:
        return {"kind": self.kind, "size": self.size, "degree": self.degree,
                "construction_seed": self.construction_seed, "attempt": self.attempt,
                "lam": self.lam}


def _splitmix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


class _MaskPermutation:
    """Keyed bijection on [2^s] built from add / odd-multiply / xorshift rounds."""

    def __init__(self, bits: int, key: int):
        self.bits = bits
        self.mask = (1 << bits) - 1
        self.shift = max(1, (bits + 1) // 2)
        self.adds, self.muls, self.inv_muls = [], [], []
        k = key
        for _ in range(_ROUNDS):
            k = _splitmix(k)
            self.adds.append(k & self.mask)
            k = _splitmix(k)
            m = (k | 1) & self.mask if bits else 0
            if bits:
                m |= 1
            self.muls.append(m)
            self.inv_muls.append(pow(m, -1, 1 << bits) if bits else 0)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if self.bits == 0:
            return x
        mask = np.uint64(self.mask)
        sh = np.uint64(self.shift)
        for a, m in zip(self.adds, self.muls):
            x = (x + np.uint64(a)) & mask
            x = (x * np.uint64(m)) & mask
            x = x ^ (x >> sh)
        return x

    def backward(self, x: np.ndarray) -> np.ndarray:
        if self.bits == 0:
            return x
        mask = np.uint64(self.mask)
        sh = np.uint64(self.shift)
        steps = -(-self.bits // self.shift)
        for a, mi in zip(reversed(self.adds), reversed(self.inv_muls)):
            y = x
            for _ in range(steps):
                x = y ^ (x >> sh)
            x = (x * np.uint64(mi)) & mask
            x = (x - np.uint64(a)) & mask
        return x


class KeyedPermutationLevel:
    """Implicit d-regular graph on [N] for seed spaces too large to tabulate.

    Uses d/2 keyed permutations (cycle-walked down to [N]) and their inverses.
    The spectral gap is not certified, so lam is None.
    """

    kind = "keyed"

    def __init__(self, size: int, degree: int, construction_seed: int):
        if degree % 2 or degree < 2:
            raise ValueError("permutation levels need an even degree")
        if size > 1 << 62:
            raise ValueError("seed space exceeds 62 bits")
        self.size, self.degree = int(size), int(degree)
        self.construction_seed = int(construction_seed)
        bits = (self.size - 1).bit_length()
        self.perms = [_MaskPermutation(bits, _splitmix(self.construction_seed * 1000003 + j))
                      for j in range(self.degree // 2)]
        self.lam = None

    def _walk(self, fn, x: np.ndarray) -> np.ndarray:
        n = np.uint64(self.size)
        x = fn(x)
        bad = x >= n
        while bad.any():
            x[bad] = fn(x[bad])
            bad = x >= n
        return x

    def neighbor(self, x, y):
        x = np.array(x, dtype=np.uint64, ndmin=1)
        y = np.broadcast_to(np.asarray(y, dtype=np.int64), x.shape)
        out = np.empty_like(x)
        half = self.degree // 2
        for label in np.unique(y):
            sel = y == label
            p = self.perms[label % half]
            fn = p.forward if label < half else p.backward
            out[sel] = self._walk(fn, x[sel].copy())
        return out

    def describe(self) -> dict:
        return {"kind": self.kind, "size": self.size, "degree": self.degree,
                "construction_seed": self.construction_seed, "lam": None}


def make_level(size: int, degree: int, construction_seed: int, certify_limit: int = CERTIFY_LIMIT):
    if degree >= size:
        return CompleteLevel(size)
    if size <= certify_limit:
        return TablePermutationLevel(size, degree, construction_seed)
    return KeyedPermutationLevel(size, degree, construction_seed)
