"""Prime-field arithmetic and low-degree polynomials over F_q."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


class FieldError(ValueError):
    pass


@lru_cache(maxsize=4096)
def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0 or q % 3 == 0:
        return False
    f = 5
    while f * f <= q:
        if q % f == 0 or q % (f + 2) == 0:
            return False
        f += 6
    return True


def next_prime(m: int) -> int:
    """Smallest prime >= m."""
    q = max(2, int(m))
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class FieldElement:
    value: int
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise FieldError(f"modulus {self.q} is not prime")
        if not 0 <= self.value < self.q:
            raise FieldError(f"value {self.value} outside [0, {self.q})")

    def _check(self, other: "FieldElement") -> None:
        if self.q != other.q:
            raise FieldError(f"modulus mismatch: {self.q} vs {other.q}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value + other.value) % self.q, self.q)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value - other.value) % self.q, self.q)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value * other.value) % self.q, self.q)

    def __neg__(self) -> "FieldElement":
        return FieldElement((-self.value) % self.q, self.q)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise FieldError("zero has no inverse")
        return FieldElement(pow(self.value, self.q - 2, self.q), self.q)

    def __int__(self) -> int:
        return self.value


def element(value: int, q: int) -> FieldElement:
    return FieldElement(value % q, q)


def field_op(a: FieldElement, b: FieldElement | None, kind: str) -> FieldElement:
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "inv":
        if b is not None:
            a._check(b)
        return a.inverse()
    raise FieldError(f"unknown field operation {kind!r}")


@dataclass(frozen=True)
class Poly:
    coefficients: tuple[FieldElement, ...]
    degree_bound: int

    def __post_init__(self):
        if len(self.coefficients) > self.degree_bound + 1:
            raise FieldError("more coefficients than the degree bound allows")
        if len({c.q for c in self.coefficients}) > 1:
            raise FieldError("coefficients use different moduli")

    @property
    def q(self) -> int | None:
        return self.coefficients[0].q if self.coefficients else None

    def values(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.coefficients)

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], q: int, degree_bound: int | None = None) -> "Poly":
        bound = len(coeffs) - 1 if degree_bound is None else degree_bound
        return cls(tuple(element(c, q) for c in coeffs), max(bound, 0))


def poly_eval(p: Poly, x: FieldElement) -> FieldElement:
    if p.q is not None and p.q != x.q:
        raise FieldError(f"modulus mismatch: {p.q} vs {x.q}")
    acc = 0
    for c in reversed(p.coefficients):
        acc = (acc * x.value + c.value) % x.q
    return FieldElement(acc, x.q)


def id_to_poly(u: int, q: int, degree_bound: int) -> Poly:
    """Base-q digits of u, low digit first, as a polynomial of degree <= degree_bound."""
    if not is_prime(q):
        raise FieldError(f"modulus {q} is not prime")
    if u < 0 or u >= q ** (degree_bound + 1):
        raise FieldError(f"id {u} does not fit in degree bound {degree_bound} over F_{q}")
    digits = []
    while u:
        u, r = divmod(u, q)
        digits.append(r)
    return Poly.from_ints(digits, q, degree_bound)


def eval_ids(ids: Iterable[int] | np.ndarray, x: int, q: int, degree_bound: int) -> np.ndarray:
    """Vectorized p_u(x) for many ids at once (same result as id_to_poly + poly_eval)."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or (degree_bound + 1) * np.log2(q) < 63 and ids.max() >= q ** (degree_bound + 1)):
        raise FieldError("id out of range for the configured degree bound")
    rest = ids.copy()
    acc = np.zeros_like(ids)
    power = 1
    for _ in range(degree_bound + 1):
        rest, digit = np.divmod(rest, q)
        acc = (acc + digit * power) % q
        power = (power * x) % q
    return acc
