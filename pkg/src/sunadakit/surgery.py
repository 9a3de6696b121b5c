"""Filling slopes that a peripheral-cyclic representation survives.

Notation: the prime is ``prime`` (l), and a filling slope is (m, n),
meaning the word meridian^m longitude^n is killed.  If the cusp maps into
a cyclic group <x> of order l with meridian -> x^s and longitude -> x^t,
the representation factors through the filling exactly when
m s + n t = 0 mod l.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import count as counter
from math import gcd
from typing import Iterator

from .homsearch import HomRecord
from .psl2 import ProjectiveMatrix, check_prime
from .words import Word


class SurgeryError(ValueError):
    pass


@dataclass(frozen=True)
class PeripheralExponents:
    prime: int
    s: int
    t: int

    def __post_init__(self):
        check_prime(self.prime)
        object.__setattr__(self, "s", self.s % self.prime)
        object.__setattr__(self, "t", self.t % self.prime)
        if self.s == 0 and self.t == 0:
            raise SurgeryError("peripheral image is trivial (s = t = 0)")


@dataclass(frozen=True, order=True)
class FillingSlope:
    m: int
    n: int

    def __post_init__(self):
        if gcd(self.m, self.n) != 1:
            raise SurgeryError(f"slope ({self.m}, {self.n}) is not primitive")

    def satisfies(self, e: PeripheralExponents) -> bool:
        return (self.m * e.s + self.n * e.t) % e.prime == 0

    def filling_word(self, meridian: Word, longitude: Word) -> Word:
        return meridian**self.m * longitude**self.n

    def __str__(self) -> str:
        return f"{self.m}/{self.n}"


def discrete_log(y: ProjectiveMatrix, x: ProjectiveMatrix) -> int | None:
    """Least k >= 0 with x^k = y, or None if y is not a power of x."""
    cur = ProjectiveMatrix.identity(x.p)
    for k in range(x.order()):
        if cur == y:
            return k
        cur = cur * x
    return None


def exponents_from_images(mu: ProjectiveMatrix, lam: ProjectiveMatrix) -> PeripheralExponents:
    """Exponents base x = mu (or x = lam when mu is trivial)."""
    p = mu.p
    if mu.is_identity() and lam.is_identity():
        raise SurgeryError("peripheral image is trivial")
    x = lam if mu.is_identity() else mu
    s = discrete_log(mu, x)
    t = discrete_log(lam, x)
    if s is None or t is None:
        raise SurgeryError("peripheral image is not cyclic in the chosen generator")
    if x.order() != p:
        raise SurgeryError(f"peripheral generator has order {x.order()}, not {p}")
    return PeripheralExponents(p, s, t)


def exponents_from_hom(h: HomRecord, cusp_index: int = 0) -> PeripheralExponents:
    cusps = h.presentation.cusps
    if not 0 <= cusp_index < len(cusps):
        raise SurgeryError(f"no cusp with index {cusp_index}")
    c = cusps[cusp_index]
    return exponents_from_images(h.image_of(c.meridian), h.image_of(c.longitude))


def _pairs_by_size() -> Iterator[tuple[int, int]]:
    """All integer pairs ordered by |m| + |n|, then lexicographically."""
    yield 0, 0
    for size in counter(1):
        pts = []
        for m in range(-size, size + 1):
            r = size - abs(m)
            pts.append((m, -r))
            if r:
                pts.append((m, r))
        yield from sorted(pts)


def iter_slopes(e: PeripheralExponents) -> Iterator[FillingSlope]:
    """Primitive slopes (m, n) with m s + n t = 0 mod l.

    A slope and its negative are the same filling; only the one with
    n > 0, or n = 0 and m > 0, is produced.
    """
    for m, n in _pairs_by_size():
        if n < 0 or (n == 0 and m <= 0):
            continue
        if gcd(m, n) == 1 and (m * e.s + n * e.t) % e.prime == 0:
            yield FillingSlope(m, n)


def filling_slopes(e: PeripheralExponents, count: int) -> list[FillingSlope]:
    out = []
    for slope in iter_slopes(e):
        if len(out) >= count:
            break
        out.append(slope)
    return out
