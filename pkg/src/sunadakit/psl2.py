"""Exact arithmetic in PSL(2, p) for small primes p.

A matrix is stored as four residues and canonicalized under the sign
ambiguity: the first nonzero entry in the scan order (a, b, c, d) is taken
in 1..(p-1)/2.  This rule is part of the report format, so
``[[6,1],[6,0]] mod 7`` is printed as ``[[1,6],[1,0]] mod 7``.

Whole-group data (element list, multiplication table, conjugacy classes)
is built on demand per prime by :func:`psl_group` and cached.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(p: int) -> int:
    if not is_prime(p) or p == 2:
        raise ValueError(f"modulus must be an odd prime, got {p}")
    return p


def canonical_entries(a: int, b: int, c: int, d: int, p: int) -> tuple[int, int, int, int]:
    a, b, c, d = a % p, b % p, c % p, d % p
    half = (p - 1) // 2
    lead = a or b or c or d
    if lead > half:
        a, b, c, d = (-a) % p, (-b) % p, (-c) % p, (-d) % p
    return a, b, c, d


@dataclass(frozen=True, order=True)
class ProjectiveMatrix:
    """An element of PSL(2, p); always canonical, see module docstring."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        p = self.p
        a, b, c, d = canonical_entries(self.a, self.b, self.c, self.d, p)
        if (a * d - b * c) % p != 1:
            raise ValueError(
                f"determinant of [[{self.a},{self.b}],[{self.c},{self.d}]] is not 1 mod {p}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int) -> ProjectiveMatrix:
        (a, b), (c, d) = rows
        return cls(a, b, c, d, p)

    @classmethod
    def identity(cls, p: int) -> ProjectiveMatrix:
        return cls(1, 0, 0, 1, p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __mul__(self, other: ProjectiveMatrix) -> ProjectiveMatrix:
        return multiply(self, other)

    def __pow__(self, n: int) -> ProjectiveMatrix:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = ProjectiveMatrix.identity(self.p)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> ProjectiveMatrix:
        return ProjectiveMatrix(self.d, -self.b, -self.c, self.a, self.p)

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def trace_pair(self) -> tuple[int, int]:
        """Trace up to sign, as the sorted pair {t, p - t}."""
        t = (self.a + self.d) % self.p
        return tuple(sorted((t, (-t) % self.p)))

    def trace_squared(self) -> int:
        return (self.a + self.d) ** 2 % self.p

    def order(self) -> int:
        x, k = self, 1
        while not x.is_identity():
            x = x * self
            k += 1
        return k

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] mod {self.p}"


def multiply(x: ProjectiveMatrix, y: ProjectiveMatrix) -> ProjectiveMatrix:
    if x.p != y.p:
        raise ValueError(f"moduli differ: {x.p} vs {y.p}")
    return ProjectiveMatrix(
        x.a * y.a + x.b * y.c,
        x.a * y.b + x.b * y.d,
        x.c * y.a + x.d * y.c,
        x.c * y.b + x.d * y.d,
        x.p,
    )


def is_parabolic(x: ProjectiveMatrix) -> bool:
    return x.trace_squared() == 4 % x.p and not x.is_identity()


def closure(gens: Iterable[ProjectiveMatrix]) -> frozenset[ProjectiveMatrix]:
    gens = list(gens)
    if not gens:
        raise ValueError("closure needs at least one generator")
    p = gens[0].p
    if any(g.p != p for g in gens):
        raise ValueError("generators have different moduli")
    ident = ProjectiveMatrix.identity(p)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


@dataclass(frozen=True)
class ConjClassTable:
    representatives: tuple[ProjectiveMatrix, ...]
    membership: np.ndarray  # element index -> class index
    sizes: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    def class_of(self, x: ProjectiveMatrix) -> int:
        return int(self.membership[psl_group(x.p).index(x)])

    def __len__(self) -> int:
        return len(self.sizes)


class PSLGroup:
    """The full group PSL(2, p) with elements numbered 0..N-1.

    Elements are numbered in increasing order of their canonical entry tuple.
    """

    def __init__(self, p: int):
        self.p = check_prime(p)
        keys = set()
        for a in range(p):
            for b in range(p):
                for c in range(p):
                    for d in range(p):
                        if (a * d - b * c) % p == 1:
                            keys.add(canonical_entries(a, b, c, d, p))
        self.entries = np.array(sorted(keys), dtype=np.int64)
        self.order = p * (p * p - 1) // 2
        assert len(self.entries) == self.order
        self._lookup = np.full(p**4, -1, dtype=np.int64)
        self._lookup[self._key(self.entries)] = np.arange(self.order)

    def _key(self, e: np.ndarray) -> np.ndarray:
        p = self.p
        return ((e[..., 0] * p + e[..., 1]) * p + e[..., 2]) * p + e[..., 3]

    def _canon_array(self, e: np.ndarray) -> np.ndarray:
        p = self.p
        e = e % p
        lead = np.where(
            e[..., 0] != 0,
            e[..., 0],
            np.where(e[..., 1] != 0, e[..., 1], np.where(e[..., 2] != 0, e[..., 2], e[..., 3])),
        )
        flip = lead > (p - 1) // 2
        return np.where(flip[..., None], (-e) % p, e)

    def lookup_entries(self, e: np.ndarray) -> np.ndarray:
        """Indices of (possibly non-canonical) entry arrays of shape (..., 4)."""
        return self._lookup[self._key(self._canon_array(np.asarray(e)))]

    def __len__(self) -> int:
        return self.order

    def element(self, i: int) -> ProjectiveMatrix:
        a, b, c, d = (int(v) for v in self.entries[i])
        return ProjectiveMatrix(a, b, c, d, self.p)

    def elements(self) -> list[ProjectiveMatrix]:
        return [self.element(i) for i in range(self.order)]

    def index(self, x: ProjectiveMatrix) -> int:
        if x.p != self.p:
            raise ValueError(f"element mod {x.p} is not in PSL(2,{self.p})")
        return int(self._lookup[self._key(np.array(x.entries))])

    @cached_property
    def identity(self) -> int:
        return self.index(ProjectiveMatrix.identity(self.p))

    @cached_property
    def mul(self) -> np.ndarray:
        """mul[i, j] = index of element_i * element_j."""
        e = self.entries
        x = e[:, None, :]
        y = e[None, :, :]
        prod = np.stack(
            [
                x[..., 0] * y[..., 0] + x[..., 1] * y[..., 2],
                x[..., 0] * y[..., 1] + x[..., 1] * y[..., 3],
                x[..., 2] * y[..., 0] + x[..., 3] * y[..., 2],
                x[..., 2] * y[..., 1] + x[..., 3] * y[..., 3],
            ],
            axis=-1,
        )
        return self.lookup_entries(prod).astype(np.int32)

    @cached_property
    def mul_list(self) -> list[list[int]]:
        return self.mul.tolist()

    @cached_property
    def inv(self) -> np.ndarray:
        e = self.entries
        invs = np.stack([e[:, 3], -e[:, 1], -e[:, 2], e[:, 0]], axis=-1)
        return self.lookup_entries(invs).astype(np.int32)

    @cached_property
    def element_orders(self) -> np.ndarray:
        mul = self.mul
        orders = np.ones(self.order, dtype=np.int64)
        cur = np.arange(self.order)
        done = cur == self.identity
        k = 1
        while not done.all():
            cur = mul[cur, np.arange(self.order)]
            k += 1
            hit = (cur == self.identity) & ~done
            orders[hit] = k
            done |= hit
        return orders

    @cached_property
    def conjugation(self) -> np.ndarray:
        """conjugation[g, x] = index of g x g^-1."""
        return self.mul[self.mul, self.inv[:, None]]

    @cached_property
    def outer(self) -> np.ndarray:
        """Permutation of element indices induced by conjugating with diag(nu, 1),
        nu a quadratic non-residue; represents the nontrivial outer class."""
        p = self.p
        nu = nonresidue(p)
        nu_inv = pow(nu, -1, p)
        e = self.entries
        img = np.stack([e[:, 0], nu * e[:, 1], nu_inv * e[:, 2], e[:, 3]], axis=-1)
        return self.lookup_entries(img).astype(np.int32)

    @cached_property
    def aut_table(self) -> np.ndarray:
        """Rows are the permutations of element indices by all of PGL(2, p):
        first inner conjugations, then inner composed with the outer one."""
        conj = self.conjugation
        return np.concatenate([conj, conj[:, self.outer]], axis=0)

    @cached_property
    def classes(self) -> ConjClassTable:
        conj = self.conjugation
        membership = np.full(self.order, -1, dtype=np.int64)
        orbits = []
        for x in range(self.order):
            if membership[x] != -1:
                continue
            orbit = np.unique(conj[:, x])
            membership[orbit] = -2
            orbits.append(tuple(int(v) for v in orbit))
        orders = self.element_orders
        orbits.sort(key=lambda o: (orders[o[0]], len(o), o[0]))
        for k, orbit in enumerate(orbits):
            membership[list(orbit)] = k
        return ConjClassTable(
            representatives=tuple(self.element(o[0]) for o in orbits),
            membership=membership,
            sizes=tuple(len(o) for o in orbits),
            members=tuple(orbits),
        )

    def closure_indices(self, gens: Iterable[int], limit: int | None = None) -> frozenset[int] | None:
        """Subgroup generated by element indices; None once it exceeds ``limit``."""
        mul = self.mul_list
        gens = list(dict.fromkeys(gens))
        ident = self.identity
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                row = mul[x]
                for g in gens:
                    y = row[g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            if limit is not None and len(seen) > limit:
                return None
            frontier = nxt
        return frozenset(seen)

    def word_image(self, letters, images: Sequence[int]) -> int:
        mul = self.mul_list
        inv = self.inv
        cur = self.identity
        for g, e in letters:
            x = images[g] if e > 0 else int(inv[images[g]])
            cur = mul[cur][x]
        return cur


def nonresidue(p: int) -> int:
    for nu in range(2, p):
        if pow(nu, (p - 1) // 2, p) == p - 1:
            return nu
    raise ValueError(f"no non-residue mod {p}")


@lru_cache(maxsize=None)
def psl_group(p: int) -> PSLGroup:
    return PSLGroup(p)


def enumerate_group(p: int) -> list[ProjectiveMatrix]:
    return psl_group(p).elements()


def conjugacy_classes(p: int) -> ConjClassTable:
    return psl_group(p).classes


def format_matrix(x: ProjectiveMatrix) -> str:
    return str(x)
