"""Arithmetic in Z[t]/(f) and reduction modulo degree-one primes.

Polynomials are tuples of integer coefficients in ascending degree.  A
degree-one prime above a rational prime l is represented by the pair
(l, r) with f(r) = 0 mod l; reducing modulo it is evaluation at t = r.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .psl2 import ProjectiveMatrix, check_prime

Poly = tuple[int, ...]


def trim(c: Sequence[int]) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(x: Poly, y: Poly) -> Poly:
    n = max(len(x), len(y))
    return trim([(x[i] if i < len(x) else 0) + (y[i] if i < len(y) else 0) for i in range(n)])


def poly_neg(x: Poly) -> Poly:
    return tuple(-v for v in x)


def poly_mul(x: Poly, y: Poly) -> Poly:
    if not x or not y:
        return ()
    out = [0] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                out[i + j] += a * b
    return trim(out)


def poly_derivative(f: Poly) -> Poly:
    return trim([i * f[i] for i in range(1, len(f))])


def poly_eval_mod(f: Poly, x: int, m: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % m
    return acc


def bareiss_det(M: list[list[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    A = [row[:] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def resultant(f: Poly, g: Poly) -> int:
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return 0
    size = m + n
    if size == 0:
        return 1
    rows = []
    fd = list(reversed(f))
    gd = list(reversed(g))
    for i in range(n):
        rows.append([0] * i + fd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gd + [0] * (size - n - 1 - i))
    return bareiss_det(rows)


def poly_discriminant(f: Sequence[int]) -> int:
    """disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)."""
    f = trim(f)
    n = len(f) - 1
    if n < 2:
        raise ValueError("discriminant needs degree >= 2")
    r = resultant(f, poly_derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, rem = divmod(sign * r, f[-1])
    assert rem == 0
    return q


# -- polynomials over GF(l) -------------------------------------------------


def gf_trim(x: Sequence[int], l: int) -> Poly:
    return trim([v % l for v in x])


def gf_sub(x: Poly, y: Poly, l: int) -> Poly:
    n = max(len(x), len(y))
    return gf_trim([(x[i] if i < len(x) else 0) - (y[i] if i < len(y) else 0) for i in range(n)], l)


def gf_mul(x: Poly, y: Poly, l: int) -> Poly:
    return gf_trim(poly_mul(x, y), l)


def gf_divmod(x: Poly, y: Poly, l: int) -> tuple[Poly, Poly]:
    x = list(gf_trim(x, l))
    y = gf_trim(y, l)
    if not y:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(y[-1], -1, l)
    dy = len(y) - 1
    q = [0] * max(len(x) - dy, 0)
    while len(x) - 1 >= dy and x:
        shift = len(x) - 1 - dy
        c = x[-1] * inv_lead % l
        q[shift] = c
        for i, v in enumerate(y):
            x[i + shift] = (x[i + shift] - c * v) % l
        x = list(trim(x))
    return gf_trim(q, l), tuple(x)


def gf_mod(x: Poly, y: Poly, l: int) -> Poly:
    return gf_divmod(x, y, l)[1]


def gf_gcd(x: Poly, y: Poly, l: int) -> Poly:
    x, y = gf_trim(x, l), gf_trim(y, l)
    while y:
        x, y = y, gf_mod(x, y, l)
    if not x:
        return ()
    inv = pow(x[-1], -1, l)
    return gf_trim([v * inv for v in x], l)


def gf_powmod(base: Poly, e: int, mod: Poly, l: int) -> Poly:
    result: Poly = (1,)
    base = gf_mod(base, mod, l)
    while e:
        if e & 1:
            result = gf_mod(gf_mul(result, base, l), mod, l)
        base = gf_mod(gf_mul(base, base, l), mod, l)
        e >>= 1
    return result


def distinct_degree_factorization(f: Sequence[int], l: int) -> list[tuple[int, int]]:
    """(d, number of irreducible degree-d factors) for squarefree f mod l."""
    f = gf_trim(f, l)
    out = []
    rest = f
    x: Poly = (0, 1)
    h = x
    d = 0
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = gf_powmod(h, l, rest, l)
        g = gf_gcd(rest, gf_sub(h, x, l), l)
        if len(g) > 1:
            out.append((d, (len(g) - 1) // d))
            rest = gf_divmod(rest, g, l)[0]
            h = gf_mod(h, rest, l)
    if len(rest) > 1:
        out.append((len(rest) - 1, 1))
    return out


@dataclass(frozen=True)
class SplittingReport:
    prime: int
    degrees: tuple[int, ...]  # residue degrees, sorted
    roots: tuple[int, ...]  # residues r with f(r) = 0 mod prime

    def as_dict(self) -> dict:
        return {"prime": self.prime, "degrees": list(self.degrees), "roots": list(self.roots)}


class RamifiedPrime(ValueError):
    pass


def split_prime(f: Sequence[int], l: int) -> SplittingReport:
    """Residue degrees of the primes above l, read off from f mod l.

    Only valid when l does not divide disc(f) and the ring of integers is
    Z[t] (or at least l does not divide the index); ramified l is refused.
    """
    check_prime(l)
    f = trim(f)
    if poly_discriminant(f) % l == 0:
        raise RamifiedPrime(f"{l} divides discriminant")
    degrees = []
    for d, k in distinct_degree_factorization(f, l):
        degrees += [d] * k
    roots = tuple(r for r in range(l) if poly_eval_mod(f, r, l) == 0)
    return SplittingReport(l, tuple(sorted(degrees)), roots)


def common_roots(f: Sequence[int], g: Sequence[int], l: int) -> list[int]:
    return [r for r in range(l) if poly_eval_mod(f, r, l) == 0 and poly_eval_mod(g, r, l) == 0]


# -- the field and its elements ---------------------------------------------


@dataclass(frozen=True)
class NumberField:
    min_poly: Poly

    def __post_init__(self):
        f = trim(self.min_poly)
        if len(f) < 2 or f[-1] != 1:
            raise ValueError("minimal polynomial must be monic of degree >= 1")
        object.__setattr__(self, "min_poly", f)

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    def reduce(self, x: Sequence[int]) -> Poly:
        f = self.min_poly
        n = self.degree
        c = list(trim(x))
        for k in range(len(c) - 1, n - 1, -1):
            lead = c[k]
            if lead:
                for i in range(n + 1):
                    c[k - n + i] -= lead * f[i]
        return trim(c[:n])

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        return FieldElement(self, self.reduce(coeffs))

    def to_json(self) -> dict:
        return {"min_poly": list(self.min_poly)}

    @classmethod
    def from_json(cls, data: dict) -> NumberField:
        return cls(tuple(int(v) for v in data["min_poly"]))


@dataclass(frozen=True)
class FieldElement:
    field: NumberField
    coeffs: Poly

    def __add__(self, other: FieldElement) -> FieldElement:
        return FieldElement(self.field, poly_add(self.coeffs, other.coeffs))

    def __neg__(self) -> FieldElement:
        return FieldElement(self.field, poly_neg(self.coeffs))

    def __sub__(self, other: FieldElement) -> FieldElement:
        return self + (-other)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return FieldElement(self.field, self.field.reduce(poly_mul(self.coeffs, other.coeffs)))

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate_mod(self, l: int, root: int) -> int:
        return poly_eval_mod(self.coeffs, root, l)


@dataclass(frozen=True)
class NFMatrix:
    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    @classmethod
    def from_coeffs(cls, K: NumberField, rows) -> NFMatrix:
        (a, b), (c, d) = rows
        return cls(K.element(a), K.element(b), K.element(c), K.element(d))

    @classmethod
    def identity(cls, K: NumberField) -> NFMatrix:
        return cls(K.element([1]), K.element([]), K.element([]), K.element([1]))

    @property
    def field(self) -> NumberField:
        return self.a.field

    def __mul__(self, o: NFMatrix) -> NFMatrix:
        return NFMatrix(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> NFMatrix:
        return NFMatrix(-self.a, -self.b, -self.c, -self.d)

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> NFMatrix:
        """Adjugate; equals the inverse when the determinant is 1."""
        return NFMatrix(self.d, -self.b, -self.c, self.a)

    def is_identity(self) -> bool:
        return self == NFMatrix.identity(self.field)

    def equal_up_to_sign(self, other: NFMatrix) -> bool:
        return self == other or self == -other

    def to_json(self) -> list:
        return [[list(self.a.coeffs), list(self.b.coeffs)], [list(self.c.coeffs), list(self.d.coeffs)]]


class ReductionError(ValueError):
    pass


def reduce_matrix(m: NFMatrix, l: int, root: int) -> ProjectiveMatrix:
    """Reduce modulo the degree-one prime (l, root) into PSL(2, l)."""
    if poly_eval_mod(m.field.min_poly, root, l) != 0:
        raise ReductionError(f"{root} is not a root of the minimal polynomial mod {l}")
    a, b, c, d = (x.evaluate_mod(l, root) for x in (m.a, m.b, m.c, m.d))
    if (a * d - b * c) % l != 1:
        raise ReductionError(f"reduced determinant is {(a * d - b * c) % l}, not 1, mod {l}")
    return ProjectiveMatrix(a, b, c, d, l)


def load_field(path: str | Path) -> NumberField:
    return NumberField.from_json(json.loads(Path(path).read_text()))


def load_matrices(path: str | Path, K: NumberField) -> dict[str, NFMatrix]:
    data = json.loads(Path(path).read_text())
    return {name: NFMatrix.from_coeffs(K, rows) for name, rows in data.items()}
