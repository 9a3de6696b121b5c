"""Smith normal form over Python integers and abelian invariants of cokernels."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

IntegerMatrix = list[list[int]]


def _pivot(A: IntegerMatrix, t: int) -> tuple[int, int] | None:
    best = None
    best_val = 0
    for i in range(t, len(A)):
        row = A[i]
        for j in range(t, len(row)):
            v = abs(row[j])
            if v and (best is None or v < best_val):
                best, best_val = (i, j), v
                if v == 1:
                    return best
    return best


def smith_normal_form(m: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal d1 | d2 | ... of the Smith form; length min(rows, cols).

    Pivots on the entry of least absolute value (first in row-major order).
    """
    A = [[int(v) for v in row] for row in m]
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    if any(len(row) != ncols for row in A):
        raise ValueError("ragged matrix")
    k = min(nrows, ncols)
    diag: list[int] = []
    for t in range(k):
        while True:
            piv = _pivot(A, t)
            if piv is None:
                diag.extend([0] * (k - t))
                return diag
            i, j = piv
            A[t], A[i] = A[i], A[t]
            if j != t:
                for row in A:
                    row[t], row[j] = row[j], row[t]
            p = A[t][t]
            dirty = False
            prow = A[t]
            for i in range(t + 1, nrows):
                v = A[i][t]
                if v:
                    q = v // p
                    row = A[i]
                    for jj in range(t, ncols):
                        if prow[jj]:
                            row[jj] -= q * prow[jj]
                    if row[t]:
                        dirty = True
            for j in range(t + 1, ncols):
                v = prow[j]
                if v:
                    q = v // p
                    for row in A[t:]:
                        if row[t]:
                            row[j] -= q * row[t]
                    if prow[j]:
                        dirty = True
            if dirty:
                continue
            # row t and column t are clear; enforce divisibility on the rest
            bad = None
            for i in range(t + 1, nrows):
                if any(v % p for v in A[i][t + 1 :]):
                    bad = i
                    break
            if bad is None:
                break
            row = A[bad]
            for jj in range(t, ncols):
                prow[jj] += row[jj]
        diag.append(abs(A[t][t]))
    return diag


@dataclass(frozen=True)
class AbelianInvariants:
    """Finite cyclic factors (each > 1, dividing the next) and the free rank."""

    torsion: tuple[int, ...]
    free_rank: int

    @property
    def factors(self) -> tuple[int, ...]:
        """Invariant factors in the flat form (d1, ..., dk, 0, ..., 0)."""
        return self.torsion + (0,) * self.free_rank

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> AbelianInvariants:
        torsion = tuple(d for d in factors if d > 1)
        return cls(torsion, sum(1 for d in factors if d == 0))


def abelian_invariants(m: Sequence[Sequence[int]], ambient_rank: int) -> AbelianInvariants:
    """Invariants of Z^ambient_rank modulo the row space of ``m``."""
    rows = [list(r) for r in m if any(r)]
    if any(len(r) != ambient_rank for r in rows):
        raise ValueError("relation rows must have length ambient_rank")
    if not rows:
        return AbelianInvariants((), ambient_rank)
    diag = smith_normal_form(rows)
    nonzero = [d for d in diag if d]
    return AbelianInvariants(
        tuple(d for d in nonzero if d > 1), ambient_rank - len(nonzero)
    )
