"""Coset tables and HLT coset enumeration.

Columns of the working table are interleaved: column 2*g is generator g and
column 2*g + 1 its inverse.  Finished tables only keep the forward action
of each generator.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Sequence

from ..words import Presentation, Word

DEFAULT_COSET_LIMIT = 10**6


def coset_limit_default() -> int:
    return int(os.environ.get("SUNADAKIT_COSET_LIMIT", DEFAULT_COSET_LIMIT))


class CosetLimitExceeded(RuntimeError):
    pass


def word_columns(w: Word) -> list[int]:
    return [2 * g + (0 if e > 0 else 1) for g, e in w.letters]


@dataclass(frozen=True)
class CosetTable:
    """Right action of a finitely presented group on the cosets of a subgroup.

    ``action[g][i]`` is the coset i * g; ``base`` is the subgroup's own coset.
    """

    degree: int
    action: tuple[tuple[int, ...], ...]
    base: int = 0

    @property
    def ngens(self) -> int:
        return len(self.action)

    def inverse_action(self) -> list[list[int]]:
        out = []
        for perm in self.action:
            inv = [0] * self.degree
            for i, j in enumerate(perm):
                inv[j] = i
            out.append(inv)
        return out

    def columns(self) -> list[list[int]]:
        """Interleaved table rows: row[i][2g] = i*g, row[i][2g+1] = i*g^-1."""
        inv = self.inverse_action()
        rows = []
        for i in range(self.degree):
            row = []
            for g in range(self.ngens):
                row.append(self.action[g][i])
                row.append(inv[g][i])
            rows.append(row)
        return rows

    def apply(self, coset: int, w: Word) -> int:
        inv = None
        for g, e in w.letters:
            if e > 0:
                coset = self.action[g][coset]
            else:
                if inv is None:
                    inv = self.inverse_action()
                coset = inv[g][coset]
        return coset

    def word_permutation(self, w: Word) -> tuple[int, ...]:
        rows = self.columns()
        cols = word_columns(w)
        out = []
        for i in range(self.degree):
            c = i
            for x in cols:
                c = rows[c][x]
            out.append(c)
        return tuple(out)

    def is_transitive(self) -> bool:
        seen = {self.base}
        stack = [self.base]
        rows = self.columns()
        while stack:
            i = stack.pop()
            for j in rows[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.degree

    def validate(self, pres: Presentation, subgroup_gens: Sequence[Word] = ()) -> list[str]:
        """Problems found by independent checks; empty when the table is valid."""
        problems = []
        for g, perm in enumerate(self.action):
            if sorted(perm) != list(range(self.degree)):
                problems.append(f"generator {pres.generators[g]} does not act as a bijection")
        if problems:
            return problems
        if not self.is_transitive():
            problems.append("action is not transitive")
        for r in pres.relators:
            if self.word_permutation(r) != tuple(range(self.degree)):
                problems.append(f"relator {pres.fmt(r)} acts nontrivially")
        for w in subgroup_gens:
            if self.apply(self.base, w) != self.base:
                problems.append(f"subgroup generator {pres.fmt(w)} moves the base coset")
        return problems

    def standardize(self) -> CosetTable:
        """Relabel cosets in order of first appearance when scanning from the
        base row by row, columns in interleaved order."""
        rows = self.columns()
        new_of = {self.base: 0}
        order = [self.base]
        k = 0
        while k < len(order):
            for j in rows[order[k]]:
                if j not in new_of:
                    new_of[j] = len(order)
                    order.append(j)
            k += 1
        if len(order) != self.degree:
            raise ValueError("cannot standardize a non-transitive table")
        action = tuple(
            tuple(new_of[perm[old]] for old in order) for perm in self.action
        )
        return CosetTable(self.degree, action, 0)

    def rebased(self, base: int) -> CosetTable:
        return CosetTable(self.degree, self.action, base).standardize()

    def to_json(self) -> dict:
        return {"degree": self.degree, "action": [list(p) for p in self.action], "base": self.base}

    @classmethod
    def from_json(cls, data: dict | str) -> CosetTable:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["degree"]), tuple(tuple(p) for p in data["action"]), int(data.get("base", 0)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ngens: int, base: int = 0) -> CosetTable:
        action = tuple(tuple(row[2 * g] for row in rows) for g in range(ngens))
        return cls(len(rows), action, base)


class _Enumerator:
    def __init__(self, ncols: int, limit: int):
        self.ncols = ncols
        self.limit = limit
        self.table: list[list[int]] = [[-1] * ncols]
        self.parent = [0]
        self.live = 1
        self.lookaheads = 0

    def find(self, c: int) -> int:
        parent = self.parent
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def is_live(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int, rels) -> None:
        if self.live >= self.limit:
            self.lookahead(rels)
            if self.live >= self.limit:
                raise CosetLimitExceeded(
                    f"enumeration did not complete within limit of {self.limit} cosets"
                )
            if self.table[c][x] != -1 or not self.is_live(c):
                return
        n = len(self.table)
        self.table.append([-1] * self.ncols)
        self.parent.append(n)
        self.live += 1
        self.table[c][x] = n
        self.table[n][x ^ 1] = c

    def scan(self, c: int, w: list[int], fill: bool, rels) -> None:
        table = self.table
        f, i = c, 0
        b, j = c, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] != -1:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] != -1:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            if not fill:
                return
            passes = self.lookaheads
            self.define(f, w[i], rels)
            if self.lookaheads != passes:
                if not self.is_live(c):
                    return
                f, i, b, j = c, 0, c, len(w) - 1

    def merge(self, k: int, l: int, queue: list[int]) -> None:
        k, l = self.find(k), self.find(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.parent[l] = k
        self.live -= 1
        queue.append(l)

    def coincidence(self, a: int, b: int) -> None:
        table = self.table
        queue: list[int] = []
        self.merge(a, b, queue)
        q = 0
        while q < len(queue):
            e = queue[q]
            q += 1
            for x in range(self.ncols):
                f = table[e][x]
                if f == -1:
                    continue
                if table[f][x ^ 1] == e:
                    table[f][x ^ 1] = -1
                e1, f1 = self.find(e), self.find(f)
                if table[e1][x] != -1:
                    self.merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] != -1:
                    self.merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def lookahead(self, rels) -> None:
        self.lookaheads += 1
        for c in range(len(self.table)):
            if not self.is_live(c):
                continue
            for r in rels:
                self.scan(c, r, False, rels)
                if not self.is_live(c):
                    break

    def compact(self, ngens: int) -> CosetTable:
        live = [c for c in range(len(self.table)) if self.is_live(c)]
        new = {c: i for i, c in enumerate(live)}
        rows = [[new[self.find(self.table[c][x])] for x in range(self.ncols)] for c in live]
        return CosetTable.from_rows(rows, ngens, 0)


def coset_enumerate(
    pres: Presentation, subgroup_gens: Sequence[Word], limit: int | None = None
) -> CosetTable:
    """Enumerate cosets of the subgroup generated by ``subgroup_gens``.

    Raises :class:`CosetLimitExceeded` rather than return a partial table.
    The result is standardized, so numbering does not depend on the
    enumeration order.
    """
    if limit is None:
        limit = coset_limit_default()
    ncols = 2 * pres.ngens
    rels = [word_columns(r) for r in pres.relators if len(r)]
    sgens = [word_columns(w) for w in subgroup_gens if len(w)]
    E = _Enumerator(ncols, limit)
    for w in sgens:
        E.scan(0, w, True, rels)
    while True:
        c = 0
        while c < len(E.table):
            if E.is_live(c):
                for r in rels:
                    E.scan(c, r, True, rels)
                    if not E.is_live(c):
                        break
                if E.is_live(c):
                    for x in range(ncols):
                        if E.table[c][x] == -1:
                            E.define(c, x, rels)
            c += 1
        # a pass can leave work behind when late coincidences reopen rows
        for w in sgens:
            E.scan(0, w, True, rels)
        done = all(
            -1 not in E.table[c] for c in range(len(E.table)) if E.is_live(c)
        )
        if done:
            table = E.compact(pres.ngens)
            if not table.validate(pres, subgroup_gens):
                return table.standardize()
