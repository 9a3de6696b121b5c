"""Permutation images of coset actions.

Permutations are tuples with ``perm[i]`` the image of point i, and products
act left to right: ``compose(x, y)`` applies x first.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..words import Word
from .cosets import CosetTable

Perm = tuple[int, ...]


def compose(x: Perm, y: Perm) -> Perm:
    return tuple(y[i] for i in x)


def perm_inverse(x: Perm) -> Perm:
    out = [0] * len(x)
    for i, j in enumerate(x):
        out[j] = i
    return tuple(out)


def perm_closure(gens: Sequence[Perm], degree: int) -> set[Perm]:
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[i] for i in x)  # x then g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def orbits(gens: Sequence[Perm], degree: int) -> list[list[int]]:
    seen = [False] * degree
    out = []
    for start in range(degree):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        k = 0
        while k < len(orbit):
            i = orbit[k]
            k += 1
            for g in gens:
                j = g[i]
                if not seen[j]:
                    seen[j] = True
                    orbit.append(j)
        out.append(orbit)
    return out


@dataclass
class PermImage:
    table: CosetTable
    generators: tuple[Perm, ...]
    elements: set[Perm]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def degree(self) -> int:
        return self.table.degree

    def word_image(self, w: Word) -> Perm:
        return self.table.word_permutation(w)

    def conjugacy_class(self, x: Perm) -> set[Perm]:
        return {compose(compose(perm_inverse(g), x), g) for g in self.elements}

    def base_stabilizer(self) -> set[Perm]:
        # The image of the subgroup H is exactly the stabilizer of the base
        # coset: the action kernel fixes every coset, so it lies in H, and an
        # element fixing the base coset is in H by definition.
        b = self.table.base
        return {x for x in self.elements if x[b] == b}


def perm_image(table: CosetTable) -> PermImage:
    gens = tuple(tuple(p) for p in table.action)
    return PermImage(table, gens, perm_closure(gens, table.degree))


def class_meets_subgroup(image: PermImage, element: Word, subgroup_gens: Sequence[Word] = ()) -> int:
    """|class of the element's image  n  image of the subgroup|."""
    for w in subgroup_gens:
        if image.table.apply(image.table.base, w) != image.table.base:
            raise ValueError("subgroup generator does not fix the base coset")
    cls = image.conjugacy_class(image.word_image(element))
    return len(cls & image.base_stabilizer())
