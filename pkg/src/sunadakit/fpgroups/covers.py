"""Covers from coset tables: cusp counts, pullbacks and first homology."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..psl2 import ProjectiveMatrix, psl_group
from ..sunada import SubgroupRecord
from ..words import Presentation, Word
from ..zlinalg import AbelianInvariants, abelian_invariants
from .cosets import CosetTable
from .perms import orbits


class RelatorViolation(ValueError):
    pass


def cusp_orbits(table: CosetTable, pres: Presentation) -> list[list[list[int]]]:
    """For each declared cusp, the orbits of <meridian, longitude> on cosets."""
    out = []
    for cusp in pres.cusps:
        gens = [table.word_permutation(cusp.meridian), table.word_permutation(cusp.longitude)]
        out.append(orbits(gens, table.degree))
    return out


def cusp_count(table: CosetTable, pres: Presentation) -> int:
    return sum(len(o) for o in cusp_orbits(table, pres))


@dataclass(frozen=True)
class Transversal:
    words: tuple[Word, ...]  # coset i is base * words[i]
    tree: frozenset[tuple[int, int]]  # forward edges (coset, generator) in the spanning tree


def schreier_transversal(table: CosetTable) -> Transversal:
    rows = table.columns()
    words: list[Word | None] = [None] * table.degree
    words[table.base] = Word()
    tree = set()
    queue = [table.base]
    k = 0
    while k < len(queue):
        i = queue[k]
        k += 1
        for x, j in enumerate(rows[i]):
            if words[j] is not None:
                continue
            g, inverse = divmod(x, 2)
            words[j] = words[i] * Word(((g, -1 if inverse else 1),))
            tree.add((j, g) if inverse else (i, g))
            queue.append(j)
    if any(w is None for w in words):
        raise ValueError("table is not transitive")
    return Transversal(tuple(words), frozenset(tree))


def _edge_columns(table: CosetTable, tr: Transversal) -> dict[tuple[int, int], int]:
    edges = [
        (i, g)
        for i in range(table.degree)
        for g in range(table.ngens)
        if (i, g) not in tr.tree
    ]
    return {e: k for k, e in enumerate(edges)}


def schreier_generators(table: CosetTable) -> list[Word]:
    """Words generating the subgroup: t_i g t_{i g}^-1 over non-tree edges."""
    tr = schreier_transversal(table)
    cols = _edge_columns(table, tr)
    out = []
    for (i, g) in cols:
        j = table.action[g][i]
        out.append(tr.words[i] * Word(((g, 1),)) * tr.words[j].inverse())
    return out


def relation_matrix(table: CosetTable, pres: Presentation) -> tuple[list[list[int]], int]:
    """Abelianized Reidemeister-Schreier relations of the subgroup.

    One row per (relator, coset), one column per Schreier generator
    (degree * (ngens - 1) + 1 of them).
    """
    tr = schreier_transversal(table)
    cols = _edge_columns(table, tr)
    inv = table.inverse_action()
    ncols = len(cols)
    rows = []
    for r in pres.relators:
        for start in range(table.degree):
            row = [0] * ncols
            c = start
            for g, e in r.letters:
                if e > 0:
                    k = cols.get((c, g))
                    if k is not None:
                        row[k] += 1
                    c = table.action[g][c]
                else:
                    c = inv[g][c]
                    k = cols.get((c, g))
                    if k is not None:
                        row[k] -= 1
            if c != start:
                raise ValueError(f"relator {pres.fmt(r)} does not close at coset {start}")
            rows.append(row)
    return rows, ncols


def rewrite_homology(table: CosetTable, pres: Presentation) -> AbelianInvariants:
    rows, ncols = relation_matrix(table, pres)
    return abelian_invariants(rows, ncols)


def check_relators(pres: Presentation, images: Sequence[ProjectiveMatrix]) -> None:
    G = psl_group(images[0].p)
    idx = [G.index(m) for m in images]
    for r in pres.relators:
        if G.word_image(r.letters, idx) != G.identity:
            raise RelatorViolation(f"relator {pres.fmt(r)} is not sent to the identity")


def pullback_table(
    pres: Presentation, images: Sequence[ProjectiveMatrix], H: SubgroupRecord
) -> CosetTable:
    """Action of the presented group on the cosets H x reached from H.

    When the homomorphism is onto, this is the full coset space G/H.
    """
    if len(images) != pres.ngens:
        raise ValueError("need one image per generator")
    check_relators(pres, images)
    G = psl_group(H.p)
    mul = G.mul
    inv = G.inv
    idx = [G.index(m) for m in images]
    hs = np.array(sorted(H.elements))

    def key(x: int) -> int:
        return int(mul[hs, x].min())

    reps = [G.identity]
    number = {key(G.identity): 0}
    rows: list[list[int]] = []
    k = 0
    while k < len(reps):
        x = reps[k]
        k += 1
        row = []
        for g in idx:
            for y in (int(mul[x, g]), int(mul[x, inv[g]])):
                ky = key(y)
                if ky not in number:
                    number[ky] = len(reps)
                    reps.append(y)
                row.append(number[ky])
        rows.append(row)
    return CosetTable.from_rows(rows, pres.ngens).standardize()


@dataclass
class CoverRecord:
    presentation: Presentation
    table: CosetTable
    cusp_count: int
    homology: AbelianInvariants
    images: tuple[ProjectiveMatrix, ...] | None = None
    subgroup: SubgroupRecord | None = None
    subgroup_words: tuple[Word, ...] | None = None
    cusp_orbit_sizes: list[list[int]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.table.degree

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "cusps": self.cusp_count,
            "cusp_orbit_sizes": self.cusp_orbit_sizes,
            "homology": str(self.homology),
            "homology_factors": list(self.homology.factors),
        }


def cover_from_table(
    pres: Presentation, table: CosetTable, **extra
) -> CoverRecord:
    orbs = cusp_orbits(table, pres)
    return CoverRecord(
        presentation=pres,
        table=table,
        cusp_count=sum(len(o) for o in orbs),
        homology=rewrite_homology(table, pres),
        cusp_orbit_sizes=[sorted((len(x) for x in o), reverse=True) for o in orbs],
        **extra,
    )


def pullback_cover(
    pres: Presentation, images: Sequence[ProjectiveMatrix], H: SubgroupRecord
) -> CoverRecord:
    table = pullback_table(pres, images, H)
    return cover_from_table(pres, table, images=tuple(images), subgroup=H)
