"""Exhaustive search for homomorphisms onto PSL(2, l), up to automorphism.

Aut(PSL(2, l)) is PGL(2, l) acting by conjugation, so two homomorphisms are
identified when a matrix of GL(2, l) conjugates one into the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .fpgroups.covers import CoverRecord, pullback_cover
from .psl2 import ProjectiveMatrix, psl_group
from .sunada import SUPPORTED_PRIMES, index_p_subgroups
from .words import Presentation, Word

MAX_SEARCH_GENERATORS = 3


class SearchRefused(ValueError):
    pass


@dataclass(frozen=True)
class PeripheralImage:
    meridian: ProjectiveMatrix
    longitude: ProjectiveMatrix
    image_order: int  # order of the subgroup they generate
    parabolic: bool  # nontrivial, every nontrivial element parabolic

    def as_dict(self) -> dict:
        return {
            "meridian": str(self.meridian),
            "longitude": str(self.longitude),
            "image_order": self.image_order,
            "p_rep": self.parabolic,
        }


@dataclass
class HomRecord:
    presentation: Presentation
    images: tuple[ProjectiveMatrix, ...]
    surjective: bool
    image_order: int
    peripheral: tuple[PeripheralImage, ...]
    aut_class_id: int = -1
    aut_orbit_size: int = 0  # raw homomorphisms in this Aut class
    inner_classes: int = 0  # conjugacy classes under PSL making up the Aut class

    @property
    def prime(self) -> int:
        return self.images[0].p

    @property
    def p_rep(self) -> bool:
        return bool(self.peripheral) and all(c.parabolic for c in self.peripheral)

    def image_of(self, w: Word) -> ProjectiveMatrix:
        G = psl_group(self.prime)
        idx = [G.index(m) for m in self.images]
        return G.element(G.word_image(w.letters, idx))

    def as_dict(self) -> dict:
        return {
            "aut_class": self.aut_class_id,
            "images": {g: str(m) for g, m in zip(self.presentation.generators, self.images)},
            "surjective": self.surjective,
            "image_order": self.image_order,
            "p_rep": self.p_rep,
            "cusps": [c.as_dict() for c in self.peripheral],
            "raw_count": self.aut_orbit_size,
            "inner_classes": self.inner_classes,
        }


def peripheral_images(pres: Presentation, images: Sequence[ProjectiveMatrix]) -> tuple[PeripheralImage, ...]:
    p = images[0].p
    G = psl_group(p)
    idx = [G.index(m) for m in images]
    out = []
    for cusp in pres.cusps:
        m = G.word_image(cusp.meridian.letters, idx)
        l = G.word_image(cusp.longitude.letters, idx)
        sub = G.closure_indices((m, l))
        parabolic = len(sub) > 1 and all(
            G.element(x).trace_squared() == 4 % p for x in sub if x != G.identity
        )
        out.append(PeripheralImage(G.element(m), G.element(l), len(sub), parabolic))
    return tuple(out)


def make_record(pres: Presentation, images: Sequence[ProjectiveMatrix]) -> HomRecord:
    G = psl_group(images[0].p)
    sub = G.closure_indices(G.index(m) for m in images)
    return HomRecord(
        pres,
        tuple(images),
        surjective=len(sub) == G.order,
        image_order=len(sub),
        peripheral=peripheral_images(pres, images),
    )


def classify_p_rep(h: HomRecord) -> tuple[list[bool], bool]:
    """Per-cusp p-rep flags and their conjunction."""
    flags = [c.parabolic for c in h.peripheral]
    return flags, bool(flags) and all(flags)


def raw_solutions(pres: Presentation, l: int, first_over_reps: bool = True) -> np.ndarray:
    """Generator-image tuples (as element indices) satisfying every relator.

    With ``first_over_reps`` the first generator only runs over conjugacy
    class representatives, which loses nothing up to conjugation.
    """
    k = pres.ngens
    if k > MAX_SEARCH_GENERATORS:
        raise SearchRefused(
            f"exhaustive search supports at most {MAX_SEARCH_GENERATORS} generators, got {k}"
        )
    G = psl_group(l)
    N = G.order
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    mul, inv, e = G.mul, G.inv, G.identity
    rels = [r.letters for r in pres.relators if len(r)]
    firsts = [m[0] for m in G.classes.members] if first_over_reps else list(range(N))
    found = []
    last = k - 1
    for fixed in product(firsts, *([range(N)] * (k - 2))) if k > 1 else [()]:
        fixed = tuple(fixed)
        cand = np.arange(N) if k > 1 else np.array(firsts)
        for r in rels:
            if not len(cand):
                break
            cur = np.full(len(cand), e, dtype=np.int32)
            cinv = inv[cand]
            for g, s in r:
                if g == last:
                    x = cand if s > 0 else cinv
                else:
                    x = fixed[g] if s > 0 else inv[fixed[g]]
                cur = mul[cur, x]
            cand = cand[cur == e]
        for c in cand.tolist():
            found.append(fixed + (c,))
    return np.array(found, dtype=np.int64).reshape(-1, k)


def _aut_keys(G, sols: np.ndarray, rows: np.ndarray | None = None, chunk: int = 256) -> np.ndarray:
    """For each solution, the least encoded tuple over its orbit."""
    aut = G.aut_table if rows is None else rows
    N = G.order
    k = sols.shape[1]
    weights = N ** np.arange(k - 1, -1, -1, dtype=np.int64)
    out = np.empty(len(sols), dtype=np.int64)
    for s in range(0, len(sols), chunk):
        part = sols[s : s + chunk]
        imgs = aut[:, part].astype(np.int64)  # (|Aut|, m, k)
        out[s : s + chunk] = (imgs * weights).sum(axis=2).min(axis=0)
    return out


def _decode(key: int, N: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        key, r = divmod(key, N)
        out.append(r)
    return tuple(reversed(out))


def enumerate_homs(pres: Presentation, l: int, surjective_only: bool = False) -> list[HomRecord]:
    """One record per Aut(PSL(2, l)) class of homomorphisms, sorted by the
    least encoded image tuple in the class."""
    G = psl_group(l)
    k = pres.ngens
    sols = raw_solutions(pres, l)
    if k == 0 or not len(sols):
        return []
    keys = np.unique(_aut_keys(G, sols))
    records = []
    weights = G.order ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for key in keys.tolist():
        idx = _decode(key, G.order, k)
        rec = make_record(pres, [G.element(i) for i in idx])
        if surjective_only and not rec.surjective:
            continue
        orbit = G.aut_table[:, list(idx)].astype(np.int64) @ weights
        inner = G.conjugation[:, list(idx)].astype(np.int64) @ weights
        rec.aut_orbit_size = len(np.unique(orbit))
        rec.inner_classes = rec.aut_orbit_size // len(np.unique(inner))
        rec.aut_class_id = len(records)
        records.append(rec)
    return records


def aut_class_key(images: Sequence[ProjectiveMatrix]) -> int:
    G = psl_group(images[0].p)
    sol = np.array([[G.index(m) for m in images]], dtype=np.int64)
    return int(_aut_keys(G, sol)[0])


def same_aut_class(x: Sequence[ProjectiveMatrix], y: Sequence[ProjectiveMatrix]) -> bool:
    return aut_class_key(x) == aut_class_key(y)


@dataclass
class HomCounts:
    prime: int
    homs_aut_classes: int
    surjective_aut_classes: int
    surjective_inner_classes: int
    surjective_raw: int
    p_rep_aut_classes: int
    p_good_aut_classes: int | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def count_homs(records: Sequence[HomRecord], l: int, good: Sequence[GoodRepReport] = ()) -> HomCounts:
    surj = [r for r in records if r.surjective]
    return HomCounts(
        prime=l,
        homs_aut_classes=len(records),
        surjective_aut_classes=len(surj),
        surjective_inner_classes=sum(r.inner_classes for r in surj),
        surjective_raw=sum(r.aut_orbit_size for r in surj),
        p_rep_aut_classes=sum(1 for r in surj if r.p_rep),
        p_good_aut_classes=sum(1 for g in good if g.p_good) if good else None,
    )


ISOMETRY_NOTE = (
    "non-isometry of the two covers is not decided here; covers come from "
    "non-conjugate subgroups and isometry must be checked externally"
)


@dataclass
class GoodRepReport:
    hom: HomRecord
    covers: tuple[CoverRecord, ...]
    p_good: bool
    failed: str | None
    homology_differs: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "aut_class": self.hom.aut_class_id,
            "p_good": self.p_good,
            "failed": self.failed,
            "covers": [c.summary() for c in self.covers],
            "homology_differs": self.homology_differs,
            "isometry": "external",
        }


def classify_p_good(h: HomRecord) -> GoodRepReport:
    """Build both Sunada covers and decide the checkable part of p-goodness.

    p-good here means: onto, and both covers from the two index-p subgroup
    classes have a single cusp.  Distinctness of the covers rests on the
    subgroups being non-conjugate; isometry is left to external tools.
    """
    p = h.prime
    if not h.surjective:
        return GoodRepReport(h, (), False, "not surjective", False)
    if p not in SUPPORTED_PRIMES:
        return GoodRepReport(h, (), False, f"no Sunada pair of index {p} in PSL(2,{p})", False)
    subs = index_p_subgroups(p)
    covers = tuple(pullback_cover(h.presentation, h.images, H) for H in subs)
    one_cusped = all(c.cusp_count == 1 for c in covers)
    differs = covers[0].homology != covers[1].homology
    return GoodRepReport(
        h,
        covers,
        p_good=one_cusped,
        failed=None if one_cusped else "cover not 1-cusped",
        homology_differs=differs,
        notes=[ISOMETRY_NOTE],
    )
