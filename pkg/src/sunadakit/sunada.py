"""Index-p subgroups of PSL(2, p) and almost-conjugacy certificates."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .psl2 import ConjClassTable, ProjectiveMatrix, psl_group

SUPPORTED_PRIMES = (7, 11)


@dataclass(frozen=True)
class SubgroupRecord:
    p: int
    elements: frozenset[int]  # element indices in psl_group(p)
    class_id: int = -1

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return psl_group(self.p).order // self.order

    def matrices(self) -> list[ProjectiveMatrix]:
        G = psl_group(self.p)
        return [G.element(i) for i in sorted(self.elements)]

    def __contains__(self, x: ProjectiveMatrix) -> bool:
        return psl_group(self.p).index(x) in self.elements

    def conjugate(self, g: int) -> SubgroupRecord:
        conj = psl_group(self.p).conjugation
        return SubgroupRecord(self.p, frozenset(int(v) for v in conj[g, sorted(self.elements)]))


class NotSunadaPair(Exception):
    """Raised by :func:`almost_conjugate`; ``reason`` is 'counts' or 'conjugate'."""

    def __init__(self, reason: str, message: str, class_index: int | None = None):
        super().__init__(message)
        self.reason = reason
        self.class_index = class_index


@dataclass(frozen=True)
class SunadaCertificate:
    H1: SubgroupRecord
    H2: SubgroupRecord
    counts: tuple[tuple[int, int, int], ...]  # (class id, |C n H1|, |C n H2|)
    class_sizes: tuple[int, ...]
    nonconjugate_checked: bool = True

    def as_dict(self) -> dict:
        return {
            "p": self.H1.p,
            "orders": [self.H1.order, self.H2.order],
            "index": self.H1.index,
            "classes": [
                {"class": c, "size": self.class_sizes[c], "H1": n1, "H2": n2}
                for c, n1, n2 in self.counts
            ],
            "nonconjugate_exhaustive": self.nonconjugate_checked,
        }


def conjugacy_key(p: int, elements) -> tuple[int, ...]:
    """Lexicographically least sorted element tuple over all conjugates."""
    conj = psl_group(p).conjugation
    rows = np.sort(conj[:, sorted(elements)], axis=1)
    rows = np.unique(rows, axis=0)
    return tuple(int(v) for v in rows[0])


def _sweep_chunk(args):
    p, firsts, order = args
    G = psl_group(p)
    found = {}
    for x in firsts:
        for y in range(G.order):
            H = G.closure_indices((x, y), limit=order)
            if H is not None and len(H) == order and H not in found:
                found[H] = None
    return list(found)


def pair_closure_sweep(p: int, order: int, first_over_reps: bool = True, workers: int = 1) -> list[frozenset[int]]:
    """All subgroups of the given order generated by two elements.

    With ``first_over_reps`` the first generator runs over conjugacy class
    representatives only; the result is then complete up to conjugacy.
    Otherwise every pair is tried.  Output is sorted, so it does not depend
    on ``workers``.
    """
    G = psl_group(p)
    if first_over_reps:
        firsts = [m[0] for m in G.classes.members]
    else:
        firsts = list(range(G.order))
    chunks = [(p, firsts[i::workers], order) for i in range(workers)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_sweep_chunk, chunks))
    else:
        parts = [_sweep_chunk(c) for c in chunks]
    merged = set()
    for part in parts:
        merged.update(part)
    return sorted(merged, key=lambda H: sorted(H))


def subgroups_up_to_conjugacy(p: int, subgroups) -> list[SubgroupRecord]:
    by_key = {}
    for H in subgroups:
        by_key.setdefault(conjugacy_key(p, H), H)
    keys = sorted(by_key)
    return [SubgroupRecord(p, frozenset(k), class_id=i) for i, k in enumerate(keys)]


def index_p_subgroups(p: int, workers: int = 1) -> list[SubgroupRecord]:
    """Conjugacy classes of index-p subgroups of PSL(2, p), p in {7, 11}.

    Each class is represented by its lexicographically least conjugate.
    Relies on the subgroups being 2-generated (true for S4 and A5).
    """
    if p not in SUPPORTED_PRIMES:
        raise ValueError(f"index-p subgroup search supports p in {SUPPORTED_PRIMES}, got {p}")
    return _index_subgroups(p, workers)


def _index_subgroups(p: int, workers: int = 1) -> list[SubgroupRecord]:
    G = psl_group(p)
    return subgroups_up_to_conjugacy(p, pair_closure_sweep(p, G.order // p, workers=workers))


def are_conjugate(H1: SubgroupRecord, H2: SubgroupRecord) -> bool:
    if H1.p != H2.p or H1.order != H2.order:
        return False
    G = psl_group(H1.p)
    conj = G.conjugation
    target = H2.elements
    h1 = sorted(H1.elements)
    return any(frozenset(conj[g, h1].tolist()) == target for g in range(G.order))


def class_counts(H: SubgroupRecord, classes: ConjClassTable) -> list[int]:
    counts = [0] * len(classes)
    for x in H.elements:
        counts[int(classes.membership[x])] += 1
    return counts


def almost_conjugate(
    H1: SubgroupRecord, H2: SubgroupRecord, classes: ConjClassTable | None = None
) -> SunadaCertificate:
    if H1.p != H2.p:
        raise ValueError("subgroups live in different groups")
    if classes is None:
        classes = psl_group(H1.p).classes
    c1 = class_counts(H1, classes)
    c2 = class_counts(H2, classes)
    for i, (n1, n2) in enumerate(zip(c1, c2)):
        if n1 != n2:
            raise NotSunadaPair("counts", f"counts differ at class {i}: {n1} vs {n2}", i)
    if are_conjugate(H1, H2):
        raise NotSunadaPair("conjugate", "subgroups are conjugate")
    return SunadaCertificate(
        H1,
        H2,
        tuple((i, n1, n2) for i, (n1, n2) in enumerate(zip(c1, c2))),
        classes.sizes,
    )


def outer_image(H: SubgroupRecord) -> SubgroupRecord:
    outer = psl_group(H.p).outer
    return SubgroupRecord(H.p, frozenset(int(outer[x]) for x in H.elements))


def outer_swap_check(H1: SubgroupRecord, H2: SubgroupRecord) -> bool:
    """True iff conjugating H1 by a non-square-determinant matrix gives a
    conjugate of H2."""
    return are_conjugate(outer_image(H1), H2)


@dataclass
class SunadaPairReport:
    p: int
    subgroups: list[SubgroupRecord]
    certificate: SunadaCertificate | None
    outer_swap: bool
    unique_pair: bool
    notes: list[str] = field(default_factory=list)


def sunada_pair(p: int, workers: int = 1) -> SunadaPairReport:
    """Find the index-p classes and certify them as the unique Sunada pair."""
    subs = index_p_subgroups(p, workers=workers)
    cert = None
    pairs = 0
    for i in range(len(subs)):
        for j in range(i + 1, len(subs)):
            try:
                c = almost_conjugate(subs[i], subs[j])
            except NotSunadaPair:
                continue
            pairs += 1
            cert = cert or c
    swap = cert is not None and outer_swap_check(cert.H1, cert.H2)
    return SunadaPairReport(p, subs, cert, swap, unique_pair=pairs == 1)
