from __future__ import annotations

from itertools import permutations, product

import pytest

from sunadakit.fpgroups import CosetLimitExceeded, CosetTable, coset_enumerate
from sunadakit.fpgroups.covers import (
    RelatorViolation,
    check_relators,
    cusp_count,
    pullback_cover,
    pullback_table,
    rewrite_homology,
    schreier_generators,
)
from sunadakit.fpgroups.lowindex import low_index_subgroups
from sunadakit.fpgroups.perms import class_meets_subgroup, perm_image
from sunadakit.homsearch import enumerate_homs
from sunadakit.pipeline.methods import conjugacy_key
from sunadakit.psl2 import ProjectiveMatrix
from sunadakit.sunada import index_p_subgroups
from sunadakit.words import Presentation

TREFOIL = Presentation.from_strings("a b", ["abaBAB"], name="trefoil")
S3 = Presentation.from_strings("a b", ["aa", "bbb", "abab"])


def test_trivial_subgroup_of_s3():
    T = coset_enumerate(S3, [])
    assert T.degree == 6
    assert T.validate(S3) == []


def test_index_of_cyclic_subgroups_of_s3():
    assert coset_enumerate(S3, [S3.word("a")]).degree == 3
    assert coset_enumerate(S3, [S3.word("b")]).degree == 2


def test_coset_limit_raises():
    free = Presentation.from_strings("a b", ["aaaa"])
    with pytest.raises(CosetLimitExceeded):
        coset_enumerate(free, [], limit=50)


def test_table_json_round_trip():
    T = coset_enumerate(S3, [S3.word("a")])
    assert CosetTable.from_json(T.to_json()) == T


def test_abelianization_of_trefoil():
    T = coset_enumerate(TREFOIL, [TREFOIL.word("a"), TREFOIL.word("b")])
    assert T.degree == 1
    assert rewrite_homology(T, TREFOIL).factors == (0,)


def _rho7(k11):
    red = k11.expected_reductions()[0]
    return [ProjectiveMatrix.from_rows(red["images"][g], 7) for g in "abc"]


def test_pullback_agrees_with_coset_enumeration(k11):
    P = k11.presentation
    imgs = _rho7(k11)
    for H in index_p_subgroups(7):
        T = pullback_table(P, imgs, H)
        assert T.validate(P) == []
        gens = schreier_generators(T)
        E = coset_enumerate(P, gens)
        assert E == T
        assert rewrite_homology(E, P) == rewrite_homology(T, P)


def test_pullback_refuses_non_homomorphism(k11):
    imgs = _rho7(k11)
    imgs[0] = ProjectiveMatrix.identity(7)
    with pytest.raises(RelatorViolation):
        check_relators(k11.presentation, imgs)


def test_k11n116_rho7_covers(k11):
    imgs = _rho7(k11)
    for H in index_p_subgroups(7):
        c = pullback_cover(k11.presentation, imgs, H)
        assert c.degree == 7
        assert c.cusp_count == 1
        assert c.homology.factors == (2, 110, 0)


def test_bianchi_class_intersection(bundles):
    b = bundles["bianchi"]
    P = b.presentation
    h2 = [P.word(w) for w in b.expected["subgroups"]["h2"]]
    T = coset_enumerate(P, h2)
    img = perm_image(T)
    assert img.order == 60
    assert class_meets_subgroup(img, P.word("bC"), h2) == 2


# -- low-index against a brute-force oracle -----------------------------------


def _transitive_actions_up_to_relabeling(pres: Presentation, n: int) -> int:
    """Transitive actions on {0..n-1} satisfying the relators, up to relabeling."""
    perms = list(permutations(range(n)))
    seen = set()
    for gens in product(perms, repeat=pres.ngens):
        T = CosetTable(n, tuple(gens), 0)
        if not T.is_transitive():
            continue
        if any(T.word_permutation(r) != tuple(range(n)) for r in pres.relators):
            continue
        seen.add(conjugacy_key(T))
    return len(seen)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_low_index_trefoil_matches_brute_force(n):
    assert len(low_index_subgroups(TREFOIL, n)) == _transitive_actions_up_to_relabeling(TREFOIL, n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_low_index_k11n116_matches_brute_force(k11, n):
    P = k11.presentation
    assert len(low_index_subgroups(P, n)) == _transitive_actions_up_to_relabeling(P, n)


def test_low_index_tables_are_valid_and_distinct(k11):
    P = k11.presentation
    tables = low_index_subgroups(P, 7)
    assert len({conjugacy_key(T) for T in tables}) == len(tables)
    for T in tables:
        assert T.degree == 7
        assert T.validate(P) == []


def test_low_index_finds_rep_covers(k11):
    P = k11.presentation
    keys = {conjugacy_key(T) for T in low_index_subgroups(P, 7)}
    for r in enumerate_homs(P, 7, surjective_only=True):
        for H in index_p_subgroups(7):
            assert conjugacy_key(pullback_table(P, r.images, H)) in keys


def test_low_index_index_one():
    (T,) = low_index_subgroups(TREFOIL, 1)
    assert T.degree == 1


def test_low_index_rejects_nonpositive():
    with pytest.raises(ValueError):
        low_index_subgroups(TREFOIL, 0)


def test_cusp_count_of_trivial_cover(k11):
    (T,) = low_index_subgroups(k11.presentation, 1)
    assert cusp_count(T, k11.presentation) == 1
