"""Property suites.  The ``check_*`` functions are also run by the acceptance suite."""
from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sunadakit.homsearch import classify_p_good, enumerate_homs
from sunadakit.numfield import NFMatrix, reduce_matrix
from sunadakit.pipeline import FixtureBundle, fixture_names
from sunadakit.psl2 import ProjectiveMatrix, closure, psl_group
from sunadakit.sunada import SUPPORTED_PRIMES
from sunadakit.words import free_reduce
from sunadakit.zlinalg import smith_normal_form
from test_zlinalg import minors_invariants, random_matrices

letters = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=30)


@given(letters)
def test_free_reduction_idempotent(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert all(r[i][0] != r[i + 1][0] or r[i][1] == r[i + 1][1] for i in range(len(r) - 1))


@given(st.sampled_from([5, 7, 11]), st.data())
def test_canonical_form_ignores_sign(p, data):
    i = data.draw(st.integers(0, psl_group(p).order - 1))
    m = psl_group(p).element(i)
    a, b, c, d = m.entries
    assert ProjectiveMatrix(-a, -b, -c, -d, p) == m
    assert ProjectiveMatrix(a + p, b - p, c, d + 3 * p, p) == m


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.data())
def test_lagrange_divisibility(p, data):
    G = psl_group(p)
    idx = data.draw(st.lists(st.integers(0, G.order - 1), min_size=1, max_size=2))
    H = closure([G.element(i) for i in idx])
    assert G.order % len(H) == 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([7, 11]), st.data())
def test_class_invariant_under_conjugation(p, data):
    G = psl_group(p)
    x, g = data.draw(st.tuples(st.integers(0, G.order - 1), st.integers(0, G.order - 1)))
    y = G.conjugation[g, x]
    assert G.classes.membership[x] == G.classes.membership[y]
    assert G.element_orders[x] == G.element_orders[y]


# -- deterministic suites -----------------------------------------------------


def check_snf_suite(count: int = 500) -> int:
    """SNF against the determinantal-divisor oracle, with the divisibility chain."""
    n = 0
    for m in random_matrices(count, 10):
        diag = [d for d in smith_normal_form(m) if d]
        assert diag == minors_invariants(m), m
        assert all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1)), m
        n += 1
    return n


def _random_product(mats: dict[str, NFMatrix], rng) -> tuple[list[tuple[str, int]], NFMatrix]:
    names = sorted(mats)
    K = mats[names[0]].field
    word = [(names[rng.integers(len(names))], int(rng.choice([1, -1]))) for _ in range(rng.integers(1, 7))]
    m = NFMatrix.identity(K)
    for name, e in word:
        m = m * (mats[name] if e > 0 else mats[name].inverse())
    return word, m


def check_reduction_homomorphism(count: int = 100) -> int:
    bundle = FixtureBundle.bundled("k11n116")
    mats = bundle.matrices
    rng = np.random.default_rng(7)
    places = [(7, 1), (11, 10), (11, 4)]
    for _ in range(count):
        word, m = _random_product(mats, rng)
        for l, root in places:
            want = ProjectiveMatrix.identity(l)
            for name, e in word:
                r = reduce_matrix(mats[name], l, root)
                want = want * (r if e > 0 else r.inverse())
            assert reduce_matrix(m, l, root) == want, (word, l, root)
    return count


def check_good_implies_rep() -> int:
    """p-good implies p-rep, over every enumerated hom of every fixture."""
    seen = 0
    for name in fixture_names():
        pres = FixtureBundle.bundled(name).presentation
        for p in SUPPORTED_PRIMES:
            for h in enumerate_homs(pres, p):
                seen += 1
                if h.surjective and classify_p_good(h).p_good:
                    assert h.p_rep, (name, p, h.images)
    return seen


def test_snf_suite():
    assert check_snf_suite() == 500


def test_reduction_homomorphism():
    assert check_reduction_homomorphism() == 100


def test_good_implies_rep():
    assert check_good_implies_rep() > 0
