from __future__ import annotations

from itertools import combinations, permutations
from math import gcd, prod

import numpy as np
import pytest

from sunadakit.zlinalg import AbelianInvariants, abelian_invariants, smith_normal_form


def _sign(perm) -> int:
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s


def leibniz_det(m) -> int:
    n = len(m)
    return sum(_sign(p) * prod(m[i][p[i]] for i in range(n)) for p in permutations(range(n)))


def minors_invariants(m) -> list[int]:
    """Invariant factors from gcds of k x k minors (determinantal divisors)."""
    rows, cols = len(m), len(m[0])
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in combinations(range(rows), k):
            for c in combinations(range(cols), k):
                g = gcd(g, leibniz_det([[m[i][j] for j in c] for i in r]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def random_matrices(count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        r, c = rng.integers(1, 6, size=2)
        yield rng.integers(-9, 10, size=(r, c)).tolist()


def test_snf_against_minors_oracle():
    for m in random_matrices(500, 1):
        diag = [d for d in smith_normal_form(m) if d]
        assert diag == minors_invariants(m)


def test_divisibility_chain():
    for m in random_matrices(500, 2):
        diag = [d for d in smith_normal_form(m) if d]
        assert all(d > 0 for d in diag)
        assert all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1))


def _unimodular(n: int, rng) -> list[list[int]]:
    u = np.eye(n, dtype=object)
    for _ in range(3 * n):
        i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i == j:
            u[0] = -u[0]
            continue
        u[i] = u[i] + int(rng.integers(-2, 3)) * u[j]
    return u.tolist()


def test_unimodular_invariance():
    rng = np.random.default_rng(3)
    for m in random_matrices(500, 3):
        r, c = len(m), len(m[0])
        U = np.array(_unimodular(r, rng), dtype=object)
        V = np.array(_unimodular(c, rng), dtype=object)
        moved = (U @ np.array(m, dtype=object) @ V).tolist()
        assert smith_normal_form(moved) == smith_normal_form(m)


def test_big_entries_stay_exact():
    m = [[2**70, 0], [0, 3**50]]
    assert [d for d in smith_normal_form(m) if d] == [1, 2**70 * 3**50]


def test_abelian_invariants_free_and_torsion():
    inv = abelian_invariants([[2, 0, 0], [0, 4, 0]], 3)
    assert inv == AbelianInvariants((2, 4), 1)
    assert str(inv) == "Z/2 + Z/4 + Z"
    assert abelian_invariants([], 2).factors == (0, 0)


def test_from_factors_drops_units():
    assert AbelianInvariants.from_factors([1, 5, 0]).factors == (5, 0)


@pytest.mark.parametrize("bad", [[[1, 2], [3]]])
def test_ragged_rows_rejected(bad):
    with pytest.raises(ValueError):
        abelian_invariants(bad, 2)
