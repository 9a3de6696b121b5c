from __future__ import annotations

import pytest
import sympy

from sunadakit.numfield import (
    NFMatrix,
    NumberField,
    RamifiedPrime,
    ReductionError,
    distinct_degree_factorization,
    poly_discriminant,
    reduce_matrix,
    split_prime,
)

x = sympy.symbols("x")


def _sympy_poly(coeffs):
    return sympy.Poly(list(reversed(coeffs)), x)


def _field_polys(bundles):
    return {n: list(b.field.min_poly) for n, b in bundles.items() if b.field is not None}


def test_discriminant_against_sympy(bundles):
    for name, f in _field_polys(bundles).items():
        assert poly_discriminant(f) == sympy.discriminant(_sympy_poly(f)), name


def test_k11n116_discriminant(k11):
    assert poly_discriminant(k11.field.min_poly) == 156166337


def test_factor_degrees_against_sympy(bundles):
    for name, f in _field_polys(bundles).items():
        for l in (3, 7, 11, 13):
            if poly_discriminant(f) % l == 0:
                continue
            _, factors = sympy.factor_list(_sympy_poly(f), modulus=l)
            want = sorted(sympy.degree(g, x) for g, k in factors for _ in range(k))
            assert list(split_prime(f, l).degrees) == want, (name, l)


def test_distinct_degree_products():
    # (x - 1)(x^2 + 1) over F_7: x^2 + 1 is irreducible mod 7
    f = [-1, 1, -1, 1]
    assert distinct_degree_factorization(f, 7) == [(1, 1), (2, 1)]


def test_ramified_prime_refused():
    # t^2 - 3 has discriminant 12
    with pytest.raises(RamifiedPrime):
        split_prime([-3, 0, 1], 3)


def test_field_reduction_uses_min_poly():
    K = NumberField((1, 1, 1))  # t^2 + t + 1
    t = K.element([0, 1])
    assert (t * t * t).coeffs == (1,)


def test_reduce_matrix_rejects_non_root(k11):
    m = k11.matrices["a"]
    with pytest.raises(ReductionError):
        reduce_matrix(m, 7, 0)


def test_exact_matrices_have_unit_determinant(k11):
    one = k11.field.element([1])
    for name, m in k11.matrices.items():
        assert m.det() == one, name


def test_nf_inverse(k11):
    m = k11.matrices["b"]
    assert (m * m.inverse()).is_identity()
    assert NFMatrix.identity(k11.field).is_identity()
