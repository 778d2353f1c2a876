from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix

from parcohom.field_linalg import (
    GF,
    QQ,
    ComplexError,
    complement,
    image,
    kernel,
    parse_field,
    quotient_dim,
    rank,
    rref,
    solve,
    span,
)

small = st.integers(-4, 4)


def matrices(rows=st.integers(1, 5), cols=st.integers(1, 5)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0])
    )


def test_parse_field():
    assert parse_field("rational") is QQ
    assert parse_field("GF(7)") == GF(7)
    assert parse_field("3").p == 3
    with pytest.raises(ValueError):
        parse_field("GF(4)")


def test_prime_arithmetic():
    F = GF(5)
    assert F.inverse(2) == 3
    assert F.scalar(-1) == 4
    with pytest.raises(ZeroDivisionError):
        F.inverse(0)


def test_rational_inverse_and_encoding():
    assert QQ.inverse(Fraction(2, 3)) == Fraction(3, 2)
    assert QQ.encode(Fraction(1, 2)) == "1/2"
    assert QQ.array([["1/2", 3]])[0, 0] == Fraction(1, 2)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_sympy_over_q(rows):
    assert rank(QQ, QQ.array(rows)) == Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from([2, 3, 5, 7]))
def test_rank_nullity_mod_p(rows, p):
    F = GF(p)
    m = F.array(rows)
    k = kernel(F, m)
    assert rank(F, m) + k.dim == m.shape[1]
    if k.dim:
        assert not np.any(F.reduce(F.matmul(m, k.basis.T)))


@settings(max_examples=40, deadline=None)
@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_roundtrip(rows, x):
    F = QQ
    m = F.array(rows)
    x = F.array(x[: m.shape[1]])
    v = F.matmul(m, x)
    sol = solve(F, m, v)
    assert sol is not None
    assert F.equal(F.matmul(m, sol), v)


def test_solve_inconsistent():
    F = GF(3)
    m = F.array([[1, 0], [0, 0]])
    assert solve(F, m, F.array([0, 1])) is None


def test_rref_canonical():
    F = GF(7)
    r, piv = rref(F, F.array([[2, 4, 6], [1, 2, 3], [0, 1, 1]]))
    assert piv == (0, 1)
    assert r[0, 0] == 1 and r[1, 1] == 1


def test_subspace_equality_and_complement():
    F = QQ
    big = span(F, F.array([[1, 0, 0], [0, 1, 0]]))
    small = span(F, F.array([[1, 1, 0]]))
    assert quotient_dim(big, small) == 1
    extra = complement(big, small)
    assert extra.shape[0] == 1
    assert span(F, np.concatenate([small.basis, extra])) == big
    assert image(F, F.array([[1, 0], [1, 0], [0, 0]])) == span(F, F.array([[1, 1, 0]]))


def test_quotient_requires_containment():
    F = QQ
    with pytest.raises(ComplexError):
        quotient_dim(span(F, F.array([[1, 0]])), span(F, F.array([[0, 1]])))


def test_large_prime_matmul_is_exact():
    F = GF(1_000_003)
    a = F.array([[1_000_002] * 40])
    b = F.array([[1_000_002]] * 40)
    assert int(F.matmul(a, b)[0, 0]) == 40 % 1_000_003
