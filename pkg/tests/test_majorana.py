import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_operator
from sykbarvinok.errors import IndexOutOfRange, InvalidParity, ResultTooLarge
from sykbarvinok.majorana import (
    MajoranaTerm,
    SparseOperator,
    adjoint,
    make_string,
    normalized_trace,
    op_multiply,
    term_product,
)
from sykbarvinok.oracle import to_dense


def gen(i, n):
    return MajoranaTerm(1 << i, 1.0 + 0j, n)


def test_make_string_examples():
    assert make_string([], 4) == MajoranaTerm(0, 1 + 0j, 4)
    t = make_string([0, 1], 4)
    assert (t.mask, t.coeff) == (0b11, 1j)
    t = make_string([0, 1, 2, 3], 4)
    assert (t.mask, t.coeff) == (0b1111, -1 + 0j)


def test_make_string_errors():
    with pytest.raises(InvalidParity):
        make_string([0, 1, 2], 4)
    with pytest.raises(IndexOutOfRange):
        make_string([0, 4], 4)
    with pytest.raises(ValueError):
        make_string([1, 0], 4)


def test_string_square_is_quarter_identity():
    p = make_string([1, 2], 4)
    sq = term_product(p, p)
    assert (sq.mask, sq.coeff) == (0, 0.25 + 0j)


def test_disjoint_product_is_canonical_string():
    prod = term_product(make_string([1, 2], 6), make_string([3, 4], 6))
    ref = make_string([1, 2, 3, 4], 6)
    assert prod.mask == ref.mask and prod.coeff == ref.coeff


def test_overlapping_product_against_dense():
    n = 6
    prod = term_product(make_string([1, 2], n), make_string([1, 3], n))
    ref = make_string([2, 3], n)
    assert prod.mask == ref.mask
    assert prod.coeff == pytest.approx(-0.5j * ref.coeff)
    a = to_dense(SparseOperator.from_terms(n, [make_string([1, 2], n)]))
    b = to_dense(SparseOperator.from_terms(n, [make_string([1, 3], n)]))
    c = to_dense(SparseOperator.from_terms(n, [prod]))
    np.testing.assert_allclose(a @ b, c, atol=1e-15)


def test_anticommutation_all_pairs():
    n = 8
    for i in range(n):
        for j in range(n):
            ab = SparseOperator.from_terms(n, [term_product(gen(i, n), gen(j, n))])
            ba = SparseOperator.from_terms(n, [term_product(gen(j, n), gen(i, n))])
            expected = SparseOperator.identity(n) if i == j else SparseOperator.zero(n)
            assert ab + ba == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, (1 << 12) - 1), min_size=3, max_size=3),
       st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_associativity_exact(masks, phases):
    n = 12
    a, b, c = (MajoranaTerm(m, 1j**p, n) for m, p in zip(masks, phases))
    left = term_product(term_product(a, b), c)
    right = term_product(a, term_product(b, c))
    assert left == right


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([4, 8, 12]))
def test_dense_faithfulness(seed, n):
    rng = np.random.default_rng(seed)
    a = random_operator(rng, n, 5, even=False)
    b = random_operator(rng, n, 5, even=False)
    da, db = to_dense(a), to_dense(b)
    prod = to_dense(a @ b)
    scale = max(1.0, np.abs(da @ db).max())
    assert np.abs(prod - da @ db).max() <= 1e-12 * scale


def test_multiply_identity_and_square(rng):
    n = 8
    b = random_operator(rng, n, 3)
    assert op_multiply(SparseOperator.identity(n), b) == b
    J = 0.7
    a = J * SparseOperator.from_terms(n, [make_string([1, 2], n)])
    assert op_multiply(a, a) == SparseOperator.identity(n, J**2 / 4)


def test_trace_and_cyclicity(rng):
    n = 10
    assert normalized_trace(SparseOperator.identity(n)) == 1
    assert normalized_trace(SparseOperator.from_terms(n, [make_string([1, 2, 3, 4], n)])) == 0
    p = SparseOperator.from_terms(n, [make_string([1, 2], n)])
    assert normalized_trace(p @ p) == 0.25
    a, b = random_operator(rng, n, 6), random_operator(rng, n, 6)
    assert abs(normalized_trace(a @ b) - normalized_trace(b @ a)) <= 1e-12
    dim = 1 << (n // 2)
    assert abs(normalized_trace(a) - np.trace(to_dense(a)) / dim) <= 1e-12


def test_parity_closure(rng):
    a, b = random_operator(rng, 10, 8), random_operator(rng, 10, 8)
    prod = a @ b
    assert prod.is_even
    assert np.all(np.bitwise_count(prod.masks) % 2 == 0)


def test_adjoint_examples(rng):
    n = 6
    ident = SparseOperator.identity(n)
    assert adjoint(ident) == ident
    p = SparseOperator.from_terms(n, [make_string([1, 2], n)])
    assert adjoint(p) == p
    assert adjoint(1j * p) == -1j * p
    a = random_operator(rng, n, 7, even=False)
    np.testing.assert_allclose(to_dense(adjoint(a)), to_dense(a).conj().T, atol=1e-14)


@pytest.mark.parametrize("q", [2, 4, 6])
def test_strings_hermitian_and_square(q):
    n = 8
    from itertools import combinations

    for sites in list(combinations(range(n), q))[:20]:
        s = SparseOperator.from_terms(n, [make_string(sites, n)])
        assert adjoint(s) == s
        assert s @ s == SparseOperator.identity(n, 2.0**-q)


def test_zero_cancellation_dropped():
    n = 4
    p = SparseOperator.from_terms(n, [make_string([0, 1], n)])
    assert (p - p).masks.size == 0


def test_term_cap():
    rng = np.random.default_rng(1)
    a = random_operator(rng, 12, 40)
    with pytest.raises(ResultTooLarge):
        op_multiply(a, a, term_cap=10)


def test_mode_cap():
    with pytest.raises(ValueError):
        SparseOperator.identity(64)
