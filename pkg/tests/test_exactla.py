import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from largehom.errors import DimensionMismatch, NotPrime, QuotientMapError
from largehom.exactla import (DEFAULT_PRIME, QuotientSpace, Subspace,
                              _rref_naive, check_prime, image_basis,
                              induced_quotient_map, kernel_basis, matmul_mod,
                              rank, rref, solve, subspace_contains,
                              subspace_intersect, subspace_sum)


def py_rref(rows, p):
    """Plain-list Gauss-Jordan, no numpy; the reference for every rref test."""
    a = [[x % p for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    r = 0
    piv = []
    for c in range(n):
        k = next((i for i in range(r, m) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
        if r == m:
            break
    return a, r, piv


primes = st.sampled_from([2, 3, 5, 7, 32003])


@st.composite
def matrices(draw, max_rows=9, max_cols=9, p=None):
    p = draw(primes) if p is None else p
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(1, max_cols))
    # low-rank products show up more often than uniform noise would give
    if draw(st.booleans()) and m:
        k = draw(st.integers(0, min(m, n)))
        a = np.array(draw(st.lists(st.integers(0, p - 1), min_size=m * k,
                                   max_size=m * k)), np.int64).reshape(m, k)
        b = np.array(draw(st.lists(st.integers(0, p - 1), min_size=k * n,
                                   max_size=k * n)), np.int64).reshape(k, n)
        return matmul_mod(a, b, p), p
    vals = draw(st.lists(st.integers(0, p - 1), min_size=m * n,
                         max_size=m * n))
    return np.array(vals, np.int64).reshape(m, n), p


def test_identity_is_its_own_rref():
    red, r, piv = rref(np.eye(3, dtype=np.int64), 5)
    assert np.array_equal(red, np.eye(3, dtype=np.int64))
    assert r == 3 and piv == [0, 1, 2]


def test_zero_matrix_has_rank_zero():
    red, r, piv = rref(np.zeros((2, 4), np.int64), 2)
    assert not red.any() and r == 0 and piv == []


def test_hand_elimination():
    red, r, _ = rref(np.array([[2, 4], [1, 2]]), 5)
    assert red.tolist() == [[1, 2], [0, 0]]
    assert r == 1


@given(matrices())
def test_rref_matches_reference(mp):
    a, p = mp
    red, r, piv = rref(a, p)
    ref, rr, rpiv = py_rref(a.tolist(), p)
    assert r == rr and list(piv) == rpiv
    if a.shape[0]:
        assert red.tolist() == ref


@given(st.integers(0, 2**16), st.sampled_from([2, 3, 5, 32003]),
       st.integers(60, 140), st.integers(60, 140), st.integers(0, 140))
def test_blocked_elimination_matches_naive(seed, p, m, n, k):
    # sizes above the small-matrix cutoff exercise the panel/BLAS path
    g = np.random.default_rng(seed)
    k = min(k, m, n)
    a = matmul_mod(g.integers(0, p, (m, k)), g.integers(0, p, (k, n)), p)
    red, r, piv = rref(a, p)
    ref, rr, rpiv = _rref_naive(a, p)
    assert r == rr == rank(a.T, p)
    assert list(piv) == list(rpiv)
    assert np.array_equal(red, ref)


def test_blocked_path_with_pivot_limit():
    g = np.random.default_rng(7)
    p = 32003
    a = g.integers(0, p, (90, 120))
    red, r, piv = rref(a, p, pivot_cols=70)
    ref, rr, rpiv = _rref_naive(a, p, 70)
    assert r == rr and list(piv) == list(rpiv)
    assert np.array_equal(red, ref)


@given(matrices())
def test_rref_is_idempotent(mp):
    a, p = mp
    red, r, piv = rref(a, p)
    again, r2, piv2 = rref(red, p)
    assert np.array_equal(red, again) and r == r2 and piv == piv2


@given(matrices())
def test_rank_nullity(mp):
    a, p = mp
    K = kernel_basis(a, p)
    assert rank(a, p) + K.dim == a.shape[1]
    assert not matmul_mod(a, K.basis.T, p).any()


def test_kernel_of_identity_and_zero():
    assert kernel_basis(np.eye(4, dtype=np.int64), 5).dim == 0
    assert kernel_basis(np.zeros((2, 3), np.int64), 5) == Subspace.full(3, 5)


def test_kernel_by_enumeration():
    p = 3
    a = np.array([[1, 1]])
    brute = [v for v in itertools.product(range(p), repeat=2)
             if (v[0] + v[1]) % p == 0]
    K = kernel_basis(a, p)
    assert K == Subspace.span(np.array(brute), 2, p)
    assert K.basis.tolist() == [[1, 2]]


@given(matrices(max_rows=6, max_cols=6), matrices(max_rows=6, max_cols=6))
def test_dimension_formula(m1, m2):
    a, p = m1
    b, _ = m2
    n = a.shape[1]
    b = np.mod(np.resize(b, (max(b.shape[0], 1), n)), p)
    A = Subspace.span(a, n, p)
    B = Subspace.span(b, n, p)
    S = subspace_sum(A, B)
    X = subspace_intersect(A, B)
    assert A.dim + B.dim == S.dim + X.dim
    assert X.issubspace(A) and X.issubspace(B)
    assert A.issubspace(S) and B.issubspace(S)


def test_subspace_examples():
    W = Subspace.span(np.array([[1, 2, 0], [0, 0, 1]]), 3, 5)
    assert subspace_intersect(Subspace.full(3, 5), W) == W
    assert subspace_sum(W, W) == W
    X = Subspace.span([[1, 0]], 2, 5)
    Y = Subspace.span([[0, 1]], 2, 5)
    assert subspace_intersect(X, Y).dim == 0
    assert subspace_contains(W, [2, 4, 3])
    assert not subspace_contains(W, [0, 1, 0])


def test_subspace_equality_is_basis_equality():
    a = Subspace.span([[2, 4, 1], [1, 2, 0]], 3, 5)
    b = Subspace.span([[3, 1, 4], [0, 0, 1]], 3, 5)
    assert a == b and hash(a) == hash(b)


def test_image_basis_is_column_space():
    m = np.array([[1, 2], [2, 4], [0, 0]])
    assert image_basis(m, 5).basis.tolist() == [[1, 2, 0]]


def test_induced_quotient_map():
    p = 5
    # the projection onto the last coordinate, seen on F^3/<e1> -> F^2/<e1>
    f = np.array([[1, 0, 0], [0, 0, 1]])
    A = Subspace.span([[1, 0, 0]], 3, p)
    B = Subspace.span([[1, 0]], 2, p)
    mat = induced_quotient_map(f, A, B)
    assert mat.tolist() == [[0, 1]]
    with pytest.raises(QuotientMapError):
        induced_quotient_map(f, Subspace.span([[0, 0, 1]], 3, p),
                             Subspace.zero(2, p))
    with pytest.raises(DimensionMismatch):
        induced_quotient_map(f, B, A)


@given(matrices(max_rows=7, max_cols=7))
def test_quotient_space_coordinates(mp):
    a, p = mp
    n = a.shape[1]
    top = Subspace.full(n, p)
    bottom = Subspace.span(a, n, p)
    Q = QuotientSpace(top, bottom)
    assert Q.dim == n - bottom.dim
    # representatives get unit coordinates, the bottom space gets zero
    assert np.array_equal(Q.coords(Q.reps), np.eye(Q.dim, dtype=np.int64))
    if bottom.dim:
        assert not Q.coords(bottom.basis).any()


@given(matrices(max_rows=7, max_cols=7), st.integers(0, 2**16))
def test_solve_returns_a_solution(mp, seed):
    a, p = mp
    if a.shape[0] == 0:
        return
    g = np.random.default_rng(seed)
    x0 = g.integers(0, p, (a.shape[1], 2))
    b = matmul_mod(a, x0, p)
    x = solve(a, b, p)
    assert np.array_equal(matmul_mod(a, x, p), b)


def test_solve_rejects_inconsistent_system():
    with pytest.raises(ArithmeticError):
        solve(np.array([[1, 1], [1, 1]]), np.array([1, 2]), 5)


def test_large_prime_products_stay_exact():
    p = 2**31 - 1
    a = np.full((3, 3), p - 1, np.int64)
    assert matmul_mod(a, a, p).tolist() == [[3] * 3] * 3


def test_prime_validation():
    assert check_prime(DEFAULT_PRIME) == 32003
    for bad in (0, 1, 4, 9, 32001, 2**31 + 11):
        with pytest.raises(NotPrime):
            check_prime(bad)
