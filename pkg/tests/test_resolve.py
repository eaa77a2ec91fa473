from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from largehom.errors import NotAMorphism, NotGraded
from largehom.exactla import Subspace, kernel_basis, matmul_mod, rank
from largehom.koszul import ring_koszul_homology
from largehom.modules import (FDModule, ModuleMap, cyclic_module,
                              free_module, identity_map, ideal_module,
                              presented_module, quotient_to_residue,
                              random_graded_module, regular_module,
                              residue_field, submodule_inclusion)
from largehom.resolve import (betti_table, linearity_defect,
                              minimal_resolution, poincare_coeffs,
                              residue_resolution, tor_comparison, tor_kk_map,
                              tor_via_residue)
from largehom.rings import quotient_ring

from conftest import CUBE, DUAL, E2, GORENSTEIN, NONGOLOD, SQUARE, ideal, ring

FIXTURES = [E2, NONGOLOD, SQUARE, CUBE, DUAL, GORENSTEIN,
            ("x, y", "x*y, x^2, y^3"), ("x", "x^3")]


def brute_betti(R, N):
    """Betti numbers of k by repeated syzygies, ungraded, no shortcuts.

    The current syzygy module is a subspace K of R^b.  Its minimal number
    of generators is dim K - dim mK; map R^beta onto K through any lift of a
    basis of K/mK and take the kernel.
    """
    p, D = R.p, R.dim
    K = R.maximal_ideal().subspace  # syzygies of k inside R^1
    b = 1
    out = [1]

    def times_var(vecs, j, b):
        return matmul_mod(vecs.reshape(-1, D), R.var_mats[j].T, p).reshape(
            vecs.shape[0], b * D)

    for _ in range(N):
        if K.dim == 0:
            out.append(0)
            continue
        mK = Subspace.span(np.vstack([times_var(K.basis, j, b)
                                      for j in range(R.nvars)]), b * D, p)
        gens = []
        span = mK
        for v in K.basis:
            if not span.contains(v):
                gens.append(v)
                span = Subspace.span(np.vstack([span.basis, v]), b * D, p) \
                    if span.dim else Subspace.span([v], b * D, p)
        beta = len(gens)
        out.append(beta)
        # evaluation R^beta -> R^b; column (g, m) is the monomial m times gen g
        cols = []
        for g in gens:
            blocks = g.reshape(b, D)
            for m in range(D):
                cols.append(matmul_mod(blocks, R.mult[m], p).ravel())
        E = np.array(cols, np.int64).T
        K = kernel_basis(E, p)
        b = beta
    return out


# --- closed forms ----------------------------------------------------------------

def test_dual_numbers_periodic_resolution():
    R = ring("x", "x^2")
    F = residue_resolution(R, 6)
    assert F.betti[:7] == [1] * 7
    for i in range(1, 7):
        assert str(F.entry(i, 0, 0)) == "x"


def test_square_resolution_grows_linearly():
    assert poincare_coeffs(residue_field(ring(*SQUARE)), 6) == \
        [i + 1 for i in range(7)]


def test_cube_resolution_doubles():
    assert poincare_coeffs(residue_field(ring(*CUBE)), 6) == \
        [2 ** i for i in range(7)]


def test_zero_module_has_no_betti_numbers():
    R = ring(*SQUARE)
    M, _ = cyclic_module(R, R.ideal(["1"]))
    assert M.dim == 0
    assert poincare_coeffs(M, 4) == [0] * 5


@pytest.mark.parametrize("spec", FIXTURES)
def test_resolution_matches_brute_syzygies(spec):
    R = ring(*spec)
    N = 4 if R.dim <= 5 else 3
    assert residue_resolution(R, N).betti[:N + 1] == brute_betti(R, N)


def test_resolution_is_reused_and_extended():
    R = ring(*CUBE)
    F = residue_resolution(R, 2)
    G = residue_resolution(R, 4)
    assert F is G and G.length >= 4


def test_negative_truncation_rejected():
    with pytest.raises(ValueError):
        minimal_resolution(residue_field(ring(*SQUARE)), -1)


# --- Betti tables ---------------------------------------------------------------

def test_koszul_ring_has_diagonal_table():
    T = betti_table(residue_field(ring(*SQUARE)), 5)
    assert T.is_diagonal()
    assert T.totals == [1, 2, 3, 4, 5, 6]


def test_cubic_relation_gives_off_diagonal_entry():
    T = betti_table(residue_field(ring("x", "x^3")), 3)
    assert T[(1, 1)] == 1 and T[(2, 3)] == 1 and T[(3, 4)] == 1
    assert not T.is_diagonal()


def test_cyclic_module_has_one_generator():
    R = ring(*E2)
    for gens in (["x"], ["x + y + z"], ["x*y", "z"]):
        M, _ = cyclic_module(R, ideal(R, gens))
        assert betti_table(M, 2)[(0, 0)] == 1
        assert poincare_coeffs(M, 0) == [1]


@pytest.mark.parametrize("spec", FIXTURES)
def test_table_rows_sum_to_totals_and_stay_above_diagonal(spec):
    R = ring(*spec)
    T = betti_table(residue_field(R), 4)
    F = residue_resolution(R, 4)
    for i in range(5):
        assert sum(c for (h, _), c in T.entries.items() if h == i) == \
            F.betti[i]
    assert all(j >= i for (i, j) in T.entries)


def test_table_text_and_rows():
    T = betti_table(residue_field(ring("x", "x^3")), 2)
    assert T.rows() == [{"i": 0, "j": 0, "beta": 1},
                        {"i": 1, "j": 1, "beta": 1},
                        {"i": 2, "j": 3, "beta": 1}]
    assert "total:" in T.to_text()


# --- resolution invariants -------------------------------------------------------

def flat_differential(F, i):
    """d_i as a matrix on flattened coordinates, columns = source."""
    R = F.ring
    D = R.dim
    V = F.diffs[i]
    out = np.zeros((V.shape[1] * D, V.shape[0] * D), np.int64)
    for g in range(V.shape[0]):
        for k in range(V.shape[1]):
            out[k * D:(k + 1) * D, g * D:(g + 1) * D] = R.mult_matrix(V[g, k])
    return out


@pytest.mark.parametrize("spec", [SQUARE, CUBE, E2, GORENSTEIN])
def test_differentials_square_to_zero_and_are_exact(spec):
    R = ring(*spec)
    F = residue_resolution(R, 4)
    p = R.p
    for i in range(2, 5):
        a, b = flat_differential(F, i - 1), flat_differential(F, i)
        assert not matmul_mod(a, b, p).any()
        # exactness at F_{i-1}: rank d_i = dim ker d_{i-1}
        assert rank(b, p) == a.shape[1] - rank(a, p)


@pytest.mark.parametrize("spec", [SQUARE, CUBE, E2, NONGOLOD])
def test_entries_lie_in_maximal_ideal(spec):
    F = residue_resolution(ring(*spec), 4)
    for i in range(1, 5):
        assert not F.diffs[i][:, :, 0].any()


@pytest.mark.parametrize("spec", FIXTURES)
def test_beta_two_counts_koszul_h1(spec):
    R = ring(*spec)
    H = ring_koszul_homology(R)
    n = R.embdim
    assert residue_resolution(R, 2).betti[2] == comb(n, 2) + H.dim(1)


# --- balancedness ----------------------------------------------------------------

@settings(max_examples=30)
@given(st.sampled_from([SQUARE, CUBE, E2, GORENSTEIN, NONGOLOD, DUAL]),
       st.integers(0, 2**32 - 1))
def test_balancedness_on_random_modules(spec, seed):
    R = ring(*spec)
    M = random_graded_module(R, np.random.default_rng(seed))
    N = 4 if R.dim > 5 else 5
    assert poincare_coeffs(M, N) == tor_via_residue(M, N)


@pytest.mark.parametrize("spec", FIXTURES)
def test_balancedness_on_regular_and_residue_modules(spec):
    R = ring(*spec)
    assert poincare_coeffs(regular_module(R), 3) == [1, 0, 0, 0]
    assert tor_via_residue(regular_module(R), 3) == [1, 0, 0, 0]
    k = residue_field(R)
    assert poincare_coeffs(k, 3) == tor_via_residue(k, 3)


def test_balancedness_over_cubic_truncated_power():
    R = ring("x, y, z", "x^3, x^2*y, x^2*z, x*y^2, x*y*z, x*z^2, y^3, "
             "y^2*z, y*z^2, z^3")
    M = random_graded_module(R, np.random.default_rng(3), max_gens=1)
    assert poincare_coeffs(M, 3) == tor_via_residue(M, 3)


# --- modules ---------------------------------------------------------------------

def test_module_validation():
    R = ring(*SQUARE)
    bad = [np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])]
    with pytest.raises(NotAMorphism):
        FDModule(R, 2, bad, None, "bad")
    with pytest.raises(NotAMorphism):
        ModuleMap(residue_field(R), regular_module(R),
                  np.array([[1], [0], [0], [0]]))


def test_free_and_presented_modules():
    R = ring(*SQUARE)
    F = free_module(R, [0, 1])
    assert F.dim == 2 * R.dim
    x = R.normal_form("x").coords
    # R^1 / (x) is R/(x)
    M = presented_module(R, [0], np.array([x]))
    assert M.dim == 2
    assert poincare_coeffs(M, 4) == \
        poincare_coeffs(cyclic_module(R, ideal(R, ["x"]))[0], 4)


def test_ideal_module_and_inclusion():
    R = ring(*SQUARE)
    I = ideal(R, ["x"])
    M, inc = ideal_module(R, I)
    assert M.dim == 2 and inc.shape == (R.dim, 2)
    f = submodule_inclusion(R, I.times_maximal(), I)
    assert f.matrix.shape == (2, 1)
    with pytest.raises(NotAMorphism):
        submodule_inclusion(R, ideal(R, ["y"]), I)


def test_random_modules_need_grading():
    R = ring("x, y", "x^2 - y^3, x*y, y^4")
    if R.graded:
        pytest.skip("ring unexpectedly graded")
    with pytest.raises(NotGraded):
        random_graded_module(R, np.random.default_rng(0))


# --- comparison maps ---------------------------------------------------------------

def test_identity_lifts_to_identity():
    M = residue_field(ring(*CUBE))
    T = tor_comparison(identity_map(M), 4)
    for i in range(5):
        assert np.array_equal(T.matrices[i],
                              np.eye(2 ** i, dtype=np.int64))


def test_e2_quotient_to_residue_is_not_injective():
    R = ring(*E2)
    f = quotient_to_residue(R, ideal(R, ["x + y + z"]))
    T = tor_comparison(f, 4)
    assert not all(T.pattern("injective"))


def test_inclusion_of_mI_is_zero_on_tor():
    R = ring(*SQUARE)
    I = ideal(R, ["x"])
    f = submodule_inclusion(R, I.times_maximal(), I)
    T = tor_comparison(f, 5)
    assert all(T.pattern("zero"))
    assert all(not m.any() for m in T.matrices)


def test_tor_kk_identity():
    R = ring(*SQUARE)
    S, proj = quotient_ring(R, R.zero_ideal())
    T = tor_kk_map(R, S, proj, 4)
    for i in range(5):
        assert np.array_equal(T.matrices[i], np.eye(i + 1, dtype=np.int64))


def test_tor_kk_surjective_for_nongolod_quotient():
    R = ring(*NONGOLOD)
    S, proj = quotient_ring(R, ideal(R, ["x"]))
    assert all(tor_kk_map(R, S, proj, 5).pattern("surjective"))


def test_tor_kk_not_surjective_for_e2_by_degree_three():
    R = ring(*E2)
    S, proj = quotient_ring(R, ideal(R, ["x + y + z"]))
    T = tor_kk_map(R, S, proj, 3)
    assert not all(T.pattern("surjective"))


def test_tor_kk_to_residue_field_is_zero_above_degree_zero():
    R = ring(*CUBE)
    S, proj = quotient_ring(R, R.maximal_ideal())
    T = tor_kk_map(R, S, proj, 3)
    assert T.pattern("surjective") == [True] * 4
    assert [T.target_dim(i) for i in range(4)] == [1, 0, 0, 0]


# --- linearity defect ---------------------------------------------------------------

def test_residue_field_of_koszul_ring_is_koszul():
    rep = linearity_defect(residue_field(ring(*SQUARE)), 5)
    assert rep.ld == 0 and rep.koszul_module


def test_cubic_relation_is_not_koszul():
    rep = linearity_defect(residue_field(ring("x", "x^3")), 4)
    assert not rep.koszul_module and rep.ld >= 1


def test_gorenstein_quotient_is_koszul_module():
    R = ring(*GORENSTEIN)
    M, _ = cyclic_module(R, ideal(R, ["x"]))
    rep = linearity_defect(M, 5)
    assert rep.koszul_module and rep.lin_homology == [0] * 6


def test_linearity_defect_needs_grading():
    R = ring("x, y", "x^2 - y^3, x*y, y^4")
    if R.graded:
        pytest.skip("ring unexpectedly graded")
    with pytest.raises(NotGraded):
        linearity_defect(residue_field(R), 3)
