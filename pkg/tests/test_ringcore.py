import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from largehom.errors import (NonHomogeneousIdeal, NotArtinian, NotPrime,
                             ParseError, VariableMismatch)
from largehom.exactla import Subspace, kernel_basis, rank
from largehom.poly import parse_polynomial, parse_ring_spec
from largehom.rings import (annihilator, check_nc, is_truncated_power,
                            normal_form, parse_ring, quotient_ring, socle)

from conftest import CUBE, E2, NONGOLOD, SQUARE, ideal, ring


def sympy_normal_form(R, text):
    """Remainder modulo a Groebner basis computed by sympy (grevlex)."""
    syms = sympy.symbols(R.vars)
    loc = dict(zip(R.vars, syms))
    rels = [sympy.sympify(r.replace("^", "**"), locals=loc)
            for r in R.relations_text()]
    G = sympy.groebner(rels, *syms, modulus=R.p, order="grevlex")
    f = sympy.sympify(text.replace("^", "**"), locals=loc)
    _, rem = G.reduce(sympy.Poly(f, *syms, modulus=R.p))
    poly = sympy.Poly(rem, *syms, modulus=R.p)
    return {m: int(c) % R.p for m, c in poly.terms() if int(c) % R.p}


def our_terms(R, text):
    return {m: int(c) for m, c in
            R.to_polynomial(R.normal_form(text).coords).terms.items()}


# --- parsing and bases -------------------------------------------------------

def test_cube_of_squares_has_dimension_eight():
    R = ring(*E2)
    assert R.dim == 8 and R.graded
    assert sorted(R.monomial_basis) == sorted(
        itertools.product((0, 1), repeat=3))


def test_dual_numbers_over_f2():
    R = ring("x", "x^2", p=2)
    assert R.monomial_basis == [(0,), (1,)]


def test_nongolod_ring_basis():
    # yz is not killed by any relation, so the basis has five monomials
    R = ring(*NONGOLOD)
    assert R.dim == 5
    assert sorted(R.format(np.eye(5, dtype=np.int64)[i])
                  for i in range(5)) == ["1", "x", "y", "y*z", "z"]


def test_spec_text_with_ideal_and_truncation():
    f = parse_ring_spec("p = 3\nvars = a, b\nrelations = a^2, b^2 # comment\n"
                        "ideal = a + b\ntruncation = 4\n")
    assert f == {"p": 3, "vars": ["a", "b"], "relations": ["a^2", "b^2"],
                 "ideal": ["a + b"], "truncation": 4}


@pytest.mark.parametrize("text,err", [
    ("p = 4\nvars = x\nrelations = x^2", NotPrime),
    ("p = 5\nvars = x\nrelations = x^2 +", ParseError),
    ("p = 5\nvars = x, x\nrelations = x^2", ParseError),
    ("p = 5\nvars = x\nrelations = y^2", ParseError),
    ("p = 5\nvars = x\n", ParseError),
    ("p = 5\nvars = x\nrelations = x^2\nfoo = 1", ParseError),
    ("p = 5\nvars = x, y\nrelations = x^2", NotArtinian),
    ("p = 5\nvars = x, y\nrelations = x, y^2", ParseError),
])
def test_bad_specs(text, err):
    with pytest.raises(err):
        parse_ring(text)


def test_polynomial_grammar():
    names = ["x", "y"]
    f = parse_polynomial("-3x^2y + 2*x*y^2 - 4 + (x+y)^2", names, 7)
    g = parse_polynomial("4*x^2*y + 2*x*y^2 + 3 + x^2 + 2*x*y + y^2",
                         names, 7)
    assert f == g


def test_prime_override():
    R = parse_ring("p = 5\nvars = x\nrelations = x^3", p=3)
    assert R.p == 3


# --- normal forms --------------------------------------------------------------

def test_normal_form_examples():
    assert normal_form(ring("x", "x^2"), "x^2").is_zero()
    R = ring(*E2)
    assert str(R.normal_form("(x+y+z)^2")) == str(
        R.normal_form("2*x*y + 2*x*z + 2*y*z"))
    one = R.normal_form("1").coords
    assert one.tolist() == [1] + [0] * 7


def test_normal_form_rejects_foreign_polynomial():
    R = ring(*E2)
    other = parse_polynomial("x", ["x"], 5)
    with pytest.raises(VariableMismatch):
        R.normal_form(other)


RINGS = [E2, NONGOLOD, SQUARE, CUBE, ("x, y", "x^3 - y^2*x, y^3, x^2*y"),
         ("x, y, z", "x^2 - y*z, y^2 - x*z, z^2 - x*y, x*y*z")]


@st.composite
def ring_and_polys(draw):
    vars_, rels = draw(st.sampled_from(RINGS))
    p = draw(st.sampled_from([2, 3, 5, 7]))
    try:
        R = ring(vars_, rels, p)
    except NotArtinian:
        R = ring(*E2, p)
    names = R.vars

    def poly():
        terms = draw(st.lists(st.tuples(
            st.integers(1, p - 1),
            st.tuples(*[st.integers(0, 3) for _ in names])), max_size=4))
        if not terms:
            return "0"
        return " + ".join(f"{c}*" + "*".join(f"{v}^{e}" for v, e in
                                             zip(names, m)) for c, m in terms)
    return R, poly(), poly()


@given(ring_and_polys())
def test_normal_form_agrees_with_sympy(data):
    R, f, _ = data
    assert our_terms(R, f) == sympy_normal_form(R, f)


@given(ring_and_polys())
def test_normal_form_is_multiplicative(data):
    R, f, g = data
    prod = R.normal_form(f"({f})*({g})")
    assert prod == R.normal_form(f) * R.normal_form(g)
    assert R.normal_form(f"({f}) + ({g})") == R.normal_form(f) + \
        R.normal_form(g)


@pytest.mark.parametrize("spec", RINGS)
def test_dimension_matches_sympy_standard_monomials(spec):
    try:
        R = ring(*spec)
    except NotArtinian:
        return
    syms = sympy.symbols(R.vars)
    loc = dict(zip(R.vars, syms))
    G = sympy.groebner([sympy.sympify(r.replace("^", "**"), locals=loc)
                        for r in R.relations_text()], *syms, modulus=R.p,
                       order="grevlex")
    leads = [sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs]
    top = R.top_degree + 2
    std = [m for m in itertools.product(range(top), repeat=R.nvars)
           if not any(all(a >= b for a, b in zip(m, ld)) for ld in leads)]
    assert sorted(std) == sorted(R.monomial_basis)


# --- ideals --------------------------------------------------------------------

def brute_span(R, gens):
    vecs = [R.multiply(R.normal_form(g).coords, np.eye(R.dim,
                                                       dtype=np.int64)[b])
            for g in gens for b in range(R.dim)]
    return Subspace.span(np.array(vecs), R.dim, R.p)


@pytest.mark.parametrize("p,expected", [(5, 5), (3, 5), (2, 4)])
def test_ideal_of_linear_form_in_e2(p, expected):
    R = ring(*E2, p)
    I = ideal(R, ["x + y + z"])
    assert I.dim == expected
    assert I.subspace == brute_span(R, ["x + y + z"])


def test_zero_and_maximal_ideals():
    R = ring(*E2)
    assert ideal(R, ["0"]).is_zero()
    m = ideal(R, ["x", "y", "z"])
    assert m.dim == R.dim - 1 and m == R.maximal_ideal()


@given(ring_and_polys())
def test_ideal_is_closed_and_trim_is_minimal(data):
    R, f, g = data
    I = ideal(R, [f, g, f"{f} + {g}"])
    for j in range(R.nvars):
        moved = (R.var_mats[j] @ I.subspace.basis.T % R.p).T
        assert I.subspace.contains_all(moved)
    T = I.trimmed()
    assert T == I
    assert I.mu == len(T.gens) <= len(I.gens)


def test_mu_after_trim():
    R = ring(*SQUARE)
    I = ideal(R, ["x", "2*x", "x*y", "y"])
    assert I.mu == 2 and len(I.trimmed().gens) == 2


# --- the necessary condition -------------------------------------------------

def test_nc_for_linear_form():
    R = ring(*E2)
    I = ideal(R, ["x + y + z"])
    assert check_nc(R, I).holds
    assert I.times_maximal() == ideal(R, ["x*y", "x*z", "y*z"])
    assert I.times_maximal() == R.power_of_maximal(2)


def test_nc_fails_with_witness():
    R = ring("x", "x^3")
    rep = check_nc(R, ideal(R, ["x^2"]))
    assert not rep.holds
    assert rep.verdict.witness["element"] == "x^2"


def test_nc_for_zero_ideal():
    R = ring(*E2)
    assert check_nc(R, ideal(R, ["0"])).holds


# --- quotients -----------------------------------------------------------------

def test_quotient_by_linear_form():
    R = ring(*E2)
    S, proj = quotient_ring(R, ideal(R, ["x + y + z"]))
    T = ring("y, z", "y^2, z^2, y*z")
    assert S.vars == ["y", "z"] and S.embdim == 2
    assert [g.to_str(S.vars) for g in S.groebner] == \
        [g.to_str(T.vars) for g in T.groebner]


def test_quotient_by_zero_is_isomorphic():
    R = ring(*E2)
    S, proj = quotient_ring(R, ideal(R, ["0"]))
    assert S.dim == R.dim and np.array_equal(proj.matrix, np.eye(8))


def test_quotient_of_nongolod_ring():
    R = ring(*NONGOLOD)
    S, _ = quotient_ring(R, ideal(R, ["x"]))
    assert S.vars == ["y", "z"]
    assert S.relations_text() == ["y^2", "z^2"]


def test_quotient_rejects_inhomogeneous():
    R = ring(*E2)
    with pytest.raises(NonHomogeneousIdeal):
        quotient_ring(R, ideal(R, ["x + y*z"]))


@given(ring_and_polys())
def test_quotient_dimension_count(data):
    R, f, g = data
    if not R.graded:
        return
    # homogeneous parts only, so the quotient is graded
    fh = R.to_polynomial(R.normal_form(f).coords).homogeneous_part(1)
    gh = R.to_polynomial(R.normal_form(g).coords).homogeneous_part(2)
    I = ideal(R, [fh.to_str(R.vars) if not fh.is_zero() else "0",
                  gh.to_str(R.vars) if not gh.is_zero() else "0"])
    S, proj = quotient_ring(R, I)
    assert S.dim == R.dim - I.dim
    # the projection is a surjective ring map with kernel I
    assert rank(proj.matrix, R.p) == S.dim
    ker = kernel_basis(proj.matrix, R.p)
    assert ker == I.subspace


# --- annihilators --------------------------------------------------------------

def test_annihilator_examples():
    R = ring("x", "x^2")
    assert annihilator(R, ideal(R, ["x"])) == ideal(R, ["x"])
    Q = ring(*SQUARE)
    assert socle(Q) == ideal(Q, ["x*y"])
    assert annihilator(Q, ideal(Q, ["0"])).dim == Q.dim


def test_annihilator_by_brute_force():
    R = ring(*CUBE, p=3)
    I = ideal(R, ["x"])
    elems = [np.array(v) for v in itertools.product(range(3), repeat=R.dim)]
    killed = [v for v in elems
              if all(not R.multiply(v, g).any() for g in I.gens)]
    assert annihilator(R, I).dim == round(np.log(len(killed)) / np.log(3))


def test_truncated_power_detection():
    assert is_truncated_power(ring(*CUBE)) == 2
    assert is_truncated_power(ring("x", "x^3")) == 3
    assert is_truncated_power(ring(*SQUARE)) is None
    assert is_truncated_power(ring(*NONGOLOD)) is None
