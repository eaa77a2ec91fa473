"""Artinian quotients R = k[x_1..x_n]/J over F_p and their ideals.

A :class:`QuotientRing` fixes the degrevlex Groebner basis of J, the
standard monomials as a k-basis, and a dense multiplication tensor.  Every
later computation treats R as a finite-dimensional algebra through these
arrays.  Ideals are carried both by generators and by their k-span.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import (DimensionMismatch, NonHomogeneousIdeal, NotArtinian,
                     NotGraded, ParseError, VariableMismatch)
from .exactla import (DEFAULT_PRIME, Subspace, check_prime, matmul_mod, rref,
                      subspace_intersect, subspace_sum)
from .poly import (Polynomial, degrevlex_key, groebner_basis, parse_polynomial,
                   parse_ring_spec, reduce)
from .report import CheckReport, fails, holds


def _monomials_of_degree(n: int, d: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


class QuotientRing:
    """A finite-dimensional quotient of a polynomial ring over F_p."""

    def __init__(self, names: list[str], relations: list[Polynomial], p: int):
        self.p = check_prime(p)
        self.vars = list(names)
        self.nvars = len(names)
        for f in relations:
            if f.nvars != self.nvars or f.p != self.p:
                raise VariableMismatch("relation does not match ring")
            low = min((sum(m) for m in f.terms), default=2)
            if low < 2:
                raise ParseError(
                    "relations must lie in the square of the maximal ideal "
                    f"(offending relation: {f.to_str(self.vars)})")
        self.defining_gens = [f for f in relations if not f.is_zero()]
        self.groebner = groebner_basis(self.defining_gens)
        self.graded = all(f.is_homogeneous() for f in self.defining_gens)
        leads = [g.leading_monomial() for g in self.groebner]
        for i in range(self.nvars):
            if not any(m[i] > 0 and sum(m) == m[i] for m in leads):
                raise NotArtinian(
                    f"no power of {self.vars[i]} lies in the defining ideal")
        self.monomial_basis = self._standard_monomials(leads)
        self.index = {m: i for i, m in enumerate(self.monomial_basis)}
        self.degrees = np.array([sum(m) for m in self.monomial_basis], np.int64)
        self.dim = len(self.monomial_basis)
        self.top_degree = int(self.degrees.max())
        self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _standard_monomials(self, leads) -> list[tuple[int, ...]]:
        basis = []
        d = 0
        while True:
            found = [m for m in _monomials_of_degree(self.nvars, d)
                     if not any(all(a <= b for a, b in zip(l, m))
                                for l in leads)]
            if not found:
                break
            basis.extend(sorted(found, key=degrevlex_key, reverse=True))
            d += 1
        return basis

    def _build_tables(self):
        D, p = self.dim, self.p
        mats = []
        for j in range(self.nvars):
            x = np.zeros((D, D), np.int64)
            for c, mono in enumerate(self.monomial_basis):
                e = list(mono)
                e[j] += 1
                x[:, c] = self.coords_of(
                    reduce(Polynomial({tuple(e): 1}, self.nvars, p),
                           self.groebner))
            mats.append(x)
        self.var_mats = mats
        # mult[b, c, :] = coordinates of (basis b) * (basis c)
        mult = np.zeros((D, D, D), np.int64)
        for b, mono in enumerate(self.monomial_basis):
            act = np.eye(D, dtype=np.int64)
            for j, e in enumerate(mono):
                for _ in range(e):
                    act = matmul_mod(mats[j], act, p)
            mult[b] = act.T
        self.mult = mult
        self.monomial_actions = np.transpose(mult, (0, 2, 1)).copy()

    def coords_of(self, f: Polynomial) -> np.ndarray:
        """Coordinates of an already-reduced polynomial."""
        v = np.zeros(self.dim, np.int64)
        for m, c in f.terms.items():
            v[self.index[m]] = c
        return v

    # -- basic API -----------------------------------------------------------

    @property
    def embdim(self) -> int:
        return self.nvars

    def degree_indices(self, d: int) -> np.ndarray:
        return np.flatnonzero(self.degrees == d)

    def polynomial(self, text: str) -> Polynomial:
        return parse_polynomial(text, self.vars, self.p)

    def normal_form(self, f: Polynomial | str) -> "RingElement":
        if isinstance(f, str):
            f = self.polynomial(f)
        if f.nvars != self.nvars or f.p != self.p:
            raise VariableMismatch("polynomial is not in this ring's ambient")
        return RingElement(self, self.coords_of(reduce(f, self.groebner)))

    def element(self, value) -> "RingElement":
        if isinstance(value, RingElement):
            if value.owner is not self:
                raise VariableMismatch("element belongs to another ring")
            return value
        if isinstance(value, (str, Polynomial)):
            return self.normal_form(value)
        if isinstance(value, int):
            return self.normal_form(Polynomial.constant(value, self.nvars,
                                                        self.p))
        return RingElement(self, np.mod(np.asarray(value, np.int64), self.p))

    def one(self) -> "RingElement":
        return self.element(1)

    def variable(self, j: int) -> "RingElement":
        return RingElement(self, self.var_mats[j][:, 0].copy())

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of coordinate vectors."""
        return np.mod(np.einsum("b,c,bce->e", a, b, self.mult,
                                optimize=True), self.p)

    def mult_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by ``a`` acting on column vectors."""
        return np.mod(np.einsum("b,bec->ec", np.asarray(a, np.int64),
                                self.monomial_actions), self.p)

    def to_polynomial(self, coords: np.ndarray) -> Polynomial:
        return Polynomial({m: int(c) for m, c in
                           zip(self.monomial_basis, coords) if c},
                          self.nvars, self.p)

    def format(self, coords: np.ndarray) -> str:
        return self.to_polynomial(coords).to_str(self.vars)

    def is_homogeneous(self, coords: np.ndarray) -> bool:
        return len(set(self.degrees[np.flatnonzero(coords)])) <= 1

    def homogeneous_degree(self, coords: np.ndarray) -> int | None:
        ds = set(self.degrees[np.flatnonzero(coords)].tolist())
        if len(ds) > 1:
            raise NonHomogeneousIdeal("element is not homogeneous")
        return ds.pop() if ds else None

    def relations_text(self) -> list[str]:
        return [g.to_str(self.vars) for g in self.defining_gens]

    def describe(self) -> dict:
        return {"p": self.p, "vars": self.vars,
                "relations": self.relations_text(),
                "groebner": [g.to_str(self.vars) for g in self.groebner],
                "dim": self.dim, "embdim": self.embdim, "graded": self.graded,
                "hilbert": [int(np.sum(self.degrees == d))
                            for d in range(self.top_degree + 1)],
                "basis": [self.format(np.eye(self.dim, dtype=np.int64)[i])
                          for i in range(self.dim)]}

    def require_graded(self):
        if not self.graded:
            raise NotGraded("this operation needs a standard graded ring")

    # -- ideals ----------------------------------------------------------------

    def ideal(self, gens) -> "RingIdeal":
        return make_ideal(self, gens)

    def maximal_ideal(self) -> "RingIdeal":
        return RingIdeal(self, [self.variable(j).coords
                                for j in range(self.nvars)])

    def zero_ideal(self) -> "RingIdeal":
        return RingIdeal(self, [])

    def power_of_maximal(self, k: int) -> "RingIdeal":
        if k <= 0:
            return RingIdeal(self, [self.one().coords])
        gens = []
        for mono in _monomials_of_degree(self.nvars, k):
            gens.append(self.normal_form(
                Polynomial({mono: 1}, self.nvars, self.p)).coords)
        return RingIdeal(self, gens)

    def __repr__(self):
        rel = ", ".join(self.relations_text())
        return (f"QuotientRing(F_{self.p}[{', '.join(self.vars)}]/({rel}), "
                f"dim={self.dim})")


@dataclass(frozen=True, eq=False)
class RingElement:
    owner: QuotientRing
    coords: np.ndarray

    def __post_init__(self):
        if self.coords.shape != (self.owner.dim,):
            raise DimensionMismatch("coordinate vector has the wrong length")

    def _other(self, o) -> np.ndarray:
        return self.owner.element(o).coords

    def __add__(self, o):
        return RingElement(self.owner, (self.coords + self._other(o))
                           % self.owner.p)

    def __sub__(self, o):
        return RingElement(self.owner, (self.coords - self._other(o))
                           % self.owner.p)

    def __mul__(self, o):
        return RingElement(self.owner,
                           self.owner.multiply(self.coords, self._other(o)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __eq__(self, o):
        if not isinstance(o, RingElement):
            return NotImplemented
        return self.owner is o.owner and np.array_equal(self.coords, o.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def __str__(self):
        return self.owner.format(self.coords)

    __repr__ = __str__


class RingIdeal:
    """An ideal given by generators, with its k-span cached as a Subspace."""

    def __init__(self, owner: QuotientRing, gens):
        self.owner = owner
        self.gens = [np.mod(np.asarray(g, np.int64), owner.p) for g in gens]
        self.gens = [g for g in self.gens if np.any(g)]
        if self.gens:
            prods = np.einsum("gc,bce->gbe", np.array(self.gens),
                              owner.mult).reshape(-1, owner.dim)
            self.subspace = Subspace.span(np.mod(prods, owner.p), owner.dim,
                                          owner.p)
        else:
            self.subspace = Subspace.zero(owner.dim, owner.p)

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def is_zero(self) -> bool:
        return self.subspace.dim == 0

    def __eq__(self, other):
        if not isinstance(other, RingIdeal):
            return NotImplemented
        return self.owner is other.owner and self.subspace == other.subspace

    def __hash__(self):
        return hash(self.subspace)

    def contains(self, v) -> bool:
        return self.subspace.contains(self.owner.element(v).coords)

    def times_maximal(self) -> "RingIdeal":
        R = self.owner
        gens = [R.multiply(R.variable(j).coords, g)
                for g in self.gens for j in range(R.nvars)]
        return RingIdeal(R, gens)

    def product(self, other: "RingIdeal") -> "RingIdeal":
        R = self.owner
        return RingIdeal(R, [R.multiply(a, b) for a in self.gens
                             for b in other.gens])

    def trimmed(self) -> "RingIdeal":
        """Keep a minimal generating subset (drops gens in mI + span(kept))."""
        R = self.owner
        base = self.times_maximal().subspace
        kept: list[np.ndarray] = []
        span = base
        for g in self.gens:
            if not span.contains(g):
                kept.append(g)
                span = subspace_sum(span, Subspace.span(g, R.dim, R.p))
        return RingIdeal(R, kept)

    @property
    def mu(self) -> int:
        """Minimal number of generators, dim I/mI."""
        return self.dim - self.times_maximal().dim

    def is_homogeneous(self) -> bool:
        return all(self.owner.is_homogeneous(g) for g in self.gens)

    def gens_text(self) -> list[str]:
        return [self.owner.format(g) for g in self.gens]

    def __repr__(self):
        return f"RingIdeal({', '.join(self.gens_text()) or '0'})"


def make_ideal(R: QuotientRing, gens) -> RingIdeal:
    if isinstance(gens, str):
        from .poly import split_top_level
        gens = split_top_level(gens)
    return RingIdeal(R, [R.element(g).coords for g in gens])


def parse_ring(text: str, p: int | None = None) -> QuotientRing:
    """Build a ring from ring-spec text (``p = ..``, ``vars = ..`` ...)."""
    fields = parse_ring_spec(text)
    prime = check_prime(p) if p is not None else fields["p"]
    names = fields["vars"]
    rels = [parse_polynomial(r, names, prime) for r in fields["relations"]]
    return QuotientRing(names, rels, prime)


def ring_from_relations(names, relations, p: int = DEFAULT_PRIME
                        ) -> QuotientRing:
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",")]
    if isinstance(relations, str):
        from .poly import split_top_level
        relations = split_top_level(relations)
    rels = [parse_polynomial(r, names, p) if isinstance(r, str) else r
            for r in relations]
    return QuotientRing(names, rels, p)


def normal_form(R: QuotientRing, f) -> RingElement:
    return R.normal_form(f)


# ----------------------------------------------------------------------------
# the necessary condition I ∩ m² = mI


def check_nc(R: QuotientRing, I: RingIdeal) -> CheckReport:
    m2 = R.power_of_maximal(2).subspace
    left = subspace_intersect(I.subspace, m2)
    mI = I.times_maximal().subspace
    inputs = {"ideal": I.gens_text()}
    data = {"dim_I": I.dim, "dim_mI": mI.dim, "dim_I_cap_m2": left.dim,
            "mI_gens": [R.format(v) for v in mI.basis]}
    if left == mI:
        return CheckReport("check-nc", holds("necessary-condition"), inputs,
                           data=data)
    # mI ⊆ I ∩ m² always, so a witness sits among the RREF rows
    witness = next(v for v in left.basis if not mI.contains(v))
    return CheckReport(
        "check-nc",
        fails("necessary-condition",
              {"element": R.format(witness), "coords": witness}),
        inputs, data=data)


def annihilator(R: QuotientRing, I: RingIdeal) -> RingIdeal:
    """(0 : I) computed as the common kernel of multiplication maps."""
    from .exactla import kernel_basis
    if not I.gens:
        return RingIdeal(R, [R.one().coords])
    stacked = np.vstack([R.mult_matrix(g) for g in I.gens])
    ker = kernel_basis(stacked, R.p)
    return RingIdeal(R, list(ker.basis))


# ----------------------------------------------------------------------------
# quotients by homogeneous ideals


@dataclass
class RingMap:
    """The projection R -> S = R/I with S minimally presented.

    ``linear[i, j]`` is the coefficient of S's variable j in the image of
    R's variable i; ``matrix`` is the map on monomial-basis coordinates.
    """

    source: QuotientRing
    target: QuotientRing
    images: list[Polynomial]
    linear: np.ndarray
    matrix: np.ndarray

    def __call__(self, coords: np.ndarray) -> np.ndarray:
        return matmul_mod(self.matrix, np.asarray(coords, np.int64)
                          [:, None], self.source.p)[:, 0]

    def images_text(self) -> dict:
        return {x: f.to_str(self.target.vars) if self.target.nvars else
                str(f.terms.get((), 0))
                for x, f in zip(self.source.vars, self.images)}


def quotient_ring(R: QuotientRing, I: RingIdeal) -> tuple[QuotientRing, RingMap]:
    """Minimal presentation of R/I for homogeneous I over graded R.

    Linear forms in I are used to eliminate variables (pivot variables of
    their row-reduced form), so the defining ideal of S lies in the square
    of its maximal ideal and embdim(S) = n - dim I_1.
    """
    R.require_graded()
    if not I.is_homogeneous():
        raise NonHomogeneousIdeal("quotient_ring needs a homogeneous ideal")
    n, p = R.nvars, R.p
    # coordinates of R_1 are ordered like R's variables
    var_pos = [R.index[tuple(int(i == j) for i in range(n))] for j in range(n)]
    lin_rows = [g[var_pos] for g in I.gens if R.homogeneous_degree(g) == 1]
    if lin_rows:
        red, _, piv = rref(np.array(lin_rows), p)
    else:
        red, piv = np.zeros((0, n), np.int64), []
    free = [j for j in range(n) if j not in piv]
    names = [R.vars[j] for j in free]
    m = len(free)
    images = []
    linear = np.zeros((n, m), np.int64)
    for j in range(n):
        if j in piv:
            row = red[piv.index(j)]
            coeffs = {free.index(f): (-int(row[f])) % p for f in free}
        else:
            coeffs = {free.index(j): 1}
        terms = {}
        for k, c in coeffs.items():
            if c:
                e = [0] * m
                e[k] = 1
                terms[tuple(e)] = c
                linear[j, k] = c
        images.append(Polynomial(terms, m, p))
    rels = []
    for f in R.defining_gens:
        rels.append(f.substitute(images) if n else f)
    for g in I.gens:
        if R.homogeneous_degree(g) == 1:
            continue
        rels.append(R.to_polynomial(g).substitute(images))
    rels = [f for f in rels if not f.is_zero()]
    S = QuotientRing(names, rels, p)
    P = np.zeros((S.dim, R.dim), np.int64)
    for b, mono in enumerate(R.monomial_basis):
        img = Polynomial({mono: 1}, n, p).substitute(images) if n else \
            Polynomial({(): 1}, 0, p)
        P[:, b] = S.normal_form(img).coords
    return S, RingMap(R, S, images, linear, P)


# ----------------------------------------------------------------------------
# structural predicates used by the criteria


def is_truncated_power(R: QuotientRing) -> int | None:
    """If R = k[x_1..x_n]/(x_1..x_n)^q for some q >= 2, return q."""
    if not R.graded or R.nvars == 0:
        return None
    q = R.top_degree + 1
    if q < 2:
        return None
    for d in range(q):
        if int(np.sum(R.degrees == d)) != comb(R.nvars + d - 1, d):
            return None
    return q


def socle(R: QuotientRing) -> RingIdeal:
    return annihilator(R, R.maximal_ideal())


def coordinate_complements(R: QuotientRing, I: RingIdeal):
    """Variable subsets T such that span(I_1) ⊕ span(T) = R_1."""
    n, p = R.nvars, R.p
    var_pos = [R.index[tuple(int(i == j) for i in range(n))] for j in range(n)]
    lin = [g[var_pos] for g in I.gens if R.homogeneous_degree(g) == 1]
    red, k, _ = rref(np.array(lin, np.int64).reshape(len(lin), n), p)
    base = red[:k]
    for T in combinations(range(n), n - k):
        rows = np.vstack([base, np.eye(n, dtype=np.int64)[list(T)]]) \
            if T else base
        if rref(rows, p)[1] == n:
            yield T
