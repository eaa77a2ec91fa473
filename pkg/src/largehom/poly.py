"""Sparse polynomials over F_p, the ring-spec text format, and Buchberger.

A polynomial is a dict mapping exponent tuples to nonzero residues.  The
monomial order is degree reverse lexicographic throughout.
"""

from __future__ import annotations

import re
from itertools import combinations

from .errors import ParseError, VariableMismatch
from .exactla import check_prime, inv_mod

Monomial = tuple[int, ...]


def degrevlex_key(m: Monomial):
    """Sort key: larger key means larger monomial under degrevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


class Polynomial:
    __slots__ = ("terms", "nvars", "p")

    def __init__(self, terms: dict, nvars: int, p: int):
        self.nvars = nvars
        self.p = p
        clean = {}
        for mono, c in terms.items():
            if len(mono) != nvars:
                raise VariableMismatch(
                    f"exponent {mono} has length {len(mono)}, expected {nvars}")
            c %= p
            if c:
                clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def constant(cls, c: int, nvars: int, p: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars, p)

    @classmethod
    def variable(cls, i: int, nvars: int, p: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars, p)

    def is_zero(self) -> bool:
        return not self.terms

    def leading_monomial(self) -> Monomial:
        return max(self.terms, key=degrevlex_key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()]

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial({m: c for m, c in self.terms.items() if sum(m) == d},
                          self.nvars, self.p)

    def _check(self, other: "Polynomial"):
        if other.nvars != self.nvars or other.p != self.p:
            raise VariableMismatch("polynomials live in different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Polynomial(t, self.nvars, self.p)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()},
                          self.nvars, self.p)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: int) -> "Polynomial":
        return Polynomial({m: v * c for m, v in self.terms.items()},
                          self.nvars, self.p)

    def shift(self, mono: Monomial, c: int = 1) -> "Polynomial":
        return Polynomial(
            {tuple(a + b for a, b in zip(m, mono)): v * c
             for m, v in self.terms.items()}, self.nvars, self.p)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Polynomial(t, self.nvars, self.p)

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(1, self.nvars, self.p)
        for _ in range(k):
            out = out * self
        return out

    def monic(self) -> "Polynomial":
        return self.scale(inv_mod(self.leading_coefficient(), self.p))

    def substitute(self, images: list["Polynomial"]) -> "Polynomial":
        """Replace variable i by ``images[i]`` (all in one target ring)."""
        tgt = images[0] if images else None
        nv = tgt.nvars if tgt is not None else 0
        out = Polynomial({}, nv, self.p)
        for mono, c in self.terms.items():
            term = Polynomial.constant(c, nv, self.p)
            for i, e in enumerate(mono):
                if e:
                    term = term * images[i] ** e
            out = out + term
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.nvars, self.p, self.terms) == (other.nvars, other.p,
                                                    other.terms)

    def __hash__(self):
        return hash((self.nvars, self.p, frozenset(self.terms.items())))

    def to_str(self, names: list[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=degrevlex_key, reverse=True):
            c = self.terms[mono]
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.terms!r}, p={self.p})"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-])|(\()|(\)))")


def parse_polynomial(text: str, names: list[str], p: int) -> Polynomial:
    """Parse a signed sum of terms such as ``2x^2 - x*y + 3``.

    A term is an optional coefficient followed by variable powers, with
    optional ``*`` between factors.  Parenthesised sub-expressions raised to
    powers (``(x+y)^2``) are accepted as a convenience.
    """
    index = {n: i for i, n in enumerate(names)}
    nv = len(names)
    toks = []
    pos = 0
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {s[pos]!r} in {text!r}")
        kind = m.lastindex
        toks.append((kind, m.group(kind)))
        pos = m.end()
    toks.append((0, None))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr() -> Polynomial:
        total = Polynomial({}, nv, p)
        first = True
        while True:
            kind, val = peek()
            sign = 1
            if kind == 5:
                take()
                sign = -1 if val == "-" else 1
            elif not first:
                break
            t = term()
            total = total + (t if sign > 0 else -t)
            first = False
            if peek()[0] != 5:
                break
        return total

    def power_of(base: Polynomial) -> Polynomial:
        if peek()[0] == 3:
            take()
            kind, val = take()
            if kind != 1:
                raise ParseError(f"expected exponent in {text!r}")
            return base ** int(val)
        return base

    def factor() -> Polynomial | None:
        kind, val = peek()
        if kind == 1:
            take()
            return power_of(Polynomial.constant(int(val), nv, p))
        if kind == 2:
            take()
            if val not in index:
                raise ParseError(f"unknown variable {val!r}")
            return power_of(Polynomial.variable(index[val], nv, p))
        if kind == 6:
            take()
            inner = expr()
            if take()[0] != 7:
                raise ParseError(f"unbalanced parenthesis in {text!r}")
            return power_of(inner)
        return None

    def term() -> Polynomial:
        f = factor()
        if f is None:
            raise ParseError(f"expected a term in {text!r}")
        out = f
        while True:
            kind, _ = peek()
            if kind == 4:
                take()
                nxt = factor()
                if nxt is None:
                    raise ParseError(f"dangling '*' in {text!r}")
            elif kind in (1, 2, 6):
                nxt = factor()
            else:
                break
            out = out * nxt
        return out

    result = expr()
    if peek()[0] != 0:
        raise ParseError(f"trailing input in {text!r}")
    return result


def split_top_level(text: str) -> list[str]:
    """Split on commas not nested inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def parse_ring_spec(text: str) -> dict:
    """Parse ring-spec text into a plain dict of fields (strings kept raw)."""
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in fields:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        if key == "p":
            if not val.isdigit():
                raise ParseError(f"line {lineno}: p must be an integer")
            fields["p"] = check_prime(int(val))
        elif key == "vars":
            names = [v.strip() for v in val.split(",")]
            if not names or not all(_IDENT.match(n) for n in names):
                raise ParseError(f"line {lineno}: bad variable list {val!r}")
            if len(set(names)) != len(names):
                raise ParseError(f"line {lineno}: repeated variable name")
            fields["vars"] = names
        elif key in ("relations", "ideal"):
            fields[key] = split_top_level(val)
        elif key == "truncation":
            if not val.isdigit():
                raise ParseError(f"line {lineno}: truncation must be an integer")
            fields["truncation"] = int(val)
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
    for req in ("p", "vars", "relations"):
        if req not in fields:
            raise ParseError(f"missing required key {req!r}")
    return fields


# --------------------------------------------------------------------------
# Groebner bases


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def reduce(f: Polynomial, basis: list[Polynomial]) -> Polynomial:
    """Full remainder of ``f`` modulo a list of monic polynomials."""
    p = f.p
    rem: dict = {}
    work = dict(f.terms)
    leads = [(g.leading_monomial(), g) for g in basis]
    while work:
        m = max(work, key=degrevlex_key)
        c = work.pop(m)
        for lm, g in leads:
            if _divides(lm, m):
                q = tuple(a - b for a, b in zip(m, lm))
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = tuple(a + b for a, b in zip(gm, q))
                    v = (work.get(t, 0) - c * gc) % p
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            rem[m] = c
    return Polynomial(rem, f.nvars, p)


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    l = _lcm(lf, lg)
    a = f.shift(tuple(x - y for x, y in zip(l, lf)))
    b = g.shift(tuple(x - y for x, y in zip(l, lg)))
    return a - b


def groebner_basis(gens: list[Polynomial]) -> list[Polynomial]:
    """Reduced Groebner basis under degrevlex (Buchberger with the
    coprime-leading-term and chain criteria)."""
    basis = [g.monic() for g in gens if not g.is_zero()]
    if not basis:
        return []
    pairs = list(combinations(range(len(basis)), 2))
    while pairs:
        # normal selection strategy: smallest lcm first
        pairs.sort(key=lambda ij: degrevlex_key(_lcm(
            basis[ij[0]].leading_monomial(), basis[ij[1]].leading_monomial())))
        i, j = pairs.pop(0)
        li, lj = basis[i].leading_monomial(), basis[j].leading_monomial()
        l = _lcm(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        if any(k not in (i, j)
               and _divides(basis[k].leading_monomial(), l)
               and (min(i, k), max(i, k)) not in pairs
               and (min(j, k), max(j, k)) not in pairs
               for k in range(len(basis))):
            continue
        r = reduce(s_polynomial(basis[i], basis[j]), basis)
        if not r.is_zero():
            basis.append(r.monic())
            n = len(basis) - 1
            pairs.extend((k, n) for k in range(n))
    return _interreduce(basis)


def _interreduce(basis: list[Polynomial]) -> list[Polynomial]:
    # drop elements whose leading monomial is divisible by another's
    keep: list[Polynomial] = []
    for g in sorted(basis, key=lambda g: degrevlex_key(g.leading_monomial())):
        lm = g.leading_monomial()
        if not any(_divides(h.leading_monomial(), lm) for h in keep):
            keep.append(g)
    out = []
    for idx, g in enumerate(keep):
        others = keep[:idx] + keep[idx + 1:]
        lm = g.leading_monomial()
        tail = Polynomial({m: c for m, c in g.terms.items() if m != lm},
                          g.nvars, g.p)
        red = reduce(tail, others)
        out.append((Polynomial({lm: 1}, g.nvars, g.p) + red))
    return sorted(out, key=lambda g: degrevlex_key(g.leading_monomial()))
