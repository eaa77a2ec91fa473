"""Truncated integer power series, Poincaré series identities, deviations."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import (InconsistentSeries, InternalInconsistency,
                     NonUnitConstantTerm)
from .koszul import cached, homology_product, ring_koszul_homology
from .modules import FDModule, regular_module, residue_field
from .report import CheckReport, evidence, fails
from .resolve import minimal_resolution, residue_resolution
from .rings import QuotientRing, RingMap


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series with exact integer coefficients, kept mod t^(N+1)."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs, N: int | None = None):
        c = [int(x) for x in coeffs]
        if N is not None:
            c = (c + [0] * (N + 1))[:N + 1]
        if not c:
            raise ValueError("a truncated series needs at least one term")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i <= self.N else 0

    def __len__(self):
        return len(self.coeffs)

    def _n(self, other: "TruncatedSeries") -> int:
        return min(self.N, other.N)

    def __add__(self, other):
        other = _coerce(other, self.N)
        n = self._n(other)
        return TruncatedSeries([self[i] + other[i] for i in range(n + 1)])

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_coerce(other, self.N))

    def __mul__(self, other):
        other = _coerce(other, self.N)
        n = self._n(other)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other[j]
        return TruncatedSeries(out)

    __rmul__ = __mul__
    __radd__ = __add__

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if c0 not in (1, -1):
            raise NonUnitConstantTerm(f"constant term {c0} is not ±1")
        out = [c0]
        for k in range(1, self.N + 1):
            s = sum(self.coeffs[j] * out[k - j] for j in range(1, k + 1))
            out.append(-s * c0)
        return TruncatedSeries(out)

    def __truediv__(self, other):
        return self * _coerce(other, self.N).inverse()

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by t^k, keeping the truncation."""
        return TruncatedSeries([0] * k + list(self.coeffs), self.N)

    def first_difference(self, other) -> int | None:
        other = _coerce(other, self.N)
        for i in range(self._n(other) + 1):
            if self[i] != other[i]:
                return i
        return None

    def __repr__(self):
        return f"TruncatedSeries({list(self.coeffs)})"


def _coerce(x, N: int) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    if isinstance(x, int):
        return TruncatedSeries([x], N)
    return TruncatedSeries(x, N)


def one(N: int) -> TruncatedSeries:
    return TruncatedSeries([1], N)


def binomial_power(n: int, N: int) -> TruncatedSeries:
    """(1 + t)^n."""
    return TruncatedSeries([comb(n, i) for i in range(N + 1)])


def poincare_series(M: FDModule, N: int) -> TruncatedSeries:
    return TruncatedSeries(minimal_resolution(M, N).betti[:N + 1])


def residue_poincare(R: QuotientRing, N: int) -> TruncatedSeries:
    return TruncatedSeries(residue_resolution(R, N).betti[:N + 1])


def restrict_scalars(M: FDModule, proj: RingMap) -> FDModule:
    """View an S-module as an R-module along R -> S."""
    R = proj.source
    acts = [M.element_action(proj.matrix[:, R.index[_unit(R, j)]])
            for j in range(R.nvars)]
    return FDModule(R, M.dim, acts, M.degrees, M.label)


def quotient_as_module(proj: RingMap) -> FDModule:
    """S as an R-module (cached on the map, so its resolution is reused)."""
    return cached(proj, "target-module",
                  lambda: restrict_scalars(regular_module(proj.target), proj))


def _unit(R: QuotientRing, j: int) -> tuple[int, ...]:
    return tuple(int(a == j) for a in range(R.nvars))


def _compare(command: str, rule: str, actual: TruncatedSeries,
             expected: TruncatedSeries, N: int, inputs: dict,
             names=("actual", "expected")) -> CheckReport:
    data = {names[0]: list(actual.coeffs), names[1]: list(expected.coeffs)}
    d = actual.first_difference(expected)
    if d is None:
        verdict = evidence(rule, N)
    else:
        verdict = fails(rule, {"degree": d, names[0]: actual[d],
                               names[1]: expected[d]})
    return CheckReport(command, verdict, inputs, N, data)


def check_multiplicativity(R: QuotientRing, S: QuotientRing, proj: RingMap,
                           N: int, module: FDModule | None = None
                           ) -> CheckReport:
    """P^R_M = P^R_S · P^S_M mod t^(N+1), for an S-module M (default k)."""
    M = module if module is not None else residue_field(S)
    lhs = poincare_series(restrict_scalars(M, proj), N)
    prs = poincare_series(quotient_as_module(proj), N)
    rhs = prs * poincare_series(M, N)
    return _compare("multiplicativity", "poincare-product", lhs, rhs, N,
                    {"module": M.label},
                    names=("P^R_M", "P^R_S*P^S_M"))


def golod_series(R: QuotientRing, N: int) -> TruncatedSeries:
    """(1+t)^n / (1 - Σ_{i≥1} dim H_i(R) t^{i+1})."""
    H = ring_koszul_homology(R)
    den = [1] + [0] * N
    for i in range(1, H.complex.length + 1):
        if i + 1 <= N:
            den[i + 1] -= H.dim(i)
    return binomial_power(R.nvars, N) / TruncatedSeries(den)


def golod_ring_check(R: QuotientRing, N: int) -> CheckReport:
    actual = residue_poincare(R, N)
    bound = golod_series(R, N)
    return _compare("check-golod-ring", "golod-ring-series", actual, bound,
                    N, {}, names=("actual", "bound"))


def golod_map_series(R: QuotientRing, S: QuotientRing, proj: RingMap,
                     N: int) -> TruncatedSeries:
    """P^R_k / (1 - t(P^R_S - 1))."""
    prs = poincare_series(quotient_as_module(proj), N)
    den = one(N) - (prs - one(N)).shift(1)
    return residue_poincare(R, N) / den


def golod_map_check(R: QuotientRing, S: QuotientRing, proj: RingMap,
                    N: int) -> CheckReport:
    actual = residue_poincare(S, N)
    expected = golod_map_series(R, S, proj, N)
    return _compare("check-golod-map", "golod-map-series", actual, expected,
                    N, {}, names=("actual", "expected"))


# ----------------------------------------------------------------------------
# deviations


def _odd_factor(d: int, e: int, N: int, inverse: bool) -> TruncatedSeries:
    """(1 + t^d)^e, or its inverse."""
    out = [0] * (N + 1)
    for k in range(N // d + 1):
        c = (-1) ** k * comb(e + k - 1, k) if inverse else comb(e, k)
        out[d * k] = c
    return TruncatedSeries(out)


def _even_factor(d: int, e: int, N: int, inverse: bool) -> TruncatedSeries:
    """(1 - t^d)^(-e), or its inverse (1 - t^d)^e."""
    out = [0] * (N + 1)
    for k in range(N // d + 1):
        c = (-1) ** k * comb(e, k) if inverse else comb(e + k - 1, k)
        out[d * k] = c
    return TruncatedSeries(out)


def deviations_from_poincare(P: TruncatedSeries, N: int | None = None
                             ) -> list[int]:
    """ε_1..ε_N with P = Π (1+t^{2i-1})^{ε_{2i-1}} / Π (1-t^{2i})^{ε_{2i}}."""
    N = P.N if N is None else min(N, P.N)
    if P[0] != 1:
        raise InconsistentSeries("a Poincaré series starts with 1")
    Q = TruncatedSeries(P.coeffs[:N + 1])
    eps = []
    for d in range(1, N + 1):
        e = Q[d]
        if e < 0:
            raise InconsistentSeries(f"negative deviation in degree {d}")
        eps.append(e)
        if e:
            f = _odd_factor if d % 2 else _even_factor
            Q = Q * f(d, e, N, inverse=True)
    return eps


def product_from_deviations(eps, N: int) -> TruncatedSeries:
    out = one(N)
    for d, e in enumerate(eps, start=1):
        if e and d <= N:
            f = _odd_factor if d % 2 else _even_factor
            out = out * f(d, e, N, inverse=False)
    return out


def ci_details(S: QuotientRing) -> dict:
    """The three independent complete-intersection tests for Artinian S."""
    H = ring_koszul_homology(S)
    eps = deviations_from_poincare(residue_poincare(S, 3), 3)
    eps = (eps + [0, 0, 0])[:3]
    return {
        "h1_equals_embdim": H.dim(1) == S.embdim,
        "eps3_zero": eps[2] == 0,
        "h2_is_h1_squared": homology_product(H, 1, 1).dim == H.dim(2),
        "dims": {"H1": H.dim(1), "H2": H.dim(2), "embdim": S.embdim,
                 "eps": eps},
    }


def ci_check(S: QuotientRing) -> bool:
    """Whether S is a complete intersection; the three tests must agree."""
    info = ci_details(S)
    votes = {info["h1_equals_embdim"], info["eps3_zero"],
             info["h2_is_h1_squared"]}
    if len(votes) != 1:
        raise InternalInconsistency(
            f"complete-intersection tests disagree: {info}")
    return votes.pop()
