"""Deciding (or gathering evidence) whether R -> R/I is large, small, Golod.

``detect_large`` runs a cascade of rules, cheapest first.  A rule either
decides (with a theorem behind it), contributes truncated evidence, or does
not apply.  The first decisive rule wins; if none decides, the verdict is
``EvidenceUpTo(N)`` from the Tor/Poincaré comparison, which can still
refute largeness at a single degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import (InternalInconsistency, NCViolation,
                     NotCompleteIntersection)
from .exactla import rank, subspace_intersect
from .koszul import (induced_map_HR_to_HS, map_H1I_to_H1R,
                     ring_koszul_homology)
from .modules import (cyclic_module, quotient_to_residue,
                      submodule_inclusion)
from .report import (CheckReport, Status, Verdict, evidence, fails, holds,
                     inapplicable)
from .resolve import (TorMap, linearity_defect, minimal_resolution,
                      tor_comparison, tor_kk_map)
from .rings import (QuotientRing, RingIdeal, annihilator, check_nc,
                    coordinate_complements, is_truncated_power,
                    quotient_ring, socle)
from .series import (check_multiplicativity, ci_check, ci_details,
                     golod_map_check, golod_ring_check)

# cheapest first; the truncated-power test only compares Hilbert functions,
# and the complete-intersection quotient test runs before the annihilator
# test so each structural case is reported under its own rule
RULES = (
    "necessary-condition",
    "truncated-power-of-maximal",
    "trivial",
    "finite-projective-dimension",
    "quotient-complete-intersection",
    "annihilator-is-maximal",
    "maximal-ideal-splits",
    "complete-intersection-ring",
    "golod-koszul-surjective",
    "koszul-module",
    "tor-evidence",
)

OPEN_QUESTION_FLAG = "open-question-profile"


def _first_false(pattern) -> int | None:
    return next((i for i, ok in enumerate(pattern) if not ok), None)


class Instance:
    """A pair (R, I) with its derived objects computed on demand."""

    def __init__(self, R: QuotientRing, I: RingIdeal, N: int,
                 golod_asserted: bool = False):
        R.require_graded()
        self.R = R
        self.I = I
        self.N = N
        self.golod_asserted = golod_asserted

    @cached_property
    def nc(self) -> CheckReport:
        return check_nc(self.R, self.I)

    @cached_property
    def quotient(self):
        return quotient_ring(self.R, self.I)

    @property
    def S(self) -> QuotientRing:
        return self.quotient[0]

    @property
    def proj(self):
        return self.quotient[1]

    @cached_property
    def trimmed(self) -> RingIdeal:
        return self.I.trimmed()

    @cached_property
    def ci_R(self) -> bool:
        return ci_check(self.R)

    @cached_property
    def ci_S(self) -> bool:
        return ci_check(self.S)

    @cached_property
    def h1_map(self):
        return map_H1I_to_H1R(self.R, self.I)

    def h_map(self, i: int):
        return induced_map_HR_to_HS(self.R, self.S, self.proj, i)

    def tor_kk(self, N: int | None = None) -> TorMap:
        return tor_kk_map(self.R, self.S, self.proj,
                          self.N if N is None else N)

    def tor_quotient(self, N: int | None = None) -> TorMap:
        return tor_comparison(quotient_to_residue(self.R, self.I),
                              self.N if N is None else N)

    @cached_property
    def multiplicativity(self) -> CheckReport:
        return check_multiplicativity(self.R, self.S, self.proj, self.N)

    def describe_quotient(self) -> dict:
        S = self.S
        return {"vars": S.vars,
                "relations": [g.to_str(S.vars) for g in S.groebner],
                "images": self.proj.images_text()}


# ----------------------------------------------------------------------------
# the individual rules; each returns a Verdict (INAPPLICABLE when silent)


def _rule_nc(x: Instance) -> Verdict:
    if x.nc.holds:
        return inapplicable("necessary-condition")
    return fails("necessary-condition", x.nc.verdict.witness)


def _rule_trivial(x: Instance) -> Verdict:
    R, I = x.R, x.I
    if I.is_zero() or I.subspace == R.maximal_ideal().subspace:
        return holds("trivial")
    return inapplicable("trivial")


def _rule_regular_sequence(x: Instance) -> Verdict:
    """Trimmed linear generators forming a regular sequence give pd < ∞."""
    R = x.R
    gens = x.trimmed.gens
    if not gens or any(R.homogeneous_degree(g) != 1 for g in gens):
        return inapplicable("finite-projective-dimension")
    for t, g in enumerate(gens):
        # g must be a non-zerodivisor on R/(g_1, ..., g_{t-1})
        M, _ = cyclic_module(R, R.ideal(gens[:t]))
        if rank(M.element_action(g), R.p) < M.dim:
            return inapplicable("finite-projective-dimension")
    return holds("finite-projective-dimension")


def _rule_annihilator(x: Instance) -> Verdict:
    R = x.R
    ann = annihilator(R, x.I)
    if ann.subspace == R.maximal_ideal().subspace:
        return holds("annihilator-is-maximal")
    return inapplicable("annihilator-is-maximal")


def _rule_quotient_ci(x: Instance) -> Verdict:
    if x.ci_S:
        return holds("quotient-complete-intersection",
                     trace=[{"quotient": x.describe_quotient()}])
    return inapplicable("quotient-complete-intersection")


def _rule_splitting(x: Instance) -> Verdict:
    R, I = x.R, x.I
    for T in coordinate_complements(R, I):
        J = R.ideal([R.variable(j).coords for j in T])
        if subspace_intersect(I.subspace, J.subspace).dim == 0:
            return holds("maximal-ideal-splits",
                         trace=[{"complement": [R.vars[j] for j in T]}])
    return inapplicable("maximal-ideal-splits")


def ci_conditions(x: Instance) -> dict[str, bool]:
    """The five exactly checkable conditions for a complete intersection R."""
    tq = x.tor_quotient(max(x.N, 2))
    tk = x.tor_kk(max(x.N, 3))
    return {
        "quotient is complete intersection": x.ci_S,
        "Tor_2(S,k) -> Tor_2(k,k) injective": tq.injective(2),
        "Tor^R_3(k,k) -> Tor^S_3(k,k) surjective": tk.surjective(3),
        "H_1(I)⊗k -> H_1(R) injective": x.h1_map.injective,
        "H_2(R) -> H_2(S) surjective": x.h_map(2).surjective,
    }


def _rule_ci_ring(x: Instance) -> Verdict:
    if not x.ci_R:
        return inapplicable("complete-intersection-ring")
    conds = ci_conditions(x)
    values = set(conds.values())
    if len(values) != 1:
        raise InternalInconsistency(
            f"complete-intersection conditions disagree: {conds}")
    trace = [{"conditions": conds}]
    if values.pop():
        return holds("complete-intersection-ring", trace=trace)
    return fails("complete-intersection-ring",
                 {"condition": "quotient is complete intersection",
                  "value": False, "quotient": x.describe_quotient()},
                 trace=trace)


def _rule_truncated_power(x: Instance) -> Verdict:
    q = is_truncated_power(x.R)
    if q is None:
        return inapplicable("truncated-power-of-maximal")
    return holds("truncated-power-of-maximal", trace=[{"power": q}])


def _rule_golod(x: Instance) -> Verdict:
    g = golod_ring_check(x.R, x.N)
    if not g.holds:
        return inapplicable("golod-koszul-surjective")
    length = ring_koszul_homology(x.R).complex.length
    surj = [x.h_map(i).surjective for i in range(1, length + 1)]
    if not all(surj):
        return inapplicable("golod-koszul-surjective",
                            trace=[{"surjective": surj}])
    trace = [{"golod_to": x.N, "surjective": surj,
              "golod_asserted": x.golod_asserted}]
    if x.golod_asserted:
        return holds("golod-koszul-surjective", trace=trace)
    return evidence("golod-koszul-surjective", x.N, trace=trace)


def gorenstein_short(R: QuotientRing) -> bool:
    """Gorenstein with m³ = 0 (graded: one-dimensional socle, top degree ≤ 2)."""
    return R.graded and R.top_degree <= 2 and socle(R).dim == 1


def _rule_koszul_module(x: Instance) -> Verdict:
    R, I = x.R, x.I
    M, _ = cyclic_module(R, I)
    rep = linearity_defect(M, x.N)
    m2 = R.power_of_maximal(2).subspace
    certified = (gorenstein_short(R) and not I.is_zero()
                 and not m2.contains_all(I.subspace.basis))
    trace = [{"ld_window": rep.ld, "lin_homology": rep.lin_homology,
              "koszul_to_window": rep.koszul_module,
              "certificate": certified}]
    if certified:
        if not rep.koszul_module:
            raise InternalInconsistency(
                "certified Koszul module has linear-part homology")
        return holds("koszul-module", trace=trace)
    if rep.koszul_module:
        return evidence("koszul-module", x.N, trace=trace)
    return inapplicable("koszul-module", trace=trace)


def koszul_module_check(R: QuotientRing, I: RingIdeal, N: int) -> CheckReport:
    """Is R/I a Koszul R-module?  Linear-part homology in the window refutes."""
    x = Instance(R, I, N)
    M, _ = cyclic_module(R, I)
    rep = linearity_defect(M, N)
    data = {"ld_window": rep.ld, "lin_homology": rep.lin_homology,
            "generator_degrees": rep.generator_degrees,
            "betti": minimal_resolution(M, N).betti[:N + 1],
            "gorenstein_short": gorenstein_short(R)}
    inputs = {"ideal": I.gens_text()}
    if not rep.koszul_module:
        d = next(i for i, h in enumerate(rep.lin_homology) if h)
        return CheckReport("koszul-module", fails(
            "linear-part-homology", {"degree": d,
                                     "dim": rep.lin_homology[d]}),
            inputs, N, data)
    v = _rule_koszul_module(x)
    if v.status is Status.HOLDS:
        return CheckReport("koszul-module", holds("koszul-module"),
                           inputs, N, data)
    return CheckReport("koszul-module", evidence("linear-part-homology", N),
                       inputs, N, data)


@dataclass
class DefinitionProfile:
    """The three Definition-style conditions, degree by degree."""
    surjective: list[bool]
    injective: list[bool]
    multiplicative_failure: int | None
    N: int

    @property
    def first_failures(self) -> dict:
        return {"surjectivity": _first_false(self.surjective),
                "injectivity": _first_false(self.injective),
                "multiplicativity": self.multiplicative_failure}

    def consistent(self) -> bool:
        """Injectivity and multiplicativity fail first in the same degree,
        surjectivity one degree later (when that is inside the window)."""
        f = self.first_failures
        inj, mul, sur = (f["injectivity"], f["multiplicativity"],
                         f["surjectivity"])
        if inj != mul:
            return False
        if inj is None or inj + 1 > self.N:
            return sur is None
        return sur == inj + 1

    @property
    def holds(self) -> bool:
        return all(self.surjective) and all(self.injective) \
            and self.multiplicative_failure is None


def definition_profile(x: Instance) -> DefinitionProfile:
    mult = x.multiplicativity
    w = mult.verdict.witness
    return DefinitionProfile(x.tor_kk().pattern("surjective"),
                             x.tor_quotient().pattern("injective"),
                             None if w is None else w["degree"], x.N)


def _rule_tor_evidence(x: Instance) -> Verdict:
    prof = definition_profile(x)
    if not prof.consistent():
        raise InternalInconsistency(
            f"large-map characterizations disagree: {prof.first_failures}")
    trace = [{"first_failures": prof.first_failures}]
    if prof.holds:
        return evidence("tor-evidence", x.N, trace=trace)
    f = prof.first_failures
    d = f["injectivity"]
    return fails("tor-evidence",
                 {"degree": d,
                  "condition": "Tor_i(S,k) -> Tor_i(k,k) injective",
                  "first_failures": f}, trace=trace)


_RULE_FUNCS = {
    "necessary-condition": _rule_nc,
    "trivial": _rule_trivial,
    "finite-projective-dimension": _rule_regular_sequence,
    "annihilator-is-maximal": _rule_annihilator,
    "quotient-complete-intersection": _rule_quotient_ci,
    "maximal-ideal-splits": _rule_splitting,
    "complete-intersection-ring": _rule_ci_ring,
    "truncated-power-of-maximal": _rule_truncated_power,
    "golod-koszul-surjective": _rule_golod,
    "koszul-module": _rule_koszul_module,
    "tor-evidence": _rule_tor_evidence,
}

# rules that presuppose the necessary condition
_NEEDS_NC = set(RULES) - {"necessary-condition", "tor-evidence"}


def _annotations(x: Instance, final: Verdict) -> list[str]:
    """Evidence-only notes for hypotheses that no finite check can close."""
    notes = []
    if final.status is not Status.EVIDENCE or not x.nc.holds:
        return notes
    inj = all(x.tor_quotient().pattern("injective"))
    if inj:
        notes.append(OPEN_QUESTION_FLAG)
        if x.h1_map.nonzero:
            notes.append("nonzero-h1-with-injective-tor")
    if all(x.tor_kk().pattern("surjective")):
        notes.append("surjective-tor-in-window")
    return notes


def detect_large(R: QuotientRing, I: RingIdeal, N: int,
                 golod_asserted: bool = False,
                 order: tuple[str, ...] | None = None) -> CheckReport:
    """Is R -> R/I large?  ``order`` permutes the cascade (for testing)."""
    x = Instance(R, I, N, golod_asserted)
    order = tuple(order) if order is not None else RULES
    if sorted(order) != sorted(RULES):
        raise ValueError("order must be a permutation of the rule names")
    trace: list[dict] = []
    final: Verdict | None = None
    for name in order:
        if name in _NEEDS_NC and not x.nc.holds:
            trace.append({"rule": name, "outcome": "skipped"})
            continue
        v = _RULE_FUNCS[name](x)
        trace.append({"rule": name, "outcome": v.label,
                      **({"detail": v.trace} if v.trace else {})})
        if v.decisive:
            final = Verdict(v.status, v.rule, v.witness, trace)
            break
    if final is None:
        # every rule ran, including the Tor comparison, and none decided
        final = evidence("tor-evidence", N, trace=trace)
        final.flags = _annotations(x, final)
    return _large_report(x, final)


def _large_report(x: Instance, final: Verdict) -> CheckReport:
    data = {}
    if x.nc.holds:
        data["quotient"] = x.describe_quotient()
    return CheckReport("check-large", final,
                       {"ideal": x.I.gens_text(),
                        "golod_asserted": x.golod_asserted}, x.N, data)


# ----------------------------------------------------------------------------
# standalone checks


def check_small(R: QuotientRing, I: RingIdeal, N: int) -> CheckReport:
    """Is R -> R/I small (Tor^R(k,k) -> Tor^S(k,k) injective)?"""
    S, proj = quotient_ring(R, I)
    T = tor_kk_map(R, S, proj, N)
    pattern = T.pattern("injective")
    data = {"injective": pattern, "ranks": T.ranks}
    inputs = {"ideal": I.gens_text()}
    d = _first_false(pattern)
    if d is None:
        return CheckReport("check-small", evidence("tor-injective", N),
                           inputs, N, data)
    return CheckReport("check-small",
                       fails("tor-injective",
                             {"degree": d, "rank": T.ranks[d],
                              "source_dim": T.source_dim(d)}),
                       inputs, N, data)


def thm_tor_check(R: QuotientRing, I: RingIdeal, N: int) -> CheckReport:
    """Compare 'Tor(mI,k) -> Tor(I,k) is zero' with 'large and small'."""
    if not check_nc(R, I).holds:
        raise NCViolation("the ideal fails I ∩ m² = mI")
    mI = I.times_maximal()
    side1 = tor_comparison(submodule_inclusion(R, mI, I), N).pattern("zero")
    large = detect_large(R, I, N)
    small = check_small(R, mI, N)
    side2_holds = large.verdict.holds and small.verdict.holds
    side2_decisive = large.verdict.status is Status.FAILS or (
        large.verdict.status is Status.HOLDS)
    S2, proj2 = quotient_ring(R, mI)
    golod = golod_map_check(R, S2, proj2, N)
    data = {"zero_maps": side1, "large": large.verdict.label,
            "large_rule": large.verdict.rule, "small": small.verdict.label,
            "golod_map": golod.verdict.label,
            "side2_decisive": side2_decisive}
    inputs = {"ideal": I.gens_text()}
    agree = all(side1) == side2_holds
    if not agree:
        return CheckReport(
            "tor-zero",
            fails("zero-tor-vs-large-and-small",
                  {"degree": _first_false(side1), "side1": all(side1),
                   "side2": side2_holds}), inputs, N, data)
    if all(side1) and not golod.holds:
        return CheckReport(
            "tor-zero",
            fails("zero-tor-implies-golod",
                  {"golod_map": golod.verdict.to_dict()}), inputs, N, data)
    data["side1"] = all(side1)
    data["side2"] = side2_holds
    return CheckReport("tor-zero", evidence("zero-tor-vs-large-and-small", N),
                       inputs, N, data)


def ci_equivalence_report(R: QuotientRing, I: RingIdeal, N: int
                          ) -> CheckReport:
    """All six complete-intersection conditions, computed independently."""
    if not ci_check(R):
        raise NotCompleteIntersection("the ring is not a complete "
                                      "intersection")
    if not check_nc(R, I).holds:
        raise NCViolation("the ideal fails I ∩ m² = mI")
    x = Instance(R, I, N)
    conds = ci_conditions(x)
    prof = definition_profile(x)
    exact = set(conds.values())
    if len(exact) != 1:
        raise InternalInconsistency(
            f"complete-intersection conditions disagree: {conds}")
    value = exact.pop()
    large_window = prof.holds
    if not prof.consistent() or (N >= 3 and large_window != value) \
            or (value and not large_window):
        raise InternalInconsistency(
            "truncated largeness disagrees with the exact conditions")
    data = {"conditions": {**conds, "large (to N)": large_window},
            "quotient": x.describe_quotient(),
            "quotient_ci_details": _plain(ci_details(x.S))}
    inputs = {"ideal": I.gens_text()}
    if value:
        return CheckReport("ci-report", holds("complete-intersection-ring"),
                           inputs, N, data)
    return CheckReport("ci-report",
                       fails("complete-intersection-ring",
                             {"all_conditions": False}),
                       inputs, N, data)


def _plain(d: dict) -> dict:
    return {k: (_plain(v) if isinstance(v, dict) else v)
            for k, v in d.items()}


def gupta_crosscheck(R: QuotientRing, I: RingIdeal, N: int) -> CheckReport:
    """Golod R and large R -> S force S Golod; check it within the window."""
    large = detect_large(R, I, N)
    gR = golod_ring_check(R, N)
    S, _ = quotient_ring(R, I)
    gS = golod_ring_check(S, N)
    data = {"large": large.verdict.label, "large_rule": large.verdict.rule,
            "ring_golod": gR.verdict.label,
            "quotient_golod": gS.verdict.label}
    inputs = {"ideal": I.gens_text()}
    decisive_large = large.verdict.status is Status.HOLDS
    if decisive_large and not gS.holds:
        # contrapositive: R itself cannot be Golod
        data["conclusion"] = "ring is not Golod"
        if gR.holds:
            return CheckReport("gupta", fails(
                "golod-transfer", {"ring_golod": True,
                                   "quotient_golod": False}),
                inputs, N, data)
    elif decisive_large and gR.holds:
        data["conclusion"] = "quotient is Golod"
    else:
        data["conclusion"] = "hypotheses not met"
    return CheckReport("gupta", evidence("golod-transfer", N), inputs, N, data)
