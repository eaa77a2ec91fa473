"""Bundled ring-spec fixtures, their documented verdicts, and random instances.

Each fixture is a ring-spec text (the same format the CLI reads from a
file).  ``EXPECTATIONS`` lists what every fixture is known to satisfy; the
``paper-examples`` command replays them.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from importlib import resources

from .criteria import detect_large, koszul_module_check
from .koszul import lemma_power_check
from .report import CheckReport, Status
from .rings import (QuotientRing, RingIdeal, check_nc, make_ideal,
                    parse_ring, quotient_ring, socle)
from .poly import parse_ring_spec
from .series import golod_map_check, golod_ring_check


def fixture_names() -> list[str]:
    files = resources.files("largehom") / "fixtures"
    return sorted(f.name[:-5] for f in files.iterdir()
                  if f.name.endswith(".ring"))


def fixture_text(name: str) -> str:
    return (resources.files("largehom") / "fixtures" / f"{name}.ring"
            ).read_text()


def load_fixture(name: str, p: int | None = None
                 ) -> tuple[QuotientRing, RingIdeal | None]:
    text = fixture_text(name)
    R = parse_ring(text, p)
    gens = parse_ring_spec(text).get("ideal")
    return R, (make_ideal(R, gens) if gens else None)


def truncated_power_ring(nvars: int, power: int, p: int = 5) -> QuotientRing:
    """k[x_1..x_n]/n^power."""
    names = ["x", "y", "z", "w"][:nvars]
    mons = [m for m in itertools.product(range(power + 1), repeat=nvars)
            if sum(m) == power]
    rels = ["*".join(f"{v}^{e}" for v, e in zip(names, m) if e) for m in mons]
    return parse_ring(f"p = {p}\nvars = {', '.join(names)}\n"
                      f"relations = {', '.join(rels)}")


def generic_form(R: QuotientRing) -> str:
    """A fixed 1-form with all coefficients nonzero (1, 2, 3, ...)."""
    return " + ".join(f"{(j % (R.p - 1)) + 1}*{v}"
                      for j, v in enumerate(R.vars))


def subset_plus_form_ideals(R: QuotientRing):
    """Ideals generated by a subset of the variables plus one generic 1-form."""
    form = generic_form(R)
    for k in range(R.nvars + 1):
        for sub in itertools.combinations(R.vars, k):
            yield list(sub) + [form]


# ----------------------------------------------------------------------------
# random monomial complete intersections with NC ideals


def random_ci_instance(rng: random.Random, primes=(2, 3, 5), max_vars=3,
                       max_exp=3) -> tuple[QuotientRing, RingIdeal, dict]:
    """k[x_1..x_n]/(x_i^{a_i}) with a random homogeneous ideal satisfying NC."""
    p = rng.choice(primes)
    n = rng.randint(1, max_vars)
    a = [rng.randint(2, max_exp) for _ in range(n)]
    names = ["x", "y", "z"][:n]
    R = parse_ring(f"p = {p}\nvars = {', '.join(names)}\nrelations = "
                   + ", ".join(f"{v}^{e}" for v, e in zip(names, a)))
    while True:
        gens = [_random_form(rng, R, a, rng.choice((1, 1, 1, 2)))
                for _ in range(rng.randint(0, 2))]
        gens = [g for g in gens if g] or ["0"]
        I = make_ideal(R, gens)
        if check_nc(R, I).holds:
            return R, I, {"p": p, "exponents": a, "ideal": gens}


def _random_form(rng: random.Random, R: QuotientRing, a, d: int) -> str:
    n = R.nvars
    mons = [m for m in itertools.product(range(d + 1), repeat=n)
            if sum(m) == d and all(m[i] < a[i] for i in range(n))]
    if not mons:
        return ""
    # full support half the time, so that non-split linear forms show up
    k = len(mons) if rng.random() < 0.5 else rng.randint(1, len(mons))
    terms = []
    for m in rng.sample(mons, k):
        c = rng.randint(1, R.p - 1)
        mono = "*".join(f"{v}^{e}" for v, e in zip(R.vars, m) if e)
        terms.append(f"{c}*{mono}")
    return " + ".join(terms)


# ----------------------------------------------------------------------------
# documented verdicts


@dataclass
class Expectation:
    fixture: str
    check: str
    status: Status
    rule: str | None = None


def _mI_map(R, I):
    return quotient_ring(R, I.times_maximal())


def _run(check: str, R: QuotientRing, I: RingIdeal, N: int) -> CheckReport:
    if check == "check-large":
        return detect_large(R, I, N)
    if check == "check-golod-ring":
        return golod_ring_check(R, N)
    if check == "golod-map-to-mI":
        S, proj = _mI_map(R, I)
        return golod_map_check(R, S, proj, N)
    if check == "golod-map-to-socle-quotient":
        S, proj = quotient_ring(R, socle(R))
        return golod_map_check(R, S, proj, N)
    if check == "koszul-module":
        return koszul_module_check(R, I, N)
    if check == "power-representatives":
        return lemma_power_check(R, I)
    raise ValueError(f"unknown check {check!r}")


EXPECTATIONS = [
    Expectation("e2", "check-large", Status.FAILS,
                "complete-intersection-ring"),
    Expectation("e2", "golod-map-to-mI", Status.EVIDENCE),
    Expectation("nongolod", "check-large", Status.HOLDS,
                "quotient-complete-intersection"),
    Expectation("nongolod", "check-golod-ring", Status.FAILS),
    Expectation("hypersurface_quotient", "check-large", Status.HOLDS,
                "quotient-complete-intersection"),
    Expectation("split", "check-large", Status.HOLDS, "maximal-ideal-splits"),
    Expectation("gorenstein", "koszul-module", Status.HOLDS, "koszul-module"),
    Expectation("gorenstein", "check-large", Status.HOLDS),
    Expectation("gorenstein", "golod-map-to-socle-quotient", Status.EVIDENCE),
    Expectation("cube", "check-large", Status.HOLDS,
                "truncated-power-of-maximal"),
    Expectation("cube", "check-golod-ring", Status.EVIDENCE),
    Expectation("square", "check-large", Status.HOLDS),
    Expectation("square", "check-golod-ring", Status.FAILS),
    Expectation("cubic_power", "check-large", Status.HOLDS,
                "truncated-power-of-maximal"),
    Expectation("cubic_power", "power-representatives", Status.HOLDS),
]


def paper_examples(N: int = 6) -> list[dict]:
    """Replay every expectation; one row per check with a pass flag."""
    rows = []
    loaded = {}
    for e in EXPECTATIONS:
        if e.fixture not in loaded:
            loaded[e.fixture] = load_fixture(e.fixture)
        R, I = loaded[e.fixture]
        rep = _run(e.check, R, I if I is not None else R.zero_ideal(), N)
        ok = rep.status is e.status and (e.rule is None
                                         or rep.verdict.rule == e.rule)
        rows.append({"fixture": e.fixture, "check": e.check,
                     "expected": e.status.value, "expected_rule": e.rule,
                     "got": rep.verdict.label, "rule": rep.verdict.rule,
                     "ok": ok})
    return rows

