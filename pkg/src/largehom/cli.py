"""Command-line front end.

    largehom check-large --ring e2.ring -N 6 --format json

Rings come from ring-spec files (or a bundled fixture via ``--fixture``).
JSON output is canonical: sorted keys, no timestamps, so repeated runs are
byte-identical.  Exit codes: 0 holds or evidence, 1 fails, 2 error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import corpus
from .criteria import (check_small, ci_equivalence_report, detect_large,
                       koszul_module_check, thm_tor_check)
from .errors import LargehomError, ParseError
from .koszul import (homology_product, ideal_koszul_homology,
                     ring_koszul_homology)
from .modules import (cyclic_module, ideal_module, random_graded_module,
                      regular_module, residue_field)
from .parallel import set_threads
from .poly import parse_ring_spec
from .report import CheckReport, Status, dumps
from .resolve import betti_table
from .rings import check_nc, make_ideal, parse_ring, quotient_ring
from .series import (deviations_from_poincare, golod_map_check,
                     golod_ring_check, poincare_series,
                     product_from_deviations, residue_poincare)

COMMANDS = ("ring-info", "koszul", "betti", "poincare", "deviations",
            "check-nc", "check-large", "check-small", "check-golod-ring",
            "check-golod-map", "ci-report", "tor-zero", "koszul-module",
            "paper-examples")

# commands whose answer is a computation rather than a verdict
_INFO = {"ring-info", "koszul", "betti", "poincare", "deviations"}
# commands that need an ideal
_NEEDS_IDEAL = {"check-nc", "check-large", "check-small", "check-golod-map",
                "ci-report", "tor-zero", "koszul-module"}


class UsageError(Exception):
    name = "UsageError"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="largehom",
        description="Large, small and Golod homomorphisms of Artinian rings.")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--ring", type=Path, help="ring-spec file")
    src.add_argument("--fixture", help="bundled ring-spec fixture by name")
    ap.add_argument("--ideal", help="ideal generators; overrides the file")
    ap.add_argument("-N", type=int, default=None,
                    help="truncation degree (default: file value or 6)")
    ap.add_argument("--prime", type=int, help="override the field size")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: all cores)")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for --module random")
    ap.add_argument("--module", default="k",
                    choices=("k", "R", "quotient", "ideal", "random"),
                    help="module for betti/poincare (default k)")
    ap.add_argument("--golod", action="store_true",
                    help="assert that the ring is Golod (check-large)")
    return ap


class _Config:
    def __init__(self, args):
        self.args = args
        self.command = args.command
        text = self._ring_text()
        self.fields = parse_ring_spec(text) if text is not None else None
        N = args.N
        if N is None:
            N = (self.fields or {}).get("truncation", 6)
        if N < 1:
            raise UsageError("-N must be at least 1")
        self.N = N
        self.R = parse_ring(text, args.prime) if text is not None else None
        gens = None
        if args.ideal is not None:
            gens = args.ideal
        elif self.fields and "ideal" in self.fields:
            gens = self.fields["ideal"]
        self.I = make_ideal(self.R, gens) if (gens is not None
                                              and self.R) else None

    def _ring_text(self):
        a = self.args
        if a.ring is not None:
            try:
                return a.ring.read_text()
            except OSError as e:
                raise UsageError(f"cannot read {a.ring}: {e.strerror}")
        if a.fixture is not None:
            if a.fixture not in corpus.fixture_names():
                raise UsageError(f"unknown fixture {a.fixture!r}; choose "
                                 f"from {corpus.fixture_names()}")
            return corpus.fixture_text(a.fixture)
        return None

    def require(self):
        if self.command == "paper-examples":
            return
        if self.R is None:
            raise UsageError(f"{self.command} needs --ring or --fixture")
        if self.command in _NEEDS_IDEAL and self.I is None:
            raise UsageError(f"{self.command} needs an ideal (--ideal or an "
                             "'ideal =' line)")

    def inputs(self) -> dict:
        out = {"N": self.N}
        if self.R is not None:
            out.update(p=self.R.p, vars=self.R.vars,
                       relations=self.R.relations_text())
        if self.I is not None:
            out["ideal"] = self.I.gens_text()
        return out


def _module(cfg: _Config):
    R, which = cfg.R, cfg.args.module
    if which == "k":
        return residue_field(R)
    if which == "R":
        return regular_module(R)
    if which == "random":
        return random_graded_module(R, np.random.default_rng(cfg.args.seed))
    if cfg.I is None:
        raise UsageError(f"--module {which} needs an ideal")
    if which == "quotient":
        return cyclic_module(R, cfg.I)[0]
    return ideal_module(R, cfg.I)[0]


def _info(cfg: _Config) -> dict:
    R, N, cmd = cfg.R, cfg.N, cfg.command
    if cmd == "ring-info":
        data = R.describe()
        if cfg.I is not None:
            t = cfg.I.trimmed()
            data["ideal"] = {"generators": cfg.I.gens_text(),
                             "minimal_generators": t.gens_text(),
                             "dim": cfg.I.dim}
        return data
    if cmd == "koszul":
        H = ring_koszul_homology(R)
        data = {"ring": {"dims": H.dims,
                         "H1_squared": (homology_product(H, 1, 1).dim
                                        if H.complex.length >= 1 else 0)}}
        if cfg.I is not None:
            data["ideal"] = {"dims": ideal_koszul_homology(R, cfg.I).dims}
        return data
    if cmd == "betti":
        M = _module(cfg)
        table = betti_table(M, N)
        return {"module": cfg.args.module, "totals": table.totals,
                "table": table.rows(), "text": table.to_text()}
    if cmd == "poincare":
        return {"module": cfg.args.module,
                "coefficients": list(poincare_series(_module(cfg), N).coeffs)}
    if cmd == "deviations":
        P = residue_poincare(R, N)
        eps = deviations_from_poincare(P, N)
        back = product_from_deviations(eps, N)
        return {"poincare": list(P.coeffs), "deviations": eps,
                "round_trip": back == P}
    raise AssertionError(cmd)


def _check(cfg: _Config) -> CheckReport:
    R, I, N, cmd = cfg.R, cfg.I, cfg.N, cfg.command
    if cmd == "check-nc":
        return check_nc(R, I)
    if cmd == "check-large":
        return detect_large(R, I, N, golod_asserted=cfg.args.golod)
    if cmd == "check-small":
        return check_small(R, I, N)
    if cmd == "check-golod-ring":
        return golod_ring_check(R, N)
    if cmd == "check-golod-map":
        S, proj = quotient_ring(R, I)
        return golod_map_check(R, S, proj, N)
    if cmd == "ci-report":
        return ci_equivalence_report(R, I, N)
    if cmd == "tor-zero":
        return thm_tor_check(R, I, N)
    if cmd == "koszul-module":
        return koszul_module_check(R, I, N)
    raise AssertionError(cmd)


def run(argv=None) -> tuple[int, str]:
    """Parse, dispatch and render; returns (exit code, output text)."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), ""
    fmt = args.format
    try:
        set_threads(args.threads)
        cfg = _Config(args)
        cfg.require()
        if cfg.command == "paper-examples":
            rows = corpus.paper_examples(cfg.N)
            ok = all(r["ok"] for r in rows)
            out = {"command": cfg.command, "inputs": {"N": cfg.N},
                   "data": {"examples": rows, "all_reproduced": ok}}
            return (0 if ok else 1), _render(out, fmt)
        if cfg.command in _INFO:
            out = {"command": cfg.command, "inputs": cfg.inputs(),
                   "data": _info(cfg)}
            return 0, _render(out, fmt)
        rep = _check(cfg)
        out = rep.to_dict()
        out["inputs"] = {**cfg.inputs(), **out["inputs"]}
        code = 1 if rep.status is Status.FAILS else 0
        return code, _render(out, fmt)
    except (UsageError, ParseError, LargehomError) as e:
        err = {"error": {"name": getattr(e, "name", type(e).__name__),
                         "message": str(e)}}
        if fmt == "text":
            return 2, f"error: {err['error']['name']}: {e}"
        return 2, dumps(err)


def _render(out: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(out)
    lines = [f"command: {out['command']}"]
    for k, v in sorted(out.get("inputs", {}).items()):
        lines.append(f"  {k}: {_short(v)}")
    v = out.get("verdict")
    if v is not None:
        lines.append(f"verdict: {v['status']} [{v['rule']}]")
        if "witness" in v:
            lines.append(f"  witness: {dumps(v['witness'])}")
        for f in v.get("flags", []):
            lines.append(f"  flag: {f}")
        for t in v.get("trace", []):
            if "rule" in t and "outcome" in t:
                lines.append(f"  - {t['rule']}: {t['outcome']}")
    data = out.get("data", {})
    if "examples" in data:
        for r in data["examples"]:
            mark = "ok  " if r["ok"] else "FAIL"
            lines.append(f"{mark} {r['fixture']:<22} {r['check']:<28} "
                         f"{r['got']} [{r['rule']}]")
        return "\n".join(lines)
    for k, val in sorted(data.items()):
        if k == "text":
            lines.append(val)
        else:
            lines.append(f"{k}: {_short(val)}")
    return "\n".join(lines)


def _short(v) -> str:
    return v if isinstance(v, str) else dumps(v)


def main(argv=None) -> int:
    code, text = run(argv)
    if text:
        stream = sys.stderr if code == 2 and not text.startswith("{") \
            else sys.stdout
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
