"""Three-valued verdicts and serializable check reports."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class Status(enum.Enum):
    HOLDS = "HoldsDecisive"
    FAILS = "FailsDecisive"
    EVIDENCE = "EvidenceUpTo"
    INAPPLICABLE = "Inapplicable"


@dataclass
class Verdict:
    status: Status
    rule: str
    witness: dict | None = None
    trace: list[dict] = field(default_factory=list)
    truncation: int | None = None
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status is Status.FAILS and self.witness is None:
            raise ValueError("a failing verdict needs a witness")
        if self.status is Status.EVIDENCE and self.truncation is None:
            raise ValueError("evidence verdicts carry their truncation")

    @property
    def holds(self) -> bool:
        """True for decisive holds and for unrefuted evidence."""
        return self.status in (Status.HOLDS, Status.EVIDENCE)

    @property
    def decisive(self) -> bool:
        return self.status in (Status.HOLDS, Status.FAILS)

    @property
    def label(self) -> str:
        if self.status is Status.EVIDENCE:
            return f"EvidenceUpTo({self.truncation})"
        return self.status.value

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"status": self.label, "rule": self.rule,
                               "trace": [jsonable(t) for t in self.trace]}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def holds(rule: str, **kw) -> Verdict:
    return Verdict(Status.HOLDS, rule, **kw)


def fails(rule: str, witness: dict, **kw) -> Verdict:
    return Verdict(Status.FAILS, rule, witness=witness, **kw)


def evidence(rule: str, n: int, **kw) -> Verdict:
    return Verdict(Status.EVIDENCE, rule, truncation=n, **kw)


def inapplicable(rule: str, **kw) -> Verdict:
    return Verdict(Status.INAPPLICABLE, rule, **kw)


@dataclass
class CheckReport:
    command: str
    verdict: Verdict
    inputs: dict = field(default_factory=dict)
    truncation: int | None = None
    data: dict = field(default_factory=dict)
    # wall-clock seconds per stage; never serialized
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def status(self) -> Status:
        return self.verdict.status

    @property
    def holds(self) -> bool:
        return self.verdict.holds

    def to_dict(self) -> dict:
        inputs = dict(self.inputs)
        if self.truncation is not None:
            inputs.setdefault("N", self.truncation)
        return {"command": self.command, "inputs": jsonable(inputs),
                "verdict": self.verdict.to_dict(), "data": jsonable(self.data)}

    def to_json(self) -> str:
        return dumps(self.to_dict())


def jsonable(obj):
    """Convert numpy scalars/arrays and nested containers to plain JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Status):
        return obj.value
    if isinstance(obj, Verdict):
        return obj.to_dict()
    if isinstance(obj, CheckReport):
        return obj.to_dict()
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))
