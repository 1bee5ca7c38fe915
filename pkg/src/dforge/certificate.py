"""JSON proof certificate: model, verdicts, emit and parse."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .realkit import VerifiedReal, decimal_bounds
from .seqkit import SequenceKind, SolutionTuple

MATCHES = "matches"
CONSERVATIVE = "conservative"
DISCREPANCY = "discrepancy"

DIGITS = 30


@dataclass(frozen=True)
class RealRecord:
    """Outward-rounded decimal enclosure of a verified real."""

    lo: str
    hi: str
    bits: int

    @classmethod
    def of(cls, x: VerifiedReal, digits: int = DIGITS) -> RealRecord:
        lo, hi = decimal_bounds(x, digits)
        return cls(lo, hi, x.bits)


Value = Union[str, RealRecord]


@dataclass
class Stage:
    name: str
    paper_tag: str
    computed_value: Value
    paper_value: Optional[str]
    verdict: str
    note: Optional[str] = None
    carried: Optional[str] = None


@dataclass
class ProofCertificate:
    equation: str
    stages: list[Stage] = field(default_factory=list)
    reduction_tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    solutions: list[list[str]] = field(default_factory=list)
    precision_report: dict[str, int] = field(default_factory=dict)
    toolkit_version: str = ""

    @property
    def kind(self) -> SequenceKind:
        return SequenceKind(self.equation)

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def has_discrepancy(self) -> bool:
        return any(s.verdict == DISCREPANCY for s in self.stages)

    def solution_tuples(self) -> list[SolutionTuple]:
        return [SolutionTuple(*(int(v) for v in row)) for row in self.solutions]

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ProofCertificate:
        stages = []
        for s in data["stages"]:
            s = dict(s)
            v = s["computed_value"]
            if isinstance(v, dict):
                s["computed_value"] = RealRecord(**v)
            stages.append(Stage(**s))
        return cls(
            equation=data["equation"],
            stages=stages,
            reduction_tables={k: [dict(r) for r in rows] for k, rows in data["reduction_tables"].items()},
            solutions=[list(row) for row in data["solutions"]],
            precision_report=dict(data["precision_report"]),
            toolkit_version=data["toolkit_version"],
        )


def emit(cert: ProofCertificate) -> str:
    return json.dumps(cert.to_dict(), indent=2, ensure_ascii=False) + "\n"


def parse(text: str) -> ProofCertificate:
    return ProofCertificate.from_dict(json.loads(text))


def judge(computed: Fraction, published: Fraction, direction: str, rel_tol: Fraction) -> str:
    """Verdict of a computed value against a published one.

    For bounds, "conservative" means the published bound is looser than the
    certified one (so it is implied); "discrepancy" means the published claim
    is stronger than what could be certified, beyond the tolerance.
    """
    if direction == "equal":
        return MATCHES if computed == published else DISCREPANCY
    if abs(computed - published) <= rel_tol * abs(published):
        return MATCHES
    stronger_published = computed > published if direction == "upper" else computed < published
    return DISCREPANCY if stronger_published else CONSERVATIVE
