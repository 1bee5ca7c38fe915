"""End-to-end bound pipeline for one equation, producing a ProofCertificate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, TypeVar

from . import __version__
from . import bakerkit as bk
from . import redkit
from .certificate import (
    DISCREPANCY,
    MATCHES,
    ProofCertificate,
    RealRecord,
    Stage,
    judge,
)
from .published import EXPECTED_SOLUTIONS, FINAL_BOXES, REFERENCES
from .realkit import DEFAULT_BITS, VerifiedReal, with_precision_retry
from .searchkit import SearchBox, naive_search, search
from .seqkit import SequenceKind, SolutionTuple, term

STAGES = ("all", "bounds", "reduce", "search")
T = TypeVar("T")


@dataclass(frozen=True)
class PipelineConfig:
    bits: int = DEFAULT_BITS
    stage: str = "all"
    threads: int = 1

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}")
        if self.bits < 16:
            raise ValueError("precision must be at least 16 bits")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


class StageFailure(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


def format_solutions(solutions: list[SolutionTuple]) -> str:
    return "[" + ",".join(f"({s.r},{s.m},{s.n},{s.k})" for s in solutions) + "]"


class _Run:
    def __init__(self, kind: SequenceKind, config: PipelineConfig):
        self.kind = kind
        self.config = config
        self.refs = REFERENCES[kind]
        self.cert = ProofCertificate(kind.value, toolkit_version=__version__)

    def step(self, name: str, fn: Callable[[], T]) -> T:
        try:
            return fn()
        except StageFailure:
            raise
        except Exception as exc:  # noqa: BLE001 - every failure is reported with its stage
            raise StageFailure(name, exc) from exc

    def record(
        self,
        name: str,
        computed: object,
        bits: Optional[int] = None,
        note: Optional[str] = None,
        carried: Optional[int] = None,
    ) -> Stage:
        ref = self.refs[name]
        tol = Fraction(ref.rel_tol)
        if isinstance(computed, bool):
            value: object = "certified" if computed else "failed"
            verdict = MATCHES if computed else DISCREPANCY
        elif isinstance(computed, VerifiedReal):
            value = RealRecord.of(computed)
            probe = computed.hi if ref.direction == "upper" else computed.lo
            verdict = judge(probe, Fraction(ref.value), ref.direction, tol) if ref.value else MATCHES
        elif isinstance(computed, int):
            value = str(computed)
            verdict = judge(Fraction(computed), Fraction(ref.value), ref.direction, tol) if ref.value else MATCHES
        else:
            value = str(computed)
            verdict = MATCHES if ref.value is None or value == ref.value else DISCREPANCY
        stage = Stage(name, ref.tag, value, ref.value, verdict, note,
                      None if carried is None else str(carried))
        self.cert.stages.append(stage)
        if bits is not None:
            self.cert.precision_report[name] = bits
        return stage

    def adopt(self, name: str, ours: int) -> int:
        """Carry forward the looser of our bound and the published one.

        Both are valid upper bounds when the stage verdict is not a
        discrepancy, and using the published one keeps downstream parameters
        identical to the published computation.
        """
        ref = self.refs[name].value
        if ref is None:
            return ours
        return max(ours, math.floor(Fraction(ref)))


def _r_floor(kind: SequenceKind) -> int:
    smallest = term(kind, 2) ** 3 + term(kind, 2) ** 2
    r = 0
    # L_0 = 2 exceeds L_1, so start the scan after the out-of-order term
    while term(kind, r) < smallest or (kind is SequenceKind.LUCAS and r < 2):
        r += 1
    return r


def _common_prelude(run: _Run) -> None:
    kind, bits = run.kind, run.config.bits
    run.record("r_floor", run.step("r_floor", lambda: _r_floor(kind)))
    ok, used = run.step("slack", lambda: with_precision_retry(lambda b: bk.certify_slack(kind, b), bits))
    run.record("slack", ok, bits=used)
    guard = bk.nonvanishing_guard(kind)
    run.record("nonvanishing", "cited", note=guard.argument)


def _matveev_stages(run: _Run) -> tuple[int, int, int, int]:
    kind, bits = run.kind, run.config.bits
    K = run.step("k_coefficient", lambda: bk.k_coefficient(kind, bits))
    run.record("k_coefficient", K, bits=bits)
    r_ours = run.step("r_bound", lambda: bk.solve_r_bound(kind, bits))
    r = run.adopt("r_bound", r_ours)
    run.record("r_bound", r_ours, bits=bits, carried=r,
               note="certified bisection on r < RHS(r); the looser value is carried")
    k_ours = run.step("k_bound", lambda: bk.strict_to_max(bk.derive_k_bound(kind, r, bits)))
    k = run.adopt("k_bound", k_ours)
    run.record("k_bound", k_ours, bits=bits, carried=k, note=f"evaluated at r = {r}")
    m, n = run.step("m_bound", lambda: bk.mn_bounds(kind, r, bits))
    run.record("m_bound", m, bits=bits, carried=m, note=f"from r = {r}")
    run.record("n_bound", n, bits=bits, carried=n, note=f"from r = {r}")
    return r, k, m, n


def _search_stages(run: _Run, box: SearchBox) -> None:
    kind, threads = run.kind, run.config.threads
    found = run.step("search", lambda: search(box, threads=threads))
    note = (f"m in [2,{box.m_range[1]}], n in [2,{box.n_range[1]}], "
            f"k in [1,{box.k_range[1]}], r_cap {box.r_cap}")
    run.record("search", format_solutions(found), note=note)
    replay = run.step("search_replay", lambda: naive_search(box))
    run.record("search_replay", replay == found,
               note=f"independent loop found {format_solutions(replay)}")
    guard = run.step("nonvanishing_check", lambda: bk.nonvanishing_guard(
        kind, [*box.triples(), *(s.as_tuple() for s in found)]))
    admissible = all(bk.t_admissible(kind, s.r, s.n, s.k) and s.holds(kind) for s in found)
    run.record("nonvanishing_check", guard.ok and admissible,
               note=f"{guard.checked} tuples checked, {len(guard.fired)} fired")
    run.cert.solutions = [[str(v) for v in s.as_tuple()] for s in found]


def _lucas(run: _Run) -> None:
    kind, cfg = run.kind, run.config
    _common_prelude(run)
    box = None
    if cfg.stage in ("all", "bounds", "reduce"):
        r, k, m, n = _matveev_stages(run)
    if cfg.stage in ("all", "reduce"):
        ok, used = run.step("legendre_applicability", lambda: with_precision_retry(
            lambda b: bk.legendre_applicable(n, 9, b), cfg.bits))
        run.record("legendre_applicability", ok, bits=used,
                   note=f"3^k > (2.005/log alpha)({n}+k) for k >= 9")
        red = run.step("legendre_k_bound", lambda: bk.legendre_reduce_lucas(
            m, n, k, cfg.bits, cfg.threads))
        run.record("legendre_k_bound", red.k_bound, bits=max(r.bits for r in red.rows),
                   note=f"S = {red.S}; the (n_max + k) = ({n} + k) factor is used "
                        "where the printed inequality shows (28 + k)")
        run.cert.reduction_tables["legendre"] = [
            {"m": row.m, "N": row.N, "q_N": str(row.q_N), "J": str(row.J),
             "k0": row.k0, "bits": row.bits}
            for row in red.rows
        ]
        k1 = red.k_bound
        r1 = bk.r_upper_exclusive(kind, m, n, k1) - 1
        run.record("r_bound_reduced", r1)
        m1, n1 = run.step("m_bound_reduced", lambda: bk.mn_bounds(kind, r1, cfg.bits))
        run.record("m_bound_reduced", m1, bits=cfg.bits)
        run.record("n_bound_reduced", n1, bits=cfg.bits)
        box = SearchBox.bounded(kind, m1, n1, k1)
        run.record("r_cap_final", box.r_cap)
    if cfg.stage == "search":
        box = SearchBox.bounded(kind, *FINAL_BOXES[kind])
    if cfg.stage in ("all", "search"):
        _search_stages(run, box)


def _pass_table(p: redkit.PassResult) -> list[dict]:
    rows = []
    for row in p.rows:
        lo, hi = RealRecord.of(row.epsilon).lo, RealRecord.of(row.epsilon).hi
        rows.append({"m": row.m, "t": row.t, "q": str(row.q), "epsilon_lo": lo,
                     "epsilon_hi": hi, "k_bound": row.k_bound, "bits": row.bits})
    return rows


def _pell_pass_stages(run: _Run, index: int, m: int, n: int, k: int) -> int:
    cfg = run.config
    M = n + k
    p = run.step(f"reduction_{index}_q", lambda: redkit.pell_pass(m, M, cfg.bits, cfg.threads))
    bits = max(r.bits for r in p.rows)
    run.record(f"reduction_{index}_q", p.max_row.q, bits=bits,
               note=f"M = {M}; largest q at m = {p.max_row.m}, convergent index {p.max_row.t}")
    min_row = min(p.rows, key=lambda r: r.epsilon.lo)
    run.record(f"reduction_{index}_epsilon", min_row.epsilon, bits=bits,
               note=f"attained at m = {min_row.m}")
    run.record(f"reduction_{index}_k_bound", p.k_bound, bits=bits,
               note=f"log(C max q / min eps) / log 2; per-m maximum {p.per_m_k_bound}")
    run.cert.reduction_tables[f"reduction_{index}"] = _pass_table(p)
    return p.k_bound


def _pell(run: _Run) -> None:
    kind, cfg = run.kind, run.config
    _common_prelude(run)
    box = None
    if cfg.stage in ("all", "bounds", "reduce"):
        r, k, m, n = _matveev_stages(run)
    if cfg.stage in ("all", "reduce"):
        k1 = _pell_pass_stages(run, 1, m, n, k)
        r1 = bk.r_upper_exclusive(kind, m, n, k1) - 1
        run.record("r_bound_reduced_1", r1)
        m1, n1 = run.step("m_bound_reduced_1", lambda: bk.mn_bounds(kind, r1, cfg.bits))
        run.record("m_bound_reduced_1", m1, bits=cfg.bits)
        run.record("n_bound_reduced_1", n1, bits=cfg.bits)
        k2 = _pell_pass_stages(run, 2, m1, n1, k1)
        box = SearchBox.bounded(kind, m1, n1, k2)
        run.record("r_bound_reduced_2", box.r_cap,
                   note=f"3 + ({m1} - 1)({n1} + {k2}) - 1")
    if cfg.stage == "search":
        box = SearchBox.bounded(kind, *FINAL_BOXES[kind])
    if cfg.stage in ("all", "search"):
        _search_stages(run, box)


def run_pipeline(kind: SequenceKind, config: PipelineConfig | None = None) -> ProofCertificate:
    """Run every stage selected by ``config`` and return the certificate.

    Raises StageFailure naming the stage that could not complete.
    """
    run = _Run(kind, config or PipelineConfig())
    if kind is SequenceKind.LUCAS:
        _lucas(run)
    else:
        _pell(run)
    return run.cert


def certificate_ok(cert: ProofCertificate) -> bool:
    """No discrepancy, and the solution list (when searched) is the expected one."""
    if cert.has_discrepancy():
        return False
    searched = any(s.name == "search" for s in cert.stages)
    if searched:
        return [s.as_tuple() for s in cert.solution_tuples()] == EXPECTED_SOLUTIONS[cert.kind]
    return True

