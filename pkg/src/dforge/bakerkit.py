"""Heights, the Matveev lower bound, and the bound-propagation chains.

Everything here produces *upper* bounds, so all real quantities are carried
as enclosures and decisions use the pessimistic endpoint.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import realkit as rk
from .cfkit import LegendreGate, expand_until
from .realkit import (
    DEFAULT_BITS,
    PrecisionError,
    VerifiedReal,
    ver_log,
    ver_max,
    ver_sqrt,
    with_precision_retry,
)
from .seqkit import SequenceKind, is_member, lucas, term

MATVEEV_CONSTANT = Fraction(14, 10)
CLAMP = Fraction(16, 100)
DEGREE = 2

# multiplicative slack absorbing the conjugate term |beta|^r, resp. |psi|^r/(2 sqrt 2)
SLACK = {
    SequenceKind.LUCAS: Fraction("1.0025"),
    SequenceKind.PELL: Fraction("1.00275"),
}
# smallest admissible r, and the equation's shift in r < c + (m +- 1)(n + k)
R_FLOOR = {SequenceKind.LUCAS: 8, SequenceKind.PELL: 4}


class HeightLabel(enum.Enum):
    ALPHA = "alpha"
    PHI = "phi"
    TWO_SQRT_TWO = "2sqrt2"
    LUCAS_M = "L_m"
    PELL_M = "P_m"


@dataclass(frozen=True)
class HeightEntry:
    label: HeightLabel
    height: VerifiedReal
    log_abs: VerifiedReal
    m: Optional[int] = None


def height_entry(
    label: HeightLabel, m: Optional[int] = None, bits: int = DEFAULT_BITS
) -> HeightEntry:
    """Logarithmic height and |log| of one of the five numbers in use.

    alpha, phi: degree 2 with the conjugate inside the unit disc, so the
    height is half the log.  2*sqrt(2): root of x^2 - 8, both conjugates
    have modulus 2*sqrt(2).  Rational integers have height log|x|.
    """
    half = VerifiedReal.exact(Fraction(1, 2), bits)
    if label is HeightLabel.ALPHA:
        la = rk.log_alpha(bits)
        return HeightEntry(label, la * half, la)
    if label is HeightLabel.PHI:
        lp = rk.log_phi(bits)
        return HeightEntry(label, lp * half, lp)
    if label is HeightLabel.TWO_SQRT_TWO:
        l = rk.log_two_sqrt_two(bits)
        return HeightEntry(label, l, l)
    if m is None or m < 2:
        raise ValueError("L_m / P_m entries need m >= 2")
    kind = SequenceKind.LUCAS if label is HeightLabel.LUCAS_M else SequenceKind.PELL
    l = ver_log(term(kind, m), bits)
    return HeightEntry(label, l, l, m)


def clamp_A(entry: HeightEntry, degree: int = DEGREE) -> VerifiedReal:
    """max(D h, |log|, 0.16)."""
    bits = entry.height.bits
    A = ver_max(entry.height * degree, entry.log_abs.abs())
    return ver_max(A, VerifiedReal.enclose(CLAMP, bits))


@dataclass(frozen=True)
class MatveevInstance:
    num_logs: int
    degree: int
    A: tuple[VerifiedReal, ...]
    T: Optional[VerifiedReal] = None

    def __post_init__(self) -> None:
        if len(self.A) != self.num_logs:
            raise ValueError("need one A_j per logarithm")


def matveev_coefficient(inst: MatveevInstance) -> VerifiedReal:
    """1.4 * 30^(n+3) * n^4.5 * D^2 (1 + log D) * A_1 ... A_n.

    This is the factor multiplying (1 + log T) in the exponent of the
    lower bound.
    """
    n, D = inst.num_logs, inst.degree
    bits = min(a.bits for a in inst.A)
    c = VerifiedReal.enclose(MATVEEV_CONSTANT, bits)
    c = c * (30 ** (n + 3)) * (n ** 4) * ver_sqrt(n, bits) * (D * D)
    c = c * (ver_log(D, bits) + 1)
    for a in inst.A:
        c = c * a
    return c


def matveev_instance(kind: SequenceKind, m: int, bits: int = DEFAULT_BITS) -> MatveevInstance:
    if kind is SequenceKind.LUCAS:
        entries = [height_entry(HeightLabel.ALPHA, bits=bits),
                   height_entry(HeightLabel.LUCAS_M, m, bits)]
    else:
        entries = [height_entry(HeightLabel.TWO_SQRT_TWO, bits=bits),
                   height_entry(HeightLabel.PHI, bits=bits),
                   height_entry(HeightLabel.PELL_M, m, bits)]
    return MatveevInstance(len(entries), DEGREE, tuple(clamp_A(e) for e in entries))


def k_coefficient(kind: SequenceKind, bits: int = DEFAULT_BITS) -> VerifiedReal:
    """Coefficient K with k < K (1 + log T) + log(slack) / log W_m.

    The last A_j equals 2 log W_m for every m >= 2, so dividing the Matveev
    coefficient by log W_m gives the same K for all m; it is evaluated at
    m = 2 after certifying that the clamp is inactive there.
    """
    inst = matveev_instance(kind, 2, bits)
    log_w = ver_log(term(kind, 2), bits)
    last = inst.A[-1]
    floor = ver_max(log_w, VerifiedReal.enclose(CLAMP, bits))
    if not rk.certainly_less(floor, log_w * 2) or not last.contains_interval(log_w * 2):
        raise PrecisionError("clamp on log W_m not inactive")
    return matveev_coefficient(inst) / log_w


def derive_k_bound(kind: SequenceKind, r_bound: int | Fraction, bits: int = DEFAULT_BITS) -> VerifiedReal:
    """Upper bound on k given r <= r_bound, with T = 2 r_bound."""
    K = k_coefficient(kind, bits)
    T = VerifiedReal.enclose(2 * Fraction(r_bound), bits)
    tail = ver_log(VerifiedReal.enclose(SLACK[kind], bits), bits) / ver_log(term(kind, 2), bits)
    return K * (ver_log(T, bits) + 1) + tail


def strict_to_max(bound: VerifiedReal) -> int:
    """For an integer x < B with B enclosed by ``bound``: x <= ceil(hi) - 1."""
    return bound.upper_ceil() - 1


# -- r from (m, n, k) ---------------------------------------------------------

def r_upper_exclusive(kind: SequenceKind, m: int, n: int, k: int) -> int:
    """r < value, from comparing the sizes of both sides."""
    if kind is SequenceKind.LUCAS:
        return 2 + (m + 1) * (n + k)
    return 3 + (m - 1) * (n + k)


def r_rhs(kind: SequenceKind, r: int, bits: int = DEFAULT_BITS) -> VerifiedReal:
    """Right-hand side of r < RHS(r) after inserting the k- and m,n-bounds."""
    lr = ver_log(r, bits)
    k_bound = derive_k_bound(kind, r, bits)
    if kind is SequenceKind.LUCAS:
        la = rk.log_alpha(bits)
        m_plus_1 = lr / la + 2
        n_bound = (lr - rk.log_two(bits)) / la + 1
        return (n_bound + k_bound) * m_plus_1 + 2
    lp = rk.log_phi(bits)
    m_minus_1 = lr / lp + 1
    n_bound = lr / rk.log_two(bits)
    return (n_bound + k_bound) * m_minus_1 + 3


class BisectionError(RuntimeError):
    pass


def solve_r_bound(kind: SequenceKind, bits: int = DEFAULT_BITS, limit: int = 10 ** 60) -> int:
    """Largest r that can satisfy r < RHS(r).

    r - RHS(r) is convex for log r >= 1 (RHS is a quadratic in log r with
    positive coefficients), so once it is certified non-negative at R it stays
    so for all larger r.  Returns R - 1 for the least such R found by bisection.
    """
    lo = R_FLOOR[kind]

    def ok(r: int) -> bool:
        return r_rhs(kind, r, bits).hi <= r

    if ok(lo):
        raise BisectionError("r - RHS(r) already non-negative at the floor")
    hi = 2 * lo
    while not ok(hi):
        hi *= 2
        if hi > limit:
            raise BisectionError("no r with r >= RHS(r) below the search limit")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi - 1


def mn_bounds(kind: SequenceKind, r_max: int | Fraction, bits: int = DEFAULT_BITS) -> tuple[int, int]:
    """(m_max, n_max) implied by m * W_m^(n-1) <= r.

    Lucas: log m + (n-1)(m-1) log alpha <= log r, taken at n = 2 resp. m = 2.
    Pell: m < 2 + log r / log phi and n <= log r / log 2.
    """
    lr = ver_log(VerifiedReal.enclose(Fraction(r_max), bits), bits)
    if kind is SequenceKind.LUCAS:
        la = rk.log_alpha(bits)

        def fails(lhs: VerifiedReal) -> bool:
            return lhs.lo > lr.hi

        m = 2
        while not fails(ver_log(m + 1, bits) + la * m):
            m += 1
        n = 2
        while not fails(rk.log_two(bits) + la * n):
            n += 1
        return m, n
    m_max = strict_to_max(lr / rk.log_phi(bits) + 2)
    n_max = (lr / rk.log_two(bits)).upper_floor()
    return m_max, n_max


@dataclass(frozen=True)
class BoundSet:
    stage_label: str
    r_max: int
    k_max: int
    m_max: int
    n_max: int

    def __post_init__(self) -> None:
        if self.m_max < 2 or self.n_max < 2 or self.k_max < 1:
            raise ValueError(f"bounds below trivial minima in {self.stage_label}")


def bounds_from_r(
    kind: SequenceKind, label: str, r_max: int, bits: int = DEFAULT_BITS
) -> BoundSet:
    k_max = strict_to_max(derive_k_bound(kind, r_max, bits))
    m_max, n_max = mn_bounds(kind, r_max, bits)
    return BoundSet(label, r_max, k_max, m_max, n_max)


def propagate_bounds(
    kind: SequenceKind,
    bits: int = DEFAULT_BITS,
    replay_r: Optional[int] = None,
) -> list[BoundSet]:
    """Close the Matveev bound: solve for r_max, then derive k, m, n from it.

    With ``replay_r`` an extra stage recomputes k, m, n from that r instead.
    """
    stages = [bounds_from_r(kind, "matveev", solve_r_bound(kind, bits), bits)]
    if replay_r is not None:
        stages.append(bounds_from_r(kind, "replay", replay_r, bits))
    return stages


# -- Legendre reduction of k for the Lucas equation -----------------------------------

@dataclass(frozen=True)
class LegendreRow:
    m: int
    N: int
    q_N: int
    J: int
    k0: int
    bits: int


@dataclass
class LucasReduction:
    k_bound: int
    S: int
    rows: list[LegendreRow]
    applicability_k: int = 9
    notes: list[str] = field(default_factory=list)


def gamma_lucas(m: int):
    def gamma(bits: int) -> VerifiedReal:
        return ver_log(lucas(m), bits) / rk.log_alpha(bits)
    return gamma


def _first_k_holding(base: int, J: int, n_max: int, start: int, bits: int) -> int:
    """Least k >= start with base^k > (1.0025 (J+2) / log alpha)(n_max + k).

    The ratio base^k / (n_max + k) increases with k for base >= 3, so every
    later k satisfies the inequality too.
    """
    c = VerifiedReal.enclose(SLACK[SequenceKind.LUCAS] * (J + 2), bits) / rk.log_alpha(bits)
    k = start
    while True:
        if rk.certainly_less(c * (n_max + k), base ** k):
            return k
        k += 1


def legendre_applicable(n_max: int, k_start: int = 9, bits: int = DEFAULT_BITS) -> bool:
    """3^k > (2 * 1.0025 / log alpha)(n_max + k) at k = k_start, hence for all larger k."""
    c = VerifiedReal.enclose(2 * SLACK[SequenceKind.LUCAS], bits) / rk.log_alpha(bits)
    return rk.certainly_less(c * (n_max + k_start), 3 ** k_start)


def _legendre_row(m: int, S: int, n_max: int, k_start: int, bits: int) -> LegendreRow:
    cf, gate = expand_until(gamma_lucas(m), S, bits)

    def decide(b: int) -> int:
        return _first_k_holding(lucas(m), gate.J, n_max, k_start, b)

    first, used = with_precision_retry(decide, bits)
    return LegendreRow(m, gate.N, cf.convergents[-1][1], gate.J,
                       max(k_start - 1, first - 1), max(used, cf.stable_at_bits))


def legendre_reduce_lucas(
    m_max: int,
    n_max: int,
    k_max: int,
    bits: int = DEFAULT_BITS,
    threads: int = 1,
    k_start: int = 9,
) -> LucasReduction:
    """Reduce the k-bound for the Lucas equation via Legendre's criterion.

    For k >= k_start every solution gives |gamma_m - r/(n+k)| < 1/(2(n+k)^2),
    so r/(n+k) is a convergent with n+k <= S = n_max + k_max, and the J(S)
    lower bound caps L_m^k.  Returns the largest k that survives over all m.
    """
    if not with_precision_retry(lambda b: legendre_applicable(n_max, k_start, b), bits)[0]:
        raise ValueError(f"Legendre criterion not applicable for k >= {k_start}")
    S = n_max + k_max
    ms = range(2, m_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda m: _legendre_row(m, S, n_max, k_start, bits), ms))
    else:
        rows = [_legendre_row(m, S, n_max, k_start, bits) for m in ms]
    return LucasReduction(max(r.k0 for r in rows), S, rows, k_start)


# -- side conditions ---------------------------------------------------------------

def certify_slack(kind: SequenceKind, bits: int = DEFAULT_BITS) -> bool:
    """Check that the conjugate term fits in the slack constant.

    Lucas: |beta|^r <= |beta|^8 < 0.0025 * 9 <= 0.0025 L_m^n for r >= 8.
    Pell: |psi|^r / (2 sqrt 2) <= |psi|^4 / (2 sqrt 2) < 0.00275 * 4 <= 0.00275 P_m^n.
    """
    excess = SLACK[kind] - 1
    if kind is SequenceKind.LUCAS:
        conj = rk.beta(bits).abs() ** R_FLOOR[kind]
        return rk.certainly_less(conj, excess * lucas(2) ** 2)
    conj = rk.psi(bits).abs() ** R_FLOOR[kind] / rk.two_sqrt_two(bits)
    return rk.certainly_less(conj, excess * term(kind, 2) ** 2)


NONVANISHING_ARGUMENT = {
    SequenceKind.LUCAS: (
        "alpha^r = L_m^(n+k) would put alpha^r in Q, impossible for r >= 1"
    ),
    SequenceKind.PELL: (
        "phi^r = 2 sqrt(2) P_m^(n+k) would put phi^(2r) in Q, but "
        "phi^r = phi P_r + P_(r-1) with P_r > 0 shows phi^(2r) is irrational"
    ),
}


@dataclass
class GuardRecord:
    kind: SequenceKind
    argument: str
    checked: int
    fired: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return not self.fired


def nonvanishing_guard(kind: SequenceKind, tuples: Iterable[tuple[int, ...]] = ()) -> GuardRecord:
    """Record the non-vanishing argument and confirm it on concrete tuples.

    A 4-tuple (r, m, n, k) checks W_r != W_m^(n+k); a 3-tuple (m, n, k)
    checks that W_m^(n+k) is not a term of the sequence at all.
    """
    fired = []
    checked = 0
    for t in tuples:
        checked += 1
        if len(t) == 4:
            r, m, n, k = t
            if term(kind, r) == term(kind, m) ** (n + k):
                fired.append(tuple(t))
        else:
            m, n, k = t
            if is_member(term(kind, m) ** (n + k), kind) is not None:
                fired.append(tuple(t))
    return GuardRecord(kind, NONVANISHING_ARGUMENT[kind], checked, fired)


def t_admissible(kind: SequenceKind, r: int, n: int, k: int) -> bool:
    """T = 2r dominates every exponent |r_j| of the linear form."""
    return max(1, r, n + k) <= 2 * r
