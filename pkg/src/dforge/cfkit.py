"""Certified continued-fraction expansion and Legendre's approximation criterion."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .realkit import (
    DEFAULT_BITS,
    MAX_DOUBLINGS,
    Computable,
    PrecisionError,
    VerifiedReal,
    as_computable,
    certainly_less,
    with_precision_retry,
)


class ExpansionError(RuntimeError):
    """Expansion did not reach the requested depth within the precision cap."""


@dataclass
class ContinuedFraction:
    """Partial quotients a_0..a_N with their convergents p_i/q_i.

    Convergent ``i`` uses a_0..a_i with p_{-1}=1, q_{-1}=0, p_0=a_0, q_0=1.
    """

    quotients: list[int]
    convergents: list[tuple[int, int]]
    stable_at_bits: int

    @property
    def N(self) -> int:
        return len(self.quotients) - 1

    def denominators(self) -> list[int]:
        return [q for _, q in self.convergents]

    def check_recurrence(self) -> bool:
        p2, p1, q2, q1 = 0, 1, 1, 0
        for a, (p, q) in zip(self.quotients, self.convergents):
            if p != a * p1 + p2 or q != a * q1 + q2:
                return False
            p2, p1, q2, q1 = p1, p, q1, q
        return True

    def check_determinants(self) -> bool:
        """p_i q_{i-1} - p_{i-1} q_i == (-1)^(i-1) for every i."""
        prev = (1, 0)
        for i, (p, q) in enumerate(self.convergents):
            if p * prev[1] - prev[0] * q != (-1) ** (i - 1):
                return False
            prev = (p, q)
        return True


@dataclass(frozen=True)
class LegendreGate:
    """Threshold S, first index N with q_N > S, and J = max(a_0..a_N)."""

    S: int
    N: int
    J: int


@dataclass
class Convergent:
    index: int
    a: int
    p: int
    q: int
    extra: dict = field(default_factory=dict)


def certified_quotients(x: VerifiedReal) -> Iterator[int]:
    """Partial quotients shared by every real in the enclosure ``x``.

    Runs Euclid's algorithm on both exact endpoints at once and stops as soon
    as their floors disagree or an endpoint lands exactly on an integer.
    """
    lo, hi = x.lo, x.hi
    p, q, r, s = lo.numerator, lo.denominator, hi.numerator, hi.denominator
    while True:
        a, rem_lo = divmod(p, q)
        a_hi, rem_hi = divmod(r, s)
        if a != a_hi:
            return
        yield a
        if rem_lo == 0 or rem_hi == 0:
            return
        # 1/(x - a) is decreasing: the endpoints swap
        p, q, r, s = s, rem_hi, q, rem_lo


def convergents(x: VerifiedReal) -> Iterator[Convergent]:
    p2, p1, q2, q1 = 0, 1, 1, 0
    for i, a in enumerate(certified_quotients(x)):
        p, q = a * p1 + p2, a * q1 + q2
        yield Convergent(i, a, p, q)
        p2, p1, q2, q1 = p1, p, q1, q


def _is_fixed(comp: Computable) -> bool:
    return getattr(comp, "fixed", False)


def _expand_at(comp: Computable, S: int, bits: int) -> list[Convergent]:
    out = []
    for c in convergents(comp(bits)):
        out.append(c)
        if c.q > S:
            return out
    if _is_fixed(comp):
        raise ExpansionError(
            f"enclosure only determines {len(out)} quotients; need q_N > {S}"
        )
    raise PrecisionError(f"only {len(out)} quotients certified at {bits} bits")


def expand_until(
    x: VerifiedReal | Computable,
    S: int,
    bits: int = DEFAULT_BITS,
    max_doublings: int = MAX_DOUBLINGS,
) -> tuple[ContinuedFraction, LegendreGate]:
    """Expand ``x`` up to the first convergent with denominator exceeding ``S``.

    The quotients are re-derived at twice the successful precision as a
    stability witness.
    """
    if S < 1:
        raise ValueError("S must be >= 1")
    comp = as_computable(x)
    try:
        convs, used = with_precision_retry(
            lambda b: _expand_at(comp, S, b), bits, max_doublings
        )
    except PrecisionError as exc:
        raise ExpansionError(
            f"expansion never reached q_N > {S} (input may be rational): {exc}"
        ) from exc
    quotients = [c.a for c in convs]
    witness = [c.a for c in _expand_at(comp, S, 2 * used)]
    if witness != quotients:
        raise ExpansionError(f"quotients changed between {used} and {2 * used} bits")
    cf = ContinuedFraction(quotients, [(c.p, c.q) for c in convs], used)
    return cf, LegendreGate(S=S, N=cf.N, J=max(quotients))


def legendre_is_convergent(
    x: VerifiedReal | Computable,
    p: int,
    q: int,
    bits: int = DEFAULT_BITS,
    max_doublings: int = MAX_DOUBLINGS,
) -> bool:
    """Certified test of ``|x - p/q| < 1/(2 q^2)``."""
    if q < 1:
        raise ValueError("q must be >= 1")
    comp = as_computable(x)
    threshold = Fraction(1, 2 * q * q)

    def decide(b: int) -> bool:
        gap = (comp(b) - Fraction(p, q)).abs()
        return certainly_less(gap, threshold)

    try:
        result, _ = with_precision_retry(
            decide, bits, 0 if _is_fixed(comp) else max_doublings
        )
    except PrecisionError as exc:
        raise ExpansionError(f"cannot decide |x - {p}/{q}| < 1/(2q^2)") from exc
    return result


def legendre_lower_bound(gate: LegendreGate, q: int) -> VerifiedReal:
    """Enclosure of 1/((J+2) q^2), valid for denominators q <= S."""
    if q > gate.S:
        raise ValueError(f"q = {q} exceeds S = {gate.S}")
    if q < 1:
        raise ValueError("q must be >= 1")
    return VerifiedReal.enclose(Fraction(1, (gate.J + 2) * q * q))
