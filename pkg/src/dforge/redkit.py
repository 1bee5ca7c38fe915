"""Dujella-Petho reduction of an exponent bound via continued fractions.

The lemma: if p/q is a convergent of the irrational delta with q > 6M and
eps = ||mu q|| - M ||delta q|| > 0, then

    0 < |u delta - v + mu| < C F^(-w)

has no solution in positive integers u <= M, v, and w >= log(C q / eps) / log F.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import realkit as rk
from .cfkit import convergents
from .realkit import (
    DEFAULT_BITS,
    Computable,
    PrecisionError,
    VerifiedReal,
    as_computable,
    ver_log,
    with_precision_retry,
)
from .seqkit import pell

SCAN_CAP = 200


class ReductionError(RuntimeError):
    pass


def nearest_integer_distance(x: VerifiedReal) -> VerifiedReal:
    """Enclosure of ||x||, the distance from x to the nearest integer.

    ||.|| is 1-Lipschitz and piecewise linear, so its range over [lo, hi] is
    attained at the endpoints, an integer (value 0) or a half-integer (1/2).
    """
    lo, hi = x.lo, x.hi

    def dist(t: Fraction) -> Fraction:
        f = t - math.floor(t)
        return min(f, 1 - f)

    vals = [dist(lo), dist(hi)]
    low, high = min(vals), max(vals)
    if math.floor(hi) > math.floor(lo) or dist(lo) == 0:
        low = Fraction(0)
    if math.floor(hi - Fraction(1, 2)) > math.floor(lo - Fraction(1, 2)) or dist(lo) == Fraction(1, 2):
        high = Fraction(1, 2)
    return VerifiedReal.from_bounds(low, high, x.bits)


@dataclass(frozen=True)
class ReductionInstance:
    delta: Computable | VerifiedReal
    mu: Computable | VerifiedReal
    C: Fraction | VerifiedReal | Computable
    F: Fraction | int
    M: int
    m: Optional[int] = None

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if Fraction(self.F) <= 1:
            raise ValueError("F must exceed 1")


@dataclass(frozen=True)
class ReductionResult:
    m: Optional[int]
    t: int
    q: int
    epsilon: VerifiedReal
    k_bound: int
    bits: int


def _C_at(C, bits: int) -> VerifiedReal:
    if isinstance(C, VerifiedReal):
        return C
    if callable(C):
        return C(bits)
    return VerifiedReal.enclose(C, bits)


def exponent_threshold(C: VerifiedReal, q: int, epsilon_lo: Fraction, F: Fraction | int, bits: int) -> VerifiedReal:
    """Enclosure of log(C q / eps) / log F, taking eps at its lower end."""
    eps = VerifiedReal.enclose(epsilon_lo, bits)
    arg = C * q / eps
    return ver_log(arg, bits) / ver_log(VerifiedReal.enclose(Fraction(F), bits), bits)


def _reduce_at(inst: ReductionInstance, bits: int, cap: int) -> ReductionResult:
    delta = as_computable(inst.delta)(bits)
    mu = as_computable(inst.mu)(bits)
    six_m = 6 * inst.M
    seen = 0
    for conv in convergents(delta):
        seen += 1
        if conv.index >= cap:
            raise ReductionError(f"m={inst.m}: no usable convergent among the first {cap}")
        q = conv.q
        if q <= six_m:
            continue
        eps = nearest_integer_distance(mu * q) - nearest_integer_distance(delta * q) * inst.M
        if eps.lo > 0:
            threshold = exponent_threshold(_C_at(inst.C, bits), q, eps.lo, inst.F, bits)
            return ReductionResult(inst.m, conv.index, q, eps, threshold.upper_floor(), bits)
        if eps.hi > 0:
            raise PrecisionError(f"sign of epsilon undecided at q_{conv.index}")
    raise PrecisionError(f"m={inst.m}: expansion exhausted after {seen} quotients at {bits} bits")


def reduce(
    inst: ReductionInstance,
    bits: int = DEFAULT_BITS,
    cap: int = SCAN_CAP,
) -> ReductionResult:
    """Walk the convergents of delta and return the first usable one.

    "Usable" means q > 6M and eps > 0, both certified.  ``k_bound`` is the
    floor of the upper end of log(C q / eps) / log F; every exponent above it
    is excluded.
    """
    try:
        result, _ = with_precision_retry(lambda b: _reduce_at(inst, b, cap), bits)
    except PrecisionError as exc:
        raise ReductionError(f"m={inst.m}: {exc}") from exc
    return result


# -- the Pell application ----------------------------------------------------------

def delta_pell(m: int) -> Computable:
    def delta(bits: int) -> VerifiedReal:
        return ver_log(pell(m), bits) / rk.log_phi(bits)
    return delta


def mu_pell(bits: int) -> VerifiedReal:
    return rk.log_two_sqrt_two(bits) / rk.log_phi(bits)


def C_pell(bits: int) -> VerifiedReal:
    return VerifiedReal.enclose(Fraction("1.00275"), bits) / rk.log_phi(bits)


def pell_instance(m: int, M: int) -> ReductionInstance:
    return ReductionInstance(delta_pell(m), mu_pell, C_pell, 2, M, m)


@dataclass
class PassResult:
    """One reduction pass over m = 2..m_max."""

    M: int
    rows: list[ReductionResult]
    k_bound: int
    max_row: ReductionResult
    min_epsilon: Fraction

    @property
    def per_m_k_bound(self) -> int:
        return max(r.k_bound for r in self.rows)


def reduction_pass(
    instances: Sequence[ReductionInstance],
    bits: int = DEFAULT_BITS,
    threads: int = 1,
    C: Callable[[int], VerifiedReal] | None = None,
) -> PassResult:
    """Reduce every instance, then combine the largest q with the smallest eps.

    The combined bound log(C max q / min eps) / log F dominates each per-m
    bound, so it is a valid global bound.
    """
    if not instances:
        raise ValueError("empty pass")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda i: reduce(i, bits), instances))
    else:
        rows = [reduce(i, bits) for i in instances]
    max_row = max(rows, key=lambda r: r.q)
    min_eps = min(r.epsilon.lo for r in rows)
    first = instances[0]
    C_enc = _C_at(first.C if C is None else C, bits)
    k_bound = exponent_threshold(C_enc, max_row.q, min_eps, first.F, bits).upper_floor()
    return PassResult(first.M, rows, k_bound, max_row, min_eps)


def pell_pass(m_max: int, M: int, bits: int = DEFAULT_BITS, threads: int = 1) -> PassResult:
    return reduction_pass([pell_instance(m, M) for m in range(2, m_max + 1)], bits, threads)
