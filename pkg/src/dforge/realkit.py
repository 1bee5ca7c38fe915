"""Verified real arithmetic on intervals with dyadic endpoints.

A :class:`VerifiedReal` is a closed interval ``[lo, hi]`` whose endpoints are
``mantissa * 2**exp`` for a shared exponent.  Every operation returns an
interval that encloses the exact result for every point of its inputs; when
endpoints must be shortened they are rounded outward.

Precision management is explicit: callers that need a strict decision compare
with :func:`ver_compare` and, on ``Ordering.OVERLAPPING``, raise
:class:`PrecisionError` so that :func:`with_precision_retry` can recompute at
doubled precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, TypeVar, Union

DEFAULT_BITS = 192
MAX_DOUBLINGS = 16
# extra bits carried beyond the requested precision
GUARD_BITS = 24

Number = Union[int, Fraction]
T = TypeVar("T")


class PrecisionError(ArithmeticError):
    """An interval was too wide to decide a strict comparison."""


class Ordering(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    OVERLAPPING = "overlapping"


class Rounding(enum.Enum):
    OUTWARD = "outward"
    TOWARD_LOWER = "toward_lower"
    TOWARD_UPPER = "toward_upper"


def _floor_shift(man: int, sh: int) -> int:
    return man >> sh


def _ceil_shift(man: int, sh: int) -> int:
    return -((-man) >> sh)


def _round_fraction(value: Fraction, exp: int, upward: bool) -> int:
    """Mantissa of ``value`` on the grid ``2**exp``, rounded down or up."""
    if exp >= 0:
        num, den = value.numerator, value.denominator << exp
    else:
        num, den = value.numerator << -exp, value.denominator
    q, r = divmod(num, den)
    return q + 1 if (upward and r) else q


@dataclass(frozen=True)
class VerifiedReal:
    """Interval ``[lo_man * 2**exp, hi_man * 2**exp]`` enclosing a real.

    ``bits`` records the precision the value was produced at.  Constructors
    (:func:`ver_sqrt`, :func:`ver_log`, :meth:`enclose`) meet
    ``hi - lo <= 2**-bits * max(1, |lo|)``; arithmetic results are only as
    narrow as their inputs allow.
    """

    lo_man: int
    hi_man: int
    exp: int
    bits: int = DEFAULT_BITS

    def __post_init__(self) -> None:
        if self.lo_man > self.hi_man:
            raise ValueError("empty interval")

    # -- construction ---------------------------------------------------
    @classmethod
    def _normalized(
        cls,
        lo_man: int,
        hi_man: int,
        exp: int,
        bits: int,
        rounding: Rounding = Rounding.OUTWARD,
    ) -> VerifiedReal:
        mag = max(abs(lo_man), abs(hi_man)).bit_length()
        keep = bits + GUARD_BITS
        if mag > keep:
            sh = mag - keep
            if rounding is Rounding.TOWARD_UPPER:
                lo_man = _ceil_shift(lo_man, sh)
            else:
                lo_man = _floor_shift(lo_man, sh)
            if rounding is Rounding.TOWARD_LOWER:
                hi_man = _floor_shift(hi_man, sh)
            else:
                hi_man = _ceil_shift(hi_man, sh)
            exp += sh
        return cls(lo_man, hi_man, exp, bits)

    @classmethod
    def exact(cls, value: Number, bits: int = DEFAULT_BITS) -> VerifiedReal:
        """Point interval for an integer or a dyadic fraction."""
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic; use enclose()")
        e = -(den.bit_length() - 1)
        man = value.numerator
        return cls(man, man, e, bits)

    @classmethod
    def from_bounds(
        cls, lo: Number, hi: Number, bits: int = DEFAULT_BITS
    ) -> VerifiedReal:
        """Smallest grid interval containing the rational interval ``[lo, hi]``."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("lo > hi")
        big = max(abs(lo), abs(hi))
        if big == 0:
            return cls(0, 0, 0, bits)
        top = big.numerator.bit_length() - big.denominator.bit_length() + 1
        exp = top - (bits + GUARD_BITS)
        lo_man = _round_fraction(lo, exp, upward=False)
        hi_man = _round_fraction(hi, exp, upward=True)
        return cls(lo_man, hi_man, exp, bits)

    @classmethod
    def enclose(
        cls, value: Number | str, bits: int = DEFAULT_BITS
    ) -> VerifiedReal:
        """Outward-rounded enclosure of an exact rational (or decimal string)."""
        value = Fraction(value)
        return cls.from_bounds(value, value, bits)

    # -- views ------------------------------------------------------------
    @property
    def lo(self) -> Fraction:
        return Fraction(self.lo_man) * Fraction(2) ** self.exp

    @property
    def hi(self) -> Fraction:
        return Fraction(self.hi_man) * Fraction(2) ** self.exp

    @property
    def width(self) -> Fraction:
        return (Fraction(self.hi_man - self.lo_man)) * Fraction(2) ** self.exp

    @property
    def is_exact(self) -> bool:
        return self.lo_man == self.hi_man

    def contains(self, value: Number) -> bool:
        return self.lo <= Fraction(value) <= self.hi

    def contains_interval(self, other: VerifiedReal) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def floor(self) -> int:
        """Common floor of both endpoints, or PrecisionError."""
        f_lo = math.floor(self.lo)
        if math.floor(self.hi) != f_lo:
            raise PrecisionError("floor not determined")
        return f_lo

    def upper_floor(self) -> int:
        return math.floor(self.hi)

    def upper_ceil(self) -> int:
        return math.ceil(self.hi)

    def lower_floor(self) -> int:
        return math.floor(self.lo)

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __repr__(self) -> str:
        return f"VerifiedReal([{float(self.lo)!r}, {float(self.hi)!r}], bits={self.bits})"

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other: object) -> VerifiedReal:
        if isinstance(other, VerifiedReal):
            return other
        if isinstance(other, (int, Fraction)):
            return VerifiedReal.enclose(other, self.bits)
        return NotImplemented  # type: ignore[return-value]

    def _align(self, other: VerifiedReal) -> tuple[int, int, int, int, int]:
        e = min(self.exp, other.exp)
        a, b = self.exp - e, other.exp - e
        return self.lo_man << a, self.hi_man << a, other.lo_man << b, other.hi_man << b, e

    def __neg__(self) -> VerifiedReal:
        return VerifiedReal(-self.hi_man, -self.lo_man, self.exp, self.bits)

    def __add__(self, other: object) -> VerifiedReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        al, ah, bl, bh, e = self._align(other)
        return VerifiedReal._normalized(al + bl, ah + bh, e, min(self.bits, other.bits))

    __radd__ = __add__

    def __sub__(self, other: object) -> VerifiedReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> VerifiedReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: object) -> VerifiedReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        products = (
            self.lo_man * other.lo_man,
            self.lo_man * other.hi_man,
            self.hi_man * other.lo_man,
            self.hi_man * other.hi_man,
        )
        return VerifiedReal._normalized(
            min(products), max(products), self.exp + other.exp, min(self.bits, other.bits)
        )

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> VerifiedReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.lo_man <= 0 <= other.hi_man:
            raise ZeroDivisionError("divisor interval contains 0")
        quotients = [a / b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return VerifiedReal.from_bounds(min(quotients), max(quotients), min(self.bits, other.bits))

    def __rtruediv__(self, other: object) -> VerifiedReal:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> VerifiedReal:
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = VerifiedReal.exact(1, self.bits)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def abs(self) -> VerifiedReal:
        if self.lo_man >= 0:
            return self
        if self.hi_man <= 0:
            return -self
        return VerifiedReal(0, max(-self.lo_man, self.hi_man), self.exp, self.bits)


def ver_max(a: VerifiedReal, b: VerifiedReal) -> VerifiedReal:
    """Enclosure of ``max(x, y)`` for x in a, y in b."""
    lo = max(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    return VerifiedReal.from_bounds(lo, hi, min(a.bits, b.bits))


def ver_arith(a: VerifiedReal, b: VerifiedReal, op: str) -> VerifiedReal:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def ver_compare(a: VerifiedReal, b: VerifiedReal) -> Ordering:
    if a.hi < b.lo:
        return Ordering.LESS
    if a.lo > b.hi:
        return Ordering.GREATER
    return Ordering.OVERLAPPING


def certainly_less(a: VerifiedReal | Number, b: VerifiedReal | Number) -> bool:
    """Decide ``a < b``; PrecisionError if the enclosures overlap."""
    a_lo, a_hi = (a.lo, a.hi) if isinstance(a, VerifiedReal) else (Fraction(a),) * 2
    b_lo, b_hi = (b.lo, b.hi) if isinstance(b, VerifiedReal) else (Fraction(b),) * 2
    if a_hi < b_lo:
        return True
    if a_lo >= b_hi:
        return False
    raise PrecisionError("comparison undecided")


# -- elementary functions ---------------------------------------------------

def ver_sqrt(x: int, bits: int = DEFAULT_BITS) -> VerifiedReal:
    if x < 0:
        raise ValueError("sqrt of negative integer")
    if bits < 16:
        raise ValueError("bits must be >= 16")
    w = bits + GUARD_BITS
    s = math.isqrt(x << (2 * w))
    hi = s if s * s == x << (2 * w) else s + 1
    return VerifiedReal._normalized(s, hi, -w, bits)


def _atanh_fixed(num: int, den: int, w: int) -> tuple[int, int]:
    """atanh(num/den) * 2**w as (approximation, error bound in ulps).

    Requires 0 <= num/den <= 1/3.  Each floor costs < 1 ulp; with the power
    error staying below 3 ulps, every series term is off by < 4 ulps, and the
    discarded tail is below 3 ulps once the running power floors to zero.
    """
    P = (num << w) // den
    Q = ((num * num) << w) // (den * den)
    total = 0
    k = 0
    while P:
        total += P // (2 * k + 1)
        P = (P * Q) >> w
        k += 1
    return total, 4 * k + 4


@lru_cache(maxsize=64)
def _log2_fixed(w: int) -> tuple[int, int]:
    s, err = _atanh_fixed(1, 3, w)
    return 2 * s, 2 * err


def _log_fixed(man: int, exp: int, w: int) -> tuple[int, int]:
    """log(man * 2**exp) * 2**w as (approximation, error bound in ulps)."""
    b = man.bit_length()
    # scale man / 2**b into [1/sqrt2, sqrt2)
    if 2 * man * man < 1 << (2 * b):
        b -= 1
    e = exp + b
    pivot = 1 << b
    num, den = man - pivot, man + pivot
    if num:
        s, err = _atanh_fixed(abs(num), den, w)
        s, err = (2 * s if num > 0 else -2 * s), 2 * err
    else:
        s, err = 0, 0
    if e:
        l2, err2 = _log2_fixed(w)
        s += e * l2
        err += abs(e) * err2
    return s, err


def ver_log(x: VerifiedReal | int, bits: int = DEFAULT_BITS) -> VerifiedReal:
    """Enclosure of log over the whole interval ``x``."""
    if not isinstance(x, VerifiedReal):
        x = VerifiedReal.exact(x, bits)
    if x.lo_man <= 0:
        raise ValueError("log of an interval touching 0 or negative values")
    e_mag = max(abs(x.exp + x.hi_man.bit_length()), 1).bit_length()
    w = bits + GUARD_BITS + 16 + e_mag
    if x.lo_man == x.hi_man and x.lo == 1:
        return VerifiedReal(0, 0, 0, bits)
    s_lo, err_lo = _log_fixed(x.lo_man, x.exp, w)
    if x.is_exact:
        s_hi, err_hi = s_lo, err_lo
    else:
        s_hi, err_hi = _log_fixed(x.hi_man, x.exp, w)
    return VerifiedReal._normalized(s_lo - err_lo, s_hi + err_hi, -w, bits)


# -- constants ----------------------------------------------------------------

@lru_cache(maxsize=None)
def sqrt5(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return ver_sqrt(5, bits)


@lru_cache(maxsize=None)
def sqrt2(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return ver_sqrt(2, bits)


@lru_cache(maxsize=None)
def alpha(bits: int = DEFAULT_BITS) -> VerifiedReal:
    """Golden ratio (1 + sqrt 5) / 2."""
    return (sqrt5(bits) + 1) * VerifiedReal.exact(Fraction(1, 2), bits)


@lru_cache(maxsize=None)
def beta(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return (1 - sqrt5(bits)) * VerifiedReal.exact(Fraction(1, 2), bits)


@lru_cache(maxsize=None)
def phi(bits: int = DEFAULT_BITS) -> VerifiedReal:
    """Silver ratio 1 + sqrt 2."""
    return sqrt2(bits) + 1


@lru_cache(maxsize=None)
def psi(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return 1 - sqrt2(bits)


@lru_cache(maxsize=None)
def two_sqrt_two(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return sqrt2(bits) * 2


@lru_cache(maxsize=None)
def log_alpha(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return ver_log(alpha(bits), bits)


@lru_cache(maxsize=None)
def log_phi(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return ver_log(phi(bits), bits)


@lru_cache(maxsize=None)
def log_two(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return ver_log(2, bits)


@lru_cache(maxsize=None)
def log_two_sqrt_two(bits: int = DEFAULT_BITS) -> VerifiedReal:
    return ver_log(two_sqrt_two(bits), bits)


# -- precision management -------------------------------------------------------

Computable = Callable[[int], VerifiedReal]


def as_computable(x: VerifiedReal | Computable) -> Computable:
    """Wrap a fixed enclosure so it can stand in for a recomputable real."""
    if isinstance(x, VerifiedReal):
        def fixed(bits: int) -> VerifiedReal:
            return x
        fixed.fixed = True  # type: ignore[attr-defined]
        return fixed
    return x


def with_precision_retry(
    fn: Callable[[int], T],
    bits: int = DEFAULT_BITS,
    max_doublings: int = MAX_DOUBLINGS,
) -> tuple[T, int]:
    """Call ``fn(bits)``, doubling ``bits`` on PrecisionError.

    Returns the result together with the precision that succeeded.
    """
    last: PrecisionError | None = None
    for _ in range(max_doublings + 1):
        try:
            return fn(bits), bits
        except PrecisionError as exc:
            last = exc
            bits *= 2
    raise PrecisionError(f"undecided after {max_doublings} doublings: {last}")


def decimal_bounds(x: VerifiedReal, digits: int = 30) -> tuple[str, str]:
    """Outward-rounded decimal strings for the endpoints of ``x``."""
    return _decimal(x.lo, digits, upward=False), _decimal(x.hi, digits, upward=True)


def _decimal(value: Fraction, digits: int, upward: bool) -> str:
    if value == 0:
        return "0"
    if value.denominator == 1 and len(str(abs(value.numerator))) <= digits:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    mag = abs(value)
    # round the magnitude away from zero iff that moves in the requested direction
    away = upward != (value < 0)
    e = len(str(mag.numerator)) - len(str(mag.denominator))
    scale = digits - e
    while True:
        scaled = mag * Fraction(10) ** scale
        if scaled >= 10 ** digits:
            scale -= 1
            continue
        if scaled < 10 ** (digits - 1):
            scale += 1
            continue
        break
    q, r = divmod(scaled.numerator, scaled.denominator)
    if away and r:
        q += 1
    text = str(q).rstrip("0")
    exp10 = len(str(q)) - 1 - scale
    mant = text[0] + ("." + text[1:] if len(text) > 1 else "")
    return f"{sign}{mant}e{exp10}"
