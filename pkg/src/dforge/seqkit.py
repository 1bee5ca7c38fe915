"""Lucas and Pell numbers, membership tests and exact valuations."""

from __future__ import annotations

import bisect
import enum
import threading
from dataclasses import dataclass
from typing import Optional


class SequenceKind(enum.Enum):
    LUCAS = "lucas"
    PELL = "pell"

    @property
    def symbol(self) -> str:
        return "L" if self is SequenceKind.LUCAS else "P"


# (W_0, W_1, multiplier of W_{t-1}) for W_t = c * W_{t-1} + W_{t-2}
_RECURRENCES = {
    SequenceKind.LUCAS: (2, 1, 1),
    SequenceKind.PELL: (0, 1, 2),
}


class SequenceCache:
    """Grow-only table of sequence terms, safe to share between threads.

    Reads of already computed terms never block; extension happens under a
    lock and only appends, so a lookup behaves exactly like recomputation.
    """

    def __init__(self, kind: SequenceKind):
        self.kind = kind
        w0, w1, self._c = _RECURRENCES[kind]
        self._terms = [w0, w1]
        self._lock = threading.Lock()

    def _extend_to(self, t: int) -> None:
        with self._lock:
            terms, c = self._terms, self._c
            while len(terms) <= t:
                terms.append(c * terms[-1] + terms[-2])

    def _extend_past(self, value: int) -> None:
        with self._lock:
            terms, c = self._terms, self._c
            while terms[-1] <= value:
                terms.append(c * terms[-1] + terms[-2])

    def term(self, t: int) -> int:
        if t < 0:
            raise ValueError("index must be non-negative")
        if t >= len(self._terms):
            self._extend_to(t)
        return self._terms[t]

    def index_of(self, value: int) -> Optional[int]:
        """Smallest t with W_t == value, or None.

        Lucas: L_0 = 2 is the only out-of-order term (L_1 = 1 < L_0); the
        terms from index 1 on are strictly increasing, so 2 maps to 0 and
        every other value has at most one index.  Pell is strictly increasing
        from index 0.
        """
        if value < 0:
            return None
        if self.kind is SequenceKind.LUCAS and value == 2:
            return 0
        if self._terms[-1] <= value:
            self._extend_past(value)
        start = 1 if self.kind is SequenceKind.LUCAS else 0
        terms = self._terms
        i = bisect.bisect_left(terms, value, lo=start)
        if i < len(terms) and terms[i] == value:
            return i
        return None


_CACHES = {kind: SequenceCache(kind) for kind in SequenceKind}


def term(kind: SequenceKind, t: int) -> int:
    return _CACHES[kind].term(t)


def lucas(t: int) -> int:
    return _CACHES[SequenceKind.LUCAS].term(t)


def pell(t: int) -> int:
    return _CACHES[SequenceKind.PELL].term(t)


def is_member(value: int, kind: SequenceKind) -> Optional[int]:
    return _CACHES[kind].index_of(value)


def exact_valuation(base: int, value: int) -> int:
    """Largest e with ``base**e`` dividing ``value`` (``base**e || value``)."""
    if base <= 1:
        raise ValueError("base must be >= 2")
    if value < 1:
        raise ValueError("value must be >= 1")
    e = 0
    # peel off squares first so huge valuations stay cheap
    powers = [base]
    while value % powers[-1] == 0:
        nxt = powers[-1] * powers[-1]
        if nxt > value:
            break
        powers.append(nxt)
    for i in range(len(powers) - 1, -1, -1):
        while value % powers[i] == 0:
            value //= powers[i]
            e += 1 << i
    return e


@dataclass(frozen=True, order=True)
class SolutionTuple:
    """A solution (r, m, n, k) of W_m^(n+k) + W_m^n = W_r."""

    r: int
    m: int
    n: int
    k: int

    def holds(self, kind: SequenceKind) -> bool:
        w = term(kind, self.m)
        return w ** (self.n + self.k) + w ** self.n == term(kind, self.r)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.r, self.m, self.n, self.k)
