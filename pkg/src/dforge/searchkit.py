"""Exhaustive search of W_m^(n+k) + W_m^n = W_r over a finite box."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .seqkit import SequenceKind, SolutionTuple, is_member, term


@dataclass(frozen=True)
class SearchBox:
    kind: SequenceKind
    m_range: tuple[int, int]
    n_range: tuple[int, int]
    k_range: tuple[int, int]
    r_cap: int

    def __post_init__(self) -> None:
        for lo, hi in (self.m_range, self.n_range, self.k_range):
            if lo > hi:
                raise ValueError("empty range in search box")
        if self.m_range[0] < 2 or self.n_range[0] < 2 or self.k_range[0] < 1:
            raise ValueError("box must respect m, n >= 2 and k >= 1")

    @classmethod
    def bounded(cls, kind: SequenceKind, m_max: int, n_max: int, k_max: int) -> SearchBox:
        from .bakerkit import r_upper_exclusive

        r_cap = r_upper_exclusive(kind, m_max, n_max, k_max) - 1
        return cls(kind, (2, m_max), (2, n_max), (1, k_max), r_cap)

    def size(self) -> int:
        return ((self.m_range[1] - self.m_range[0] + 1)
                * (self.n_range[1] - self.n_range[0] + 1)
                * (self.k_range[1] - self.k_range[0] + 1))

    def triples(self):
        for m in range(self.m_range[0], self.m_range[1] + 1):
            for n in range(self.n_range[0], self.n_range[1] + 1):
                for k in range(self.k_range[0], self.k_range[1] + 1):
                    yield m, n, k


@lru_cache(maxsize=None)
def _residues(kind: SequenceKind, modulus: int) -> frozenset[int]:
    """Residues of the sequence modulo ``modulus`` over one full period."""
    a, b = term(kind, 0) % modulus, term(kind, 1) % modulus
    c = 1 if kind is SequenceKind.LUCAS else 2
    start = (a, b)
    seen = set()
    while True:
        seen.add(a)
        a, b = b, (c * b + a) % modulus
        if (a, b) == start:
            return frozenset(seen)


def residue_prefilter(value: int, kind: SequenceKind, modulus: int) -> bool:
    """False only when ``value`` mod ``modulus`` never occurs in the sequence."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    return value % modulus in _residues(kind, modulus)


DEFAULT_MODULI = (11, 16, 29)


def _search_m(box: SearchBox, m: int, moduli: tuple[int, ...]) -> list[SolutionTuple]:
    hits = []
    w = term(box.kind, m)
    for n in range(box.n_range[0], box.n_range[1] + 1):
        wn = pow(w, n)
        for k in range(box.k_range[0], box.k_range[1] + 1):
            value = wn * pow(w, k) + wn
            if not all(residue_prefilter(value, box.kind, mod) for mod in moduli):
                continue
            r = is_member(value, box.kind)
            if r is not None:
                hits.append(SolutionTuple(r, m, n, k))
    return hits


def search(
    box: SearchBox,
    moduli: tuple[int, ...] = DEFAULT_MODULI,
    threads: int = 1,
) -> list[SolutionTuple]:
    """All solutions in the box, sorted by (m, n, k)."""
    # size the membership table once so worker threads only read it
    term(box.kind, box.r_cap + 1)
    ms = range(box.m_range[0], box.m_range[1] + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda m: _search_m(box, m, moduli), ms))
    else:
        chunks = [_search_m(box, m, moduli) for m in ms]
    hits = [h for chunk in chunks for h in chunk]
    return sorted(hits, key=lambda s: (s.m, s.n, s.k))


def naive_search(box: SearchBox) -> list[SolutionTuple]:
    """Independent replay: fresh recurrence for every value, no caches, no filters."""
    w0, w1, c = {SequenceKind.LUCAS: (2, 1, 1), SequenceKind.PELL: (0, 1, 2)}[box.kind]

    def nth(t):
        a, b = w0, w1
        for _ in range(t):
            a, b = b, c * b + a
        return a

    out = []
    for m, n, k in box.triples():
        base = nth(m)
        value = base ** (n + k) + base ** n
        a, b, r = w0, w1, 0
        while a < value or (box.kind is SequenceKind.LUCAS and r == 0):
            if a == value:
                break
            a, b, r = b, c * b + a, r + 1
        if a == value:
            out.append(SolutionTuple(r, m, n, k))
    return out
