import math
import random

import pytest
from hypothesis import given, strategies as st

from dforge import realkit as rk
from dforge.seqkit import (
    SequenceCache,
    SequenceKind,
    SolutionTuple,
    exact_valuation,
    is_member,
    lucas,
    pell,
    term,
)

LUCAS, PELL = SequenceKind.LUCAS, SequenceKind.PELL


@pytest.mark.parametrize("t, expected", [(0, 2), (1, 1), (2, 3), (8, 47)])
def test_lucas_values(t, expected):
    assert lucas(t) == expected


@pytest.mark.parametrize("t, expected", [(0, 0), (1, 1), (2, 2), (4, 12), (12, 13860)])
def test_pell_values(t, expected):
    assert pell(t) == expected


def test_recurrences_hold_far_out():
    for t in range(2, 400):
        assert lucas(t) == lucas(t - 1) + lucas(t - 2)
        assert pell(t) == 2 * pell(t - 1) + pell(t - 2)


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        lucas(-1)


@pytest.mark.parametrize("base, value, expected", [(3, 36, 2), (2, 12, 2), (3, 18, 2), (5, 7, 0)])
def test_exact_valuation_examples(base, value, expected):
    assert exact_valuation(base, value) == expected


@pytest.mark.parametrize("base, value", [(1, 5), (0, 5), (-3, 9), (3, 0)])
def test_exact_valuation_rejects(base, value):
    with pytest.raises(ValueError):
        exact_valuation(base, value)


@given(st.integers(2, 60), st.integers(1, 10 ** 6), st.integers(0, 40))
def test_exact_valuation_property(b, c, e):
    if math.gcd(b, c) != 1:
        c = c * b + 1 if math.gcd(b, c * b + 1) == 1 else 1
    assert exact_valuation(b, b ** e * c) == e


@pytest.mark.parametrize("value, kind, expected", [
    (47, LUCAS, 8), (12, PELL, 4), (13, LUCAS, None),
    (1, LUCAS, 1), (2, LUCAS, 0), (0, PELL, 0), (3, PELL, None), (-1, PELL, None),
])
def test_is_member(value, kind, expected):
    assert is_member(value, kind) == expected


def test_membership_round_trip():
    for t in range(2, 201):
        assert is_member(lucas(t), LUCAS) == t
    for t in range(0, 201):
        assert is_member(pell(t), PELL) == t


def test_membership_neighbours_rejected():
    for t in range(3, 150):
        assert is_member(lucas(t) + 1, LUCAS) is None
        assert is_member(pell(t) - 1, PELL) is None


def test_fresh_cache_agrees_with_shared_one():
    cache = SequenceCache(PELL)
    assert cache.index_of(pell(300)) == 300
    assert [cache.term(t) for t in range(50)] == [pell(t) for t in range(50)]


def test_binet_inequalities():
    # alpha^(t-1) <= L_t < alpha^(t+1) and phi^(t-2) < P_t <= phi^(t-1)
    a, f = rk.alpha(256), rk.phi(256)
    for t in range(1, 201):
        L, P = lucas(t), pell(t)
        assert (a ** (t - 1)).hi <= L < (a ** (t + 1)).lo
        low = f ** (t - 2) if t >= 2 else 1 / f
        assert low.hi < P <= (f ** (t - 1)).lo


def test_binet_closed_forms_enclose_terms():
    a, b = rk.alpha(256), rk.beta(256)
    f, g, s = rk.phi(256), rk.psi(256), rk.two_sqrt_two(256)
    for t in range(0, 120):
        assert (a ** t + b ** t).contains(lucas(t))
        assert ((f ** t - g ** t) / s).contains(pell(t))


@pytest.mark.parametrize("kind", [LUCAS, PELL])
def test_divisibility_lemma_spot_check(kind):
    # W_m^n || W_r  implies  W_m^(n-1) || r/m
    checked = 0
    for m in range(2, 9):
        w = term(kind, m)
        for r in range(m, 501, m):
            n = exact_valuation(w, term(kind, r)) if term(kind, r) else 0
            if n in (2, 3):
                assert exact_valuation(w, r // m) == n - 1
                checked += 1
    assert checked > 0


def test_solution_tuple_holds():
    assert SolutionTuple(4, 2, 2, 1).holds(PELL)
    assert not SolutionTuple(8, 2, 2, 1).holds(LUCAS)
    assert SolutionTuple(4, 2, 2, 1).as_tuple() == (4, 2, 2, 1)


def test_cache_thread_safety():
    from concurrent.futures import ThreadPoolExecutor

    cache = SequenceCache(LUCAS)
    idx = list(range(0, 2000, 7))
    random.Random(1).shuffle(idx)
    with ThreadPoolExecutor(8) as pool:
        got = list(pool.map(cache.term, idx))
    assert got == [lucas(t) for t in idx]
