import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dforge import realkit as rk
from dforge.realkit import (
    Ordering,
    PrecisionError,
    VerifiedReal,
    ver_arith,
    ver_compare,
    ver_log,
    ver_sqrt,
)

from conftest import encloses, to_mpf

LOG_ALPHA = "0.481211825059603447497758913424368423135184334385660519661018"
LOG_PHI = "0.881373587019543025232609324979792309028160328261635410753296"
SQRT5 = "2.2360679774997896964091736687312762354406183596115257242709"
SQRT2 = "1.41421356237309504880168872420969807856967187537694807317668"


def exact(v):
    return VerifiedReal.exact(v)


def test_sqrt_perfect_square_is_exact():
    for bits in (16, 64, 192):
        s = ver_sqrt(4, bits)
        assert s.is_exact and s.lo == 2


@pytest.mark.parametrize("x, ref", [(5, SQRT5), (2, SQRT2)])
def test_sqrt_enclosure_and_width(oracle, x, ref):
    s = ver_sqrt(x, 64)
    assert encloses(s, mpmath.mpf(ref))
    assert s.width <= Fraction(3, 2 ** 64)


def test_sqrt_rejects_bad_input():
    with pytest.raises(ValueError):
        ver_sqrt(-1)
    with pytest.raises(ValueError):
        ver_sqrt(2, 8)


def test_log_of_one_is_zero():
    z = ver_log(exact(1))
    assert z.is_exact and z.lo == 0


@pytest.mark.parametrize("const, ref", [(rk.alpha, LOG_ALPHA), (rk.phi, LOG_PHI)])
def test_log_constants(oracle, const, ref):
    enc = ver_log(const(96), 96)
    assert encloses(enc, mpmath.mpf(ref))
    assert enc.width <= Fraction(1, 2 ** 96)


def test_log_rejects_nonpositive():
    with pytest.raises(ValueError):
        ver_log(VerifiedReal.from_bounds(-1, 1))
    with pytest.raises(ValueError):
        ver_log(exact(0))


def test_arith_examples(oracle):
    assert ver_arith(exact(1), exact(2), "add").lo == 3
    assert ver_arith(exact(1), exact(2), "add").hi == 3
    prod = ver_arith(VerifiedReal.from_bounds(Fraction(2, 5), Fraction(1, 2)), exact(2), "mul")
    assert prod.lo <= Fraction(4, 5) and prod.hi >= 1
    ratio = ver_arith(rk.log_alpha(96), rk.log_two(96), "div")
    assert encloses(ratio, mpmath.mpf("0.69424191363061730173879026689859522346356728522712971598099"))
    with pytest.raises(ZeroDivisionError):
        ver_arith(exact(1), VerifiedReal.from_bounds(-1, 1), "div")
    with pytest.raises(ValueError):
        ver_arith(exact(1), exact(1), "pow")


def test_compare_examples():
    assert ver_compare(VerifiedReal.from_bounds(1, 2), VerifiedReal.from_bounds(3, 4)) is Ordering.LESS
    assert ver_compare(VerifiedReal.from_bounds(3, 4), VerifiedReal.from_bounds(1, 2)) is Ordering.GREATER
    assert ver_compare(VerifiedReal.from_bounds(1, 3), VerifiedReal.from_bounds(2, 4)) is Ordering.OVERLAPPING
    digits = VerifiedReal.exact(Fraction(4812118251, 10 ** 10) * 2 ** 40 // 1 / 2 ** 40 + Fraction(1, 2 ** 40))
    assert ver_compare(ver_log(rk.alpha(96), 96), digits) is Ordering.LESS


def test_certainly_less_raises_on_overlap():
    with pytest.raises(PrecisionError):
        rk.certainly_less(VerifiedReal.from_bounds(1, 3), 2)


def test_retry_doubles_until_decided():
    calls = []

    def fn(bits):
        calls.append(bits)
        if bits < 800:
            raise PrecisionError("too coarse")
        return bits

    assert rk.with_precision_retry(fn, 100) == (800, 800)
    assert calls == [100, 200, 400, 800]
    with pytest.raises(PrecisionError):
        rk.with_precision_retry(fn, 100, max_doublings=1)


def test_decimal_bounds_are_outward():
    x = rk.log_alpha()
    lo, hi = rk.decimal_bounds(x, 12)
    assert Fraction(lo) <= x.lo and Fraction(hi) >= x.hi
    assert rk.decimal_bounds(exact(-3)) == ("-3", "-3")


def test_constants_satisfy_their_polynomials():
    a, f = rk.alpha(), rk.phi()
    assert (a * a - a - 1).contains(0)
    assert (f * f - f * 2 - 1).contains(0)


# -- randomized containment against a 4x precision oracle ------------------------------

def _random_rational(rng):
    return Fraction(rng.randint(-10 ** 12, 10 ** 12), rng.randint(1, 10 ** 9))


def run_containment(n_ops=1000, seed=20240601, bits=64):
    """Apply random operations and check the oracle value lies in each result."""
    rng = random.Random(seed)
    failures = []
    with mpmath.workprec(4 * bits + 64):
        for i in range(n_ops):
            op = rng.choice(["add", "sub", "mul", "div", "log", "sqrt", "pow"])
            a, b = _random_rational(rng), _random_rational(rng)
            A, B = VerifiedReal.enclose(a, bits), VerifiedReal.enclose(b, bits)
            ma, mb = to_mpf(a), to_mpf(b)
            if op == "log":
                a = abs(a) or Fraction(1, 3)
                got, want = ver_log(VerifiedReal.enclose(a, bits), bits), mpmath.log(to_mpf(a))
            elif op == "sqrt":
                n = rng.randint(0, 10 ** 30)
                got, want = ver_sqrt(n, bits), mpmath.sqrt(n)
            elif op == "pow":
                e = rng.randint(0, 12)
                got, want = A ** e, ma ** e
            elif op == "div":
                if b == 0:
                    continue
                got, want = ver_arith(A, B, op), ma / mb
            else:
                got = ver_arith(A, B, op)
                want = {"add": ma + mb, "sub": ma - mb, "mul": ma * mb}[op]
            if not encloses(got, want):
                failures.append((i, op, a, b))
    return failures


def test_containment_randomized():
    assert run_containment() == []


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=10 ** 9),
       st.sampled_from([32, 64, 128]))
def test_monotone_refinement_log(x, bits):
    coarse = ver_log(VerifiedReal.enclose(x, bits), bits)
    fine = ver_log(VerifiedReal.enclose(x, 2 * bits), 2 * bits)
    assert coarse.contains_interval(fine)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 40), st.sampled_from([16, 64, 160]))
def test_monotone_refinement_sqrt(n, bits):
    assert ver_sqrt(n, bits).contains_interval(ver_sqrt(n, 2 * bits))


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=-1000, max_value=1000), st.fractions(min_value=-1000, max_value=1000),
       st.sampled_from(["add", "sub", "mul"]))
def test_monotone_refinement_arith(a, b, op):
    coarse = ver_arith(VerifiedReal.enclose(a, 64), VerifiedReal.enclose(b, 64), op)
    fine = ver_arith(VerifiedReal.enclose(a, 128), VerifiedReal.enclose(b, 128), op)
    assert coarse.contains_interval(fine)


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=Fraction(1, 1000), max_value=10 ** 6),
       st.fractions(min_value=Fraction(1, 1000), max_value=10 ** 6))
def test_log_of_product_overlaps_sum_of_logs(x, y):
    X, Y = VerifiedReal.enclose(x), VerifiedReal.enclose(y)
    lhs = ver_log(X * Y)
    rhs = ver_log(X) + ver_log(Y)
    assert ver_compare(lhs, rhs) is Ordering.OVERLAPPING


def test_width_contract_for_constructors():
    for bits in (32, 96, 192):
        for x in (rk.log_alpha(bits), rk.log_phi(bits), ver_sqrt(5, bits), ver_log(10 ** 20, bits)):
            assert x.width <= Fraction(1, 2 ** bits) * max(1, abs(x.lo))


def test_exact_rejects_non_dyadic():
    with pytest.raises(ValueError):
        VerifiedReal.exact(Fraction(1, 3))
    with pytest.raises(ValueError):
        VerifiedReal(2, 1, 0)
