from fractions import Fraction

import mpmath
import pytest

from dforge import realkit as rk
from dforge.bakerkit import gamma_lucas
from dforge.cfkit import (
    ExpansionError,
    LegendreGate,
    convergents,
    expand_until,
    legendre_is_convergent,
    legendre_lower_bound,
)
from dforge.realkit import VerifiedReal, as_computable
from dforge.redkit import delta_pell


def test_alpha_to_100():
    cf, gate = expand_until(rk.alpha, 100)
    assert cf.quotients == [1] * len(cf.quotients)
    assert cf.denominators()[-1] == 144
    assert cf.denominators()[-2] <= 100
    assert gate.J == 1 and gate.N == cf.N


def test_phi_to_100():
    cf, gate = expand_until(rk.phi, 100)
    assert cf.quotients == [2] * len(cf.quotients)
    assert cf.denominators() == [1, 2, 5, 12, 29, 70, 169]
    assert gate.J == 2


@pytest.mark.parametrize("const, head, period", [
    (rk.alpha, 1, 1),
    (rk.phi, 2, 2),
    (rk.sqrt2, 1, 2),
    (rk.sqrt5, 2, 4),
])
def test_periodic_expansions(const, head, period):
    qs = [c.a for c in convergents(const(512))][:50]
    assert len(qs) == 50
    assert qs == [head] + [period] * 49


@pytest.mark.parametrize("const", [rk.alpha, rk.phi, rk.sqrt2, rk.sqrt5, rk.log_alpha])
def test_convergent_identities(const, oracle):
    cf, _ = expand_until(const, 10 ** 30)
    assert cf.check_recurrence()
    assert cf.check_determinants()
    x = const(1024)
    # successive convergents alternate around x and bracket it
    for (p0, q0), (p1, q1) in zip(cf.convergents, cf.convergents[1:]):
        lo, hi = sorted((Fraction(p0, q0), Fraction(p1, q1)))
        assert lo <= x.lo and x.hi <= hi


def test_quotients_stable_under_doubling():
    comp = gamma_lucas(7)
    cf, _ = expand_until(comp, 10 ** 20, bits=96)
    cf2, _ = expand_until(comp, 10 ** 20, bits=192)
    assert cf.quotients == cf2.quotients
    assert cf.stable_at_bits >= 96


def test_convergents_match_mpmath(oracle):
    x = mpmath.log(3) / mpmath.log((1 + mpmath.sqrt(5)) / 2)
    cf, _ = expand_until(gamma_lucas(2), 10 ** 25)
    ref = []
    for _ in cf.quotients:
        a = int(mpmath.floor(x))
        ref.append(a)
        x = 1 / (x - a)
    assert cf.quotients == ref


def test_legendre_examples_for_alpha():
    assert legendre_is_convergent(rk.alpha, 1, 1) is False
    assert legendre_is_convergent(rk.alpha, 2, 1) is True
    assert legendre_is_convergent(rk.alpha, 3, 2) is True
    assert legendre_is_convergent(rk.alpha, 13, 8) is True
    assert legendre_is_convergent(rk.alpha, 5, 4) is False


def test_legendre_hits_are_convergents():
    cf, _ = expand_until(rk.alpha, 50)
    convs = set(cf.convergents)
    for q in range(1, 50):
        for p in range(q, 2 * q + 1):
            if legendre_is_convergent(rk.alpha, p, q):
                assert (p, q) in convs


def test_legendre_lower_bounds():
    _, gate_a = expand_until(rk.alpha, 100)
    _, gate_p = expand_until(rk.phi, 100)
    assert legendre_lower_bound(gate_a, 10).contains(Fraction(1, 300))
    assert legendre_lower_bound(gate_p, 10).contains(Fraction(1, 400))
    _, gate = expand_until(gamma_lucas(2), 1000)
    assert legendre_lower_bound(gate, 1000).contains(Fraction(1, (gate.J + 2) * 10 ** 6))
    with pytest.raises(ValueError):
        legendre_lower_bound(gate, 1001)
    with pytest.raises(ValueError):
        legendre_lower_bound(LegendreGate(10, 3, 2), 0)


def test_delta_12_reaches_q15():
    cf, gate = expand_until(delta_pell(12), 706129)
    assert cf.N == 15
    assert cf.denominators()[-1] == 706130
    assert gate.S == 706129


def test_fixed_wide_enclosure_fails():
    wide = VerifiedReal.from_bounds(Fraction(141, 100), Fraction(142, 100))
    with pytest.raises(ExpansionError):
        expand_until(wide, 10 ** 6)
    with pytest.raises(ExpansionError):
        legendre_is_convergent(wide, 7, 5)


def test_rational_input_fails():
    five_quarters = as_computable(VerifiedReal.exact(Fraction(5, 4)))
    with pytest.raises(ExpansionError):
        expand_until(five_quarters, 1000)
    with pytest.raises(ValueError):
        expand_until(rk.alpha, 0)
