import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatlatt.bounds import (alpha_lower_from_beta, bounds_report, cardinality_and_coarea,
                             divisor_pair_count, max_cylinders, nst_nsvt_convert, phi,
                             phi_by_enumeration, rectangle_caps, shortest_sc_cap,
                             twist_count_bound, twist_factor, twist_ratio_cap,
                             uniform_ratio_bound)
from flatlatt.catalog import NAMED, builtin
from flatlatt.combinat import pi_multiple
from flatlatt.errors import DomainError
from flatlatt.numeric import Ordering, certified_compare, to_interval
from flatlatt.surface_geom import alpha_bounds, min_virtual_triangle


def close(x, target, tol=1e-12):
    iv = to_interval(x)
    return abs(float(iv.lo) - target) <= tol * max(1, abs(target)) and \
        abs(float(iv.hi) - target) <= tol * max(1, abs(target))


def test_uniform_ratio_bound_examples():
    assert uniform_ratio_bound(Fraction(1, 2), 1) == 1
    assert uniform_ratio_bound(Fraction(1, 6), 2) == 3
    assert uniform_ratio_bound(Fraction(1, 4), 2) == 2


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=Fraction(1, 50), max_value=2), st.integers(1, 5))
def test_uniform_ratio_bound_at_least_one(alpha, r):
    # s bounds a ratio of moduli, so it is never below 1 in the stated range
    s = uniform_ratio_bound(alpha, r)
    target = min(math.exp(1 / (2 * float(alpha) * math.e)),
                 (2 * (r - 1) * float(alpha)) ** (1 - r)) if r > 1 else 1.0
    assert close(s, target, 1e-9)


def test_twist_count_examples():
    assert twist_count_bound(1, Fraction(1, 3)) == 1
    assert twist_count_bound(1, Fraction(1, 16), safe_constants=True) == 1
    assert close(twist_count_bound(2, Fraction(1, 16)), 4 * (1 + 2 * math.log(2)))
    assert close(twist_count_bound(3, Fraction(1, 16)), 16 * (1 + 2 * math.log(2)) ** 2)


def test_twist_factor_domain():
    with pytest.raises(DomainError):
        twist_factor(Fraction(9, 20))
    assert twist_factor(Fraction(1, 8)) == 1
    # safe factor counts pairs pq <= 1/(4 beta^2)
    assert twist_factor(Fraction(9, 20), safe_constants=True) == divisor_pair_count(Fraction(100, 81))


def test_divisor_pair_count_oracle():
    for K in range(0, 60):
        brute = sum(1 for p in range(1, K + 1) for q in range(1, K + 1) if p * q <= K)
        assert divisor_pair_count(K) == brute


def test_twist_count_monotone_in_beta():
    vals = [twist_count_bound(3, Fraction(1, k)) for k in (8, 10, 12, 16, 24)]
    for a, b in zip(vals, vals[1:]):
        assert certified_compare(a, b) == Ordering.LT


def test_twist_ratio_cap_examples():
    assert twist_ratio_cap(Fraction(1, 8)) == 1
    assert twist_ratio_cap(Fraction(1, 16)) == 4
    assert twist_ratio_cap(Fraction(1)) == Fraction(1, 64)
    assert twist_ratio_cap(Fraction(1, 3), safe_constants=True) == Fraction(9, 4)


def test_rectangle_caps_examples():
    assert rectangle_caps(Fraction(1, 4), pi_multiple(2)).standard_form == 4
    caps = rectangle_caps(Fraction(1, 3), pi_multiple(6))
    assert close(caps.area_estimate, 3 / math.pi)
    assert rectangle_caps(Fraction(1, 2), pi_multiple(2), Fraction(1, 2)).pair == 2
    with pytest.raises(DomainError):
        rectangle_caps(Fraction(1, 4), pi_multiple(2), Fraction(1, 2))


def test_shortest_sc_cap_examples():
    assert close(shortest_sc_cap(pi_multiple(2)), math.sqrt(1 / math.pi))
    assert close(shortest_sc_cap(pi_multiple(2), safe_constants=True), math.sqrt(4 / math.pi))
    assert close(shortest_sc_cap(pi_multiple(6)), math.sqrt(1 / (3 * math.pi)))


def test_nst_nsvt_examples():
    conv = nst_nsvt_convert(Fraction(1, 2), r=1)
    assert certified_compare(conv["beta_prop"], 1) == Ordering.EQ or conv["beta_prop"] == 1
    assert conv["as_stated"]["nsvt_beta"] == Fraction(1, 4)
    assert alpha_lower_from_beta(Fraction(1, 2), safe_constants=True) == Fraction(1, 4)
    assert close(conv["beta_theorem"], math.exp(-1 / math.e))


@pytest.mark.parametrize("name", list(NAMED))
def test_derived_safe_conversion_on_builtins(name):
    # alpha(M) >= beta(M)/2 with equality on the simplest surfaces
    s = builtin(name)
    vt = min_virtual_triangle(s, Fraction(9))
    br = alpha_bounds(s, Fraction(9), vt)
    assert alpha_lower_from_beta(vt.value, safe_constants=True) == br.exact
    # the stated factor would give alpha >= 2 beta > pi/tau, a contradiction
    assert alpha_lower_from_beta(vt.value, safe_constants=False) > Fraction(1, s.gamma)


def test_max_cylinders_examples():
    assert max_cylinders(1, 1, 0)[0] == 1
    assert max_cylinders(2, 1, 0)[0] == 2
    assert max_cylinders(1, 2, 0)[0] == 2
    assert max_cylinders(2, 1, 0)[1] == 3
    with pytest.raises(DomainError):
        max_cylinders(0, 0, 0)


@pytest.mark.parametrize("E", [1, 2, 3, Fraction(5, 2)])
def test_phi_matches_enumeration(E):
    for l in range(1, 6):
        assert phi(l, Fraction(E)) == phi_by_enumeration(l, E)


def _rising(x, n):
    out = Fraction(1)
    for k in range(n):
        out *= x + k
    return out


def _card_oracle(l_max, E):
    """Sum of Phi(l)/(l-1)! from the rising-factorial identity for all pairs."""
    a = [Fraction(1)] + [_rising(E, n) ** 2 for n in range(1, l_max + 1)]
    c = [Fraction(0)] * (l_max + 1)
    for n in range(1, l_max + 1):
        c[n] = a[n] - sum(math.comb(n - 1, k - 1) * c[k] * a[n - k] for k in range(1, n))
    return sum(c[l] / (E * E) / math.factorial(l - 1) for l in range(1, l_max + 1))


def test_cardinality_small_beta_trivial():
    for beta in (Fraction(1), Fraction(9, 10)):
        assert cardinality_and_coarea(beta, include_coarea=False).cardinality == 1
        assert cardinality_and_coarea(beta, True, include_coarea=False).cardinality == 1


def test_cardinality_as_stated_undefined_at_045():
    cc = cardinality_and_coarea(Fraction(9, 20), include_coarea=False)
    assert cc.cardinality is None and "cardinality" in cc.errors
    safe = cardinality_and_coarea(Fraction(9, 20), True, include_coarea=False)
    assert safe.cardinality == 4


@pytest.mark.parametrize("beta", [Fraction(9, 20), Fraction(3, 10), Fraction(1, 4), Fraction(1, 8)])
def test_safe_cardinality_matches_oracle(beta):
    E = twist_factor(beta, safe_constants=True)
    cc = cardinality_and_coarea(beta, True, include_coarea=False)
    assert cc.cardinality == _card_oracle(math.floor(1 / beta), E)


def test_cardinality_pinned_at_one_sixteenth():
    beta = Fraction(1, 16)
    safe = cardinality_and_coarea(beta, True, include_coarea=False)
    assert safe.cardinality == 195078477748794966529853265339911415565871274
    stated = cardinality_and_coarea(beta, False, include_coarea=False).cardinality
    mpmath.mp.dps = 60
    E = 4 * (1 + 2 * mpmath.log(2))
    a = [mpmath.mpf(1)] + [mpmath.rf(E, n) ** 2 for n in range(1, 17)]
    c = [mpmath.mpf(0)] * 17
    for n in range(1, 17):
        c[n] = a[n] - sum(math.comb(n - 1, k - 1) * c[k] * a[n - k] for k in range(1, n))
    ref = sum(c[l] / E ** 2 / math.factorial(l - 1) for l in range(1, 17))
    iv = to_interval(stated)
    assert float(iv.lo) <= float(ref) * (1 + 1e-12) and float(iv.hi) >= float(ref) * (1 - 1e-12)
    assert abs(float(iv.mid) / float(ref) - 1) < 1e-9


def test_cardinality_monotone():
    vals = [cardinality_and_coarea(b, True, include_coarea=False).cardinality
            for b in (Fraction(9, 10), Fraction(9, 20), Fraction(3, 10), Fraction(1, 4))]
    assert vals == sorted(vals)


def test_coarea_has_pi_factor():
    cc = cardinality_and_coarea(Fraction(1), True)
    # l <= 2/beta^2 = 2: 1 + Phi(2)/1!, with the safe factor E = 0 at beta = 1
    E = twist_factor(Fraction(1), safe_constants=True)
    assert E == 0
    assert close(cc.coarea, 2 * math.pi * float(1 + phi(2, E)))


def test_bounds_report_shape():
    rep = bounds_report(alpha=Fraction(1, 2), r=1)
    assert rep["as_stated"]["s"] == "1"
    rep = bounds_report(beta=Fraction(1, 8), r=2, tau=pi_multiple(2), g=1, i=1)
    assert rep["as_stated"]["pq_cap"] == "1"
    assert rep["safe"]["pq_cap"] == "16"
    assert rep["as_stated"]["max_cylinders"]["refined"] == 1
