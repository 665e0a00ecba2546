import math
import random
from fractions import Fraction

import pytest

from flatlatt.catalog import NAMED, builtin
from flatlatt.errors import DegeneratePair, InsufficientData
from flatlatt.numeric import Ordering, certified_compare, sqrt_scalar
from flatlatt.surface_geom import (alpha_bounds, apply_matrix, cylinder_data,
                                   enumerate_saddle_connections, holonomy_set,
                                   min_virtual_triangle, standardize, wedge_spectrum)
from flatlatt.tv_construct import parabolic_generators


def primitive_vectors(L2):
    """Brute-force oracle: primitive integer vectors of squared length <= L2."""
    n = math.isqrt(int(L2)) + 1
    return {(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
            if (x, y) != (0, 0) and math.gcd(x, y) == 1 and x * x + y * y <= L2}


@pytest.mark.parametrize("L2,count", [(1, 4), (2, 8), (5, 16), (9, 16)])
def test_torus_matches_primitive_vectors(L2, count):
    s = builtin("M1")
    conns = enumerate_saddle_connections(s, Fraction(L2))
    hols = {sc.hol for sc in conns}
    assert hols == primitive_vectors(L2)
    assert len(conns) == count
    assert (2, 0) not in hols


def test_two_strip_half_connections():
    s = builtin("M3")
    conns = enumerate_saddle_connections(s, Fraction(1, 4))
    assert len(conns) == 4
    half = Fraction(1, 2)
    assert {sc.hol for sc in conns} == {(half, 0), (-half, 0)}
    # each joins the two marked points
    assert all(sc.from_class != sc.to_class for sc in conns)


@pytest.mark.parametrize("name", list(NAMED))
def test_closed_under_negation(name):
    s = builtin(name)
    pre = [sc.pre_hol for sc in enumerate_saddle_connections(s, Fraction(4))]
    from collections import Counter
    c = Counter(pre)
    for v, k in c.items():
        assert c[(-v[0], -v[1])] == k


@pytest.mark.parametrize("name", list(NAMED))
def test_lengths_within_bound_and_sorted(name):
    s = builtin(name)
    L2 = Fraction(9)
    conns = enumerate_saddle_connections(s, L2)
    lens = [sc.len2 for sc in conns]
    assert all(x <= L2 for x in lens)
    assert lens == sorted(lens)
    assert all(sc.len2 == s.len2(sc.pre_hol) for sc in conns)


def test_lshape_holonomies_invariant_under_parabolics():
    # Veech group elements permute holonomies; check the horizontal and vertical shears
    s = builtin("LSHAPE3")
    (h, v) = parabolic_generators(s)
    r = sqrt_scalar(s.yscale2 / s.xscale2)
    assert r == 2
    small = holonomy_set(s, Fraction(1))
    big = set(holonomy_set(s, Fraction(8)))
    for x, y in small:
        assert (x + h[0][1] * r * y, y) in big
        assert (x, y + v[1][0] * x / r) in big


def test_min_virtual_triangle_values():
    assert tuple(min_virtual_triangle(builtin("M1"), Fraction(4))) == (1, True)
    assert tuple(min_virtual_triangle(builtin("M3"), Fraction(4))) == (Fraction(1, 2), True)
    assert tuple(min_virtual_triangle(builtin("LSHAPE3"), Fraction(4))) == (Fraction(1, 3), True)


def test_min_virtual_triangle_needs_two_directions():
    with pytest.raises(InsufficientData):
        min_virtual_triangle(builtin("M3"), Fraction(1, 4))


def test_wedge_spectrum_of_torus():
    assert wedge_spectrum(builtin("M1"), Fraction(9), count=3) == [1, 2, 3]


@pytest.mark.parametrize("name,alpha", [("M1", Fraction(1, 2)), ("M3", Fraction(1, 4)),
                                        ("T3", Fraction(1, 6)), ("LSHAPE3", Fraction(1, 6))])
def test_alpha_brackets(name, alpha):
    br = alpha_bounds(builtin(name), Fraction(9))
    assert br.lo == br.hi == alpha
    assert br.exact == alpha


def test_cylinder_data_torus():
    cd = cylinder_data(builtin("M1"), "horizontal")
    (c,) = cd.cylinders
    assert (c.height, c.circumference, c.inverse_modulus, c.area) == (1, 1, 1, 1)
    assert cd.twists == (1,)


def test_cylinder_data_lshape():
    cd = cylinder_data(builtin("LSHAPE3"), "horizontal")
    big, small = cd.cylinders
    for c in (big, small):
        assert c.height.lo ** 2 <= Fraction(1, 3) <= c.height.hi ** 2
    assert (big.inverse_modulus, big.area) == (2, Fraction(2, 3))
    assert (small.inverse_modulus, small.area) == (1, Fraction(1, 3))
    for c, k in ((big, 2), (small, 1)):
        lo, hi = c.circumference.lo, c.circumference.hi
        assert lo * lo <= Fraction(k * k, 3) <= hi * hi
    assert cd.twists == (1, 2)


def test_cylinder_data_two_strip():
    cd = cylinder_data(builtin("M3"), "horizontal")
    (c,) = cd.cylinders
    assert (c.height, c.circumference, c.inverse_modulus, c.area) == (1, 1, 1, 1)
    assert cd.twists == (1,)


def _mat_eq(g, expected):
    for row, erow in zip(g, expected):
        for a, b in zip(row, erow):
            assert certified_compare(a, b) == Ordering.EQ or a == b


def test_standardize_identity():
    assert standardize(None, (1, 0), (0, 1)) == ((1, 0), (0, 1))


def test_standardize_diagonal():
    g = standardize(None, (Fraction(2), 0), (0, Fraction(1, 2)))
    assert g == ((Fraction(1, 2), 0), (0, 2))
    assert apply_matrix(g, (2, 0)) == (1, 0)
    assert apply_matrix(g, (0, Fraction(1, 2))) == (0, 1)


def test_standardize_diagonal_rotation():
    g = standardize(None, (1, 1), (-1, 1))
    # (1/sqrt 2) [[1, 1], [-1, 1]]: rotation by -45 degrees
    for a, e in zip((g[0][0], g[0][1], g[1][0], g[1][1]), (1, 1, -1, 1)):
        assert abs(float(a) - e / math.sqrt(2)) < 1e-15
    x = apply_matrix(g, (1, 1))
    assert abs(float(x[0]) - math.sqrt(2)) < 1e-15 and float(x[1]) == 0


def test_standardize_random_pairs_have_unit_determinant():
    rng = random.Random(7)
    for _ in range(50):
        a = (Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        b = (Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        det = a[0] * b[1] - a[1] * b[0]
        if det == 0:
            with pytest.raises(DegeneratePair):
                standardize(None, a, b)
            continue
        g = standardize(None, a, b)
        d = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        assert abs(float(d) - 1) < 1e-12
        ga, gb = apply_matrix(g, a), apply_matrix(g, b)
        assert abs(float(ga[1])) < 1e-12 and abs(float(gb[0])) < 1e-12
        assert abs(float(ga[0]) - abs(float(gb[1]))) < 1e-9


def test_wedge_invariant_under_sl2():
    rng = random.Random(11)
    s = builtin("LSHAPE3")
    hols = [sc.pre_hol for sc in enumerate_saddle_connections(s, Fraction(4))]
    for _ in range(20):
        a, b, c = rng.randint(-3, 3), rng.randint(1, 3), rng.randint(-3, 3)
        # [[a, b], [c, d]] with ad - bc = 1 when solvable
        if (1 + b * c) % a if a else True:
            continue
        g = ((a, b), (c, (1 + b * c) // a))
        for v, w in zip(hols, hols[1:]):
            gv, gw = apply_matrix(g, v), apply_matrix(g, w)
            assert s.wedge(gv, gw) == s.wedge(v, w)


def test_corner_classes_match_singularities():
    from flatlatt.combinat import enumerate_diagrams
    from flatlatt.surface_geom import RectangleSurface
    for l in (1, 2, 3, 4):
        for d in enumerate_diagrams(l):
            one = (Fraction(1),) * l
            s = RectangleSurface(d, one, one, 1, 1, 1)
            assert len(s.corner_cycles) == s.profile.num_points
            assert sum(len(c) for c in s.corner_cycles) == l
