from fractions import Fraction

import pytest

from flatlatt.catalog import DOCUMENTED_ONLY, NAMED, builtin, names, verify_bottom_of_spectrum
from flatlatt.combinat import CylinderDiagram
from flatlatt.errors import UnknownName, VerificationFailure
from flatlatt.tv_construct import TVData, build_surface


@pytest.mark.parametrize("name,g,points,gam,alpha", [
    ("M1", 1, 1, 2, Fraction(1, 2)),
    ("M3", 1, 2, 4, Fraction(1, 4)),
    ("T3", 1, 3, 6, Fraction(1, 6)),
    ("LSHAPE3", 2, 1, 6, Fraction(1, 6)),
])
def test_builtin_invariants(name, g, points, gam, alpha):
    s = builtin(name)
    assert (s.genus, s.num_points(), s.gamma) == (g, points, gam)
    assert s.area() == 1
    ns = NAMED[name]
    assert (ns.genus, ns.num_points, ns.tau_over_pi, ns.alpha) == (g, points, gam, alpha)


def test_names_and_unknown():
    assert names() == ["M1", "M3", "T3", "LSHAPE3"]
    with pytest.raises(UnknownName):
        builtin("pillowcase")
    assert "pillowcase" in DOCUMENTED_ONLY


def test_two_strip_coordinates():
    # two 1/2 x 1 rectangles; the second marked point sits at (1/2, 0)
    s = builtin("M3")
    assert s.widths == (Fraction(1, 2), Fraction(1, 2))
    assert s.heights == (1, 1)


@pytest.mark.parametrize("name", list(NAMED))
def test_verify_passes_on_builtins(name):
    rep = verify_bottom_of_spectrum(builtin(name), "3")
    assert all(rep["checks"].values())
    assert rep["alpha_exact"] == rep["pi_over_tau"]
    assert rep["beta_certified"]


def test_verify_reports_counterexample():
    # the golden L-shape is a lattice surface, but parallel connections differ in length
    tv = TVData(CylinderDiagram.parse("l=3; r=(1 2)(3); u=(1 3)(2)"), (1, 1), (1, 1))
    with pytest.raises(VerificationFailure) as info:
        verify_bottom_of_spectrum(build_surface(tv), Fraction(4))
    assert "parallel" in str(info.value)
    assert len(info.value.counterexample["hol"]) == 2


@pytest.mark.parametrize("name", list(NAMED))
def test_building_named_tvdata_reproduces_invariants(name):
    # M3 and T3 are stored in strip coordinates; the built surface differs by a diagonal map
    ns = NAMED[name]
    s = build_surface(ns.tvdata)
    assert (s.genus, s.num_points(), s.gamma) == (ns.genus, ns.num_points, ns.tau_over_pi)
    rep = verify_bottom_of_spectrum(s, Fraction(9))
    assert rep["alpha_exact"] == str(ns.alpha)
