import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatlatt.combinat import (CylinderDiagram, Permutation, SingularityProfile, canonicalize,
                               canonicalize_exhaustive, count_transitive_pairs, cycles,
                               enumerate_diagrams, gamma, genus_and_tau, is_transitive,
                               orbit_size, relabel, singularity_profile)
from flatlatt.errors import InvalidPermutation
from flatlatt.combinat import pi_multiple
from flatlatt.numeric import Ordering, certified_compare


def D(text):
    return CylinderDiagram.parse(text)


def test_cycles_examples():
    assert cycles(Permutation.identity(3)) == [(0,), (1,), (2,)]
    assert cycles(Permutation.from_one_based([2, 1, 3])) == [(0, 1), (2,)]
    assert cycles(Permutation.from_one_based([2, 3, 1])) == [(0, 1, 2)]


def test_transitivity_examples():
    assert is_transitive(D("l=1; r=(1); u=(1)"))
    assert is_transitive(D("l=2; r=(1 2); u=(1)(2)"))
    assert not is_transitive(D("l=2; r=(1)(2); u=(1)(2)"))


def test_profile_examples():
    assert singularity_profile(D("l=1; r=(1); u=(1)")).multipliers == (1,)
    assert singularity_profile(D("l=2; r=(1 2); u=(1)(2)")).multipliers == (1, 1)
    assert singularity_profile(D("l=3; r=(1 2)(3); u=(1 3)(2)")).multipliers == (3,)


def test_drop_marked():
    d = D("l=2; r=(1 2); u=(1)(2)")
    assert singularity_profile(d, drop_marked=True).multipliers == (1,)
    assert singularity_profile(D("l=3; r=(1 2)(3); u=(1 3)(2)"), True).multipliers == (3,)


@pytest.mark.parametrize("ks,g,gam", [((1,), 1, 2), ((1, 1), 1, 4), ((3,), 2, 6), ((2, 2), 2, 8)])
def test_genus_and_tau(ks, g, gam):
    prof = SingularityProfile(ks)
    gg, tau = genus_and_tau(prof)
    assert gg == g
    assert gamma(prof) == gam
    assert certified_compare(tau, pi_multiple(gam)) == Ordering.EQ
    # tau / pi = 2(2g - 2 + |Sigma|)
    assert gam == 2 * (2 * g - 2 + prof.num_points)


def test_parse_print_roundtrip():
    for text in ("l=1; r=(1); u=(1)", "l=3; r=(1 2)(3); u=(1 3)(2)", "l=4; r=(1 2 3 4); u=(1 3)(2)(4)"):
        d = D(text)
        assert D(str(d)) == d


@pytest.mark.parametrize("bad", ["l=2; r=(1 2); u=(1 1)", "l=2; r=(1 2)", "l=2; r=1 2; u=(1)(2)",
                                 "l=2; r=(1 3); u=(1)(2)"])
def test_parse_rejects(bad):
    with pytest.raises(InvalidPermutation):
        D(bad)


def test_canonicalize_trivial():
    c = canonicalize(D("l=1; r=(1); u=(1)"))
    assert c.stabilizer_order == 1


def test_canonicalize_two_strip_stabilizer():
    c = canonicalize(D("l=2; r=(1 2); u=(1)(2)"), ((1,), (1, 1)))
    assert c.stabilizer_order == 2


def test_canonicalize_relabeled_copy():
    a = canonicalize(D("l=3; r=(1 2)(3); u=(1 3)(2)"))
    b = canonicalize(D("l=3; r=(1 3)(2); u=(1 2)(3)"))
    assert a.key == b.key


def _orbit(r, u):
    l = len(r)
    out = set()
    for pi in itertools.permutations(range(l)):
        pi = Permutation(pi)
        out.add((tuple(r.conjugate(pi)), tuple(u.conjugate(pi))))
    return frozenset(out)


def _oracle_diagram_count(l):
    perms = [Permutation(p) for p in itertools.permutations(range(l))]
    orbits = set()
    for r in perms:
        for u in perms:
            if is_transitive(CylinderDiagram(r, u)):
                orbits.add(_orbit(r, u))
    return len(orbits)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_enumerate_diagrams_matches_orbit_oracle(l):
    assert len(enumerate_diagrams(l)) == _oracle_diagram_count(l)


def test_small_diagram_counts():
    assert [len(enumerate_diagrams(l)) for l in (1, 2, 3)] == [1, 3, 7]


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_orbit_stabilizer(l):
    total = sum(orbit_size(d) for d in enumerate_diagrams(l))
    assert total == count_transitive_pairs(l)


@pytest.mark.parametrize("l", [3, 4])
def test_bfs_and_exhaustive_partitions_agree(l):
    perms = [Permutation(p) for p in itertools.permutations(range(l))]
    bfs, exh = {}, {}
    for r in perms:
        for u in perms:
            d = CylinderDiagram(r, u)
            if not is_transitive(d):
                continue
            bfs.setdefault(canonicalize(d).key, set()).add((r, u))
            c = canonicalize_exhaustive(d)
            exh.setdefault(c.key, set()).add((r, u))
            assert c.stabilizer_order == canonicalize(d).stabilizer_order
    assert sorted(map(frozenset, bfs.values()), key=sorted) == \
        sorted(map(frozenset, exh.values()), key=sorted)


@st.composite
def transitive_diagrams(draw):
    l = draw(st.integers(1, 6))
    while True:
        r = Permutation(draw(st.permutations(range(l))))
        u = Permutation(draw(st.permutations(range(l))))
        d = CylinderDiagram(r, u)
        if is_transitive(d):
            return d


@settings(max_examples=100, deadline=None)
@given(transitive_diagrams(), st.data())
def test_profile_and_canonical_form_invariant_under_relabeling(d, data):
    pi = Permutation(data.draw(st.permutations(range(d.l))))
    nd, _ = relabel(d, pi)
    assert singularity_profile(nd) == singularity_profile(d)
    assert canonicalize(nd).key == canonicalize(d).key
    prof = singularity_profile(d)
    assert sum(prof.multipliers) == d.l
    g, _tau = genus_and_tau(prof)
    assert gamma(prof) == 2 * (2 * g - 2 + prof.num_points)


def test_factorial_bound_on_stabilizer():
    for d in enumerate_diagrams(4):
        s = canonicalize(d).stabilizer_order
        assert math.factorial(4) % s == 0 and s <= 4
