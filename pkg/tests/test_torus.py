from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crystdual.builtins import BUILTINS, builtin, hantzsche_wendt
from crystdual.errors import InfiniteFixedLocus
from crystdual.torus import Character, Monomial, act, fixed_points, orbit, stabilizer

HW = hantzsche_wendt()
GRID = 6

angles = st.lists(st.integers(0, 11).map(lambda k: Fraction(k, 12)), min_size=3, max_size=3)


def conjugation_oracle(group, h, chi, m):
    """Value of h.chi at m computed by conjugating the translation m by a lift of h."""
    t = group.translation(m)
    c = group.conjugate(group.lift(h), t)
    return chi.value(group.lattice_vector(c))


@settings(max_examples=100, deadline=None)
@given(angles, st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_action_matches_conjugation(theta, m):
    chi = Character.from_angles(theta)
    for h in HW.holonomy.labels:
        assert act(HW, h, chi).value(m) == conjugation_oracle(HW, h, chi, m)


def test_symbolic_action_matches_conjugation():
    chi = Character.parse("(u,v,w)")
    for h in HW.holonomy.labels:
        for m in product(range(-1, 2), repeat=3):
            assert act(HW, h, chi).value(m) == conjugation_oracle(HW, h, chi, m)


@settings(max_examples=60, deadline=None)
@given(angles)
def test_action_is_a_group_action(theta):
    chi = Character.from_angles(theta)
    H = HW.holonomy
    for h1, h2 in product(H.labels, repeat=2):
        composed = act(HW, h2, act(HW, h1, chi))
        # right action for chi' = chi o A_h
        assert composed.same_point(act(HW, H.mul(h1, h2), chi))


def brute_fixed(group, n=GRID):
    pts = []
    for ks in product(range(n), repeat=group.rank):
        chi = Character.from_angles([Fraction(k, n) for k in ks])
        if all(act(group, h, chi).same_point(chi) for h in group.holonomy.labels):
            pts.append(chi)
    return pts


@pytest.mark.parametrize("name", ["hantzsche-wendt", "reflection-line"])
def test_fixed_points_against_grid(name):
    G = builtin(name)
    found = {c.coords for c in fixed_points(G)}
    grid = {c.coords for c in brute_fixed(G)}
    # every fixed point is fixed, and the grid search (which contains all 2- and 3-torsion) agrees
    assert grid <= found
    for c in fixed_points(G):
        assert all(act(G, h, c).same_point(c) for h in G.holonomy.labels)
        if all((6 * m.angle) % 1 == 0 for m in c.coords):
            assert c.coords in grid


def test_hw_fixed_points_are_sign_vectors():
    pts = fixed_points(HW)
    assert len(pts) == 8
    assert {tuple(m.angle for m in c.coords) for c in pts} == set(product((0, Fraction(1, 2)), repeat=3))


@pytest.mark.parametrize("name", ["klein-bottle", "z", "z2", "split-plane", "dicosm", "tricosm", "hexacosm"])
def test_positive_dimensional_fixed_locus(name):
    with pytest.raises(InfiniteFixedLocus):
        fixed_points(builtin(name))


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_orbit_stabilizer_on_grid(name):
    G = builtin(name)
    order = len(G.holonomy)
    for ks in product(range(4), repeat=G.rank):
        chi = Character.from_angles([Fraction(k, 4) for k in ks])
        assert len(orbit(G, chi)) * len(stabilizer(G, chi).labels) == order


@pytest.mark.parametrize("text", ["(u,1,1)", "(1,v,1)", "(1,1,w)", "(u,v,w)", "(u,-1,1)", "(u,u,1)", "(1,v,-1)"])
def test_orbit_stabilizer_on_strata(text):
    chi = Character.parse(text)
    assert len(orbit(HW, chi)) * len(stabilizer(HW, chi).labels) == len(HW.holonomy)


def test_monomial_algebra():
    u = Monomial.symbol("u")
    assert (u * u.conj()).is_one
    assert Monomial.root(Fraction(1, 2)) ** 2 == Monomial()
    assert Monomial.parse("conj(u)*w") == u.conj() * Monomial.symbol("w")
    assert Monomial.parse("-1") == Monomial.root(Fraction(1, 2))
    assert Monomial.parse("i").evaluate({}) == pytest.approx(1j)
