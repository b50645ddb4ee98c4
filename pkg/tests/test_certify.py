import dataclasses
import random
from math import gcd

import pytest

from helpers import random_element
from crystdual.builtins import BUILTINS, builtin, hantzsche_wendt, klein_bottle
from crystdual.certify import (
    Base,
    Step,
    build_phi,
    certify_cyclic,
    cyclic_data,
    gen_lift,
    render_tree,
    transfer,
    transfer_on_lattice,
    verify_certificate,
)
from crystdual.errors import NonCyclicHolonomy, NotAGenerator, NotTorsionFree

CERTIFIABLE = ["z", "z2", "z3", "root-line", "klein-bottle", "split-plane",
               "dicosm", "tricosm", "tetracosm", "hexacosm", "first-amphicosm"]


def unit_lifts(a, b, y):
    """Search all residues mod ab for units reducing to y mod b."""
    return {x for x in range(a * b) if gcd(x, a * b) == 1 and x % b == y % b}


def test_gen_lift_exhaustive_small():
    for a in range(1, 25):
        for b in range(1, 25):
            for y in range(b):
                if gcd(y, b) != 1:
                    with pytest.raises(NotAGenerator):
                        gen_lift(a, b, y)
                    continue
                assert gen_lift(a, b, y) in unit_lifts(a, b, y), (a, b, y)


def test_gen_lift_rejects_bad_input():
    with pytest.raises(NotAGenerator):
        gen_lift(0, 3, 1)
    with pytest.raises(NotAGenerator):
        gen_lift(2, 6, 4)


def test_gen_lift_reduces_negative_y():
    assert gen_lift(3, 5, -1) % 5 == 4


@pytest.mark.parametrize("name", ["hantzsche-wendt", "klein-bottle", "dicosm", "tricosm", "hexacosm", "first-amphicosm"])
def test_transfer_is_a_homomorphism(name):
    G = builtin(name)
    rng = random.Random(1)
    for _ in range(60):
        g, h = random_element(G, rng), random_element(G, rng)
        assert transfer(G, G.mul(g, h)) == tuple(x + y for x, y in zip(transfer(G, g), transfer(G, h)))


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_transfer_closed_form_on_lattice(name):
    G = builtin(name)
    rng = random.Random(2)
    for _ in range(20):
        v = tuple(rng.randint(-3, 3) for _ in range(G.rank))
        assert transfer(G, G.translation(v)) == transfer_on_lattice(G, v)


def test_klein_phi():
    K = klein_bottle()
    phi = build_phi(K)
    cyc = cyclic_data(K)
    named = {k: phi(K, cyc, g) for k, g in K.generators.items()}
    assert named == {"x": 1, "s": 2, "t": 0}


@pytest.mark.parametrize("name", CERTIFIABLE)
def test_corpus_round_trip(name):
    G = builtin(name)
    cert = certify_cyclic(G)
    assert cert.depth == G.rank
    report = verify_certificate(G, cert)
    assert report.ok, report.failures()
    assert render_tree(cert, name)


def test_klein_step_shape():
    cert = certify_cyclic(klein_bottle())
    assert isinstance(cert, Step)
    assert (cert.m, cert.a, cert.b) == (2, 1, 2)
    assert isinstance(cert.sub, Base)


def test_split_plane_uses_a_greater_than_one():
    cert = certify_cyclic(builtin("split-plane"))
    assert (cert.a, cert.b) == (2, 1)


def test_embedding_lands_in_kernel_and_inverts():
    K = klein_bottle()
    cert = certify_cyclic(K)
    cyc = cyclic_data(K)
    rng = random.Random(8)
    for _ in range(30):
        h = random_element(cert.sub_group, rng)
        img = cert.embed(K, h)
        assert cert.phi(K, cyc, img) == 0
        assert cert.unembed(K, cyc, img) == h


def test_noncyclic_and_torsion_inputs():
    with pytest.raises(NonCyclicHolonomy):
        certify_cyclic(hantzsche_wendt())
    with pytest.raises(NotTorsionFree):
        certify_cyclic(builtin("reflection-line"))
    with pytest.raises(NotTorsionFree):
        build_phi(builtin("reflection-line"))


def _replace_base(cert, **changes):
    if isinstance(cert, Base):
        return dataclasses.replace(cert, **changes)
    return dataclasses.replace(cert, sub=_replace_base(cert.sub, **changes))


@pytest.mark.parametrize("name", ["klein-bottle", "split-plane", "dicosm", "tricosm"])
def test_mutations_rejected(name):
    G = builtin(name)
    cert = certify_cyclic(G)
    assert not verify_certificate(G, dataclasses.replace(cert, g=G.mul(cert.g, cert.g))).ok
    assert not verify_certificate(G, dataclasses.replace(cert, g=G.identity())).ok
    assert not verify_certificate(G, dataclasses.replace(cert, kernel_gen=G.mul(cert.kernel_gen, cert.g))).ok
    bad_phi = dataclasses.replace(cert.phi, x0=cert.phi.x0 + 1)
    assert not verify_certificate(G, dataclasses.replace(cert, phi=bad_phi)).ok
    base = cert
    while not isinstance(base, Base):
        base = base.sub
    assert not verify_certificate(G, _replace_base(cert, n=base.n + 1)).ok


def test_base_mutation_rejected():
    G = builtin("root-line")
    cert = certify_cyclic(G)
    assert (cert.m, cert.n) == (2, 1)
    assert not verify_certificate(G, dataclasses.replace(cert, n=3)).ok
    assert not verify_certificate(G, dataclasses.replace(cert, m=1)).ok


def test_certificate_json():
    data = certify_cyclic(klein_bottle()).to_json()
    assert data["a"] * data["b"] == data["m"] == 2
