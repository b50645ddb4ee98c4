"""Random generators shared by the test modules."""

import random

from crystdual.algebra import GroupAlgebraElement, gauss
from crystdual.core import format_word


def random_element(G, rng: random.Random, spread: int = 2):
    h = rng.choice(G.holonomy.labels)
    v = [rng.randint(-spread, spread) for _ in range(G.rank)]
    return G.mul(G.translation(v), G.lift(h))


def random_word(G, rng: random.Random, length: int = 6) -> str:
    names = list(G.generators)
    word = [(rng.choice(names), rng.choice((-2, -1, 1, 2))) for _ in range(rng.randint(0, length))]
    return format_word(word) if word else ""


def random_algebra(G, rng: random.Random, max_support: int = 12, span: int = 3):
    terms = []
    for _ in range(rng.randint(1, max_support)):
        terms.append((random_element(G, rng), gauss(rng.randint(-span, span), rng.randint(-span, span))))
    return GroupAlgebraElement(G, terms)


def random_lattice_algebra(G, rng: random.Random, max_support: int = 6):
    terms = []
    for _ in range(rng.randint(1, max_support)):
        v = [rng.randint(-2, 2) for _ in range(G.rank)]
        terms.append((G.translation(v), gauss(rng.randint(-3, 3), rng.randint(-3, 3))))
    return GroupAlgebraElement(G, terms)
