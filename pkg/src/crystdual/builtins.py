"""Built-in groups: the Hantzsche-Wendt group and a small corpus of others."""

from __future__ import annotations

from fractions import Fraction as F
from typing import Callable

from .core import CrystGroup, GroupElement, HolonomyGroup, parse_word
from .errors import MalformedConfig
from .smith import identity, matmul

half = F(1, 2)


def _diag(*d):
    n = len(d)
    return tuple(tuple(d[i] if i == j else 0 for j in range(n)) for i in range(n))


def _cyclic_group(A, a, *, order=None, gen_name="x", lattice_names=None, name="", relations=()):
    """Group generated by Z^n and one affine map ``(a, A)``.

    The holonomy order defaults to the order of ``A``; pass ``order`` when
    the map acts trivially on the lattice.
    """
    n = len(A)
    m, P = 1, A
    while P != identity(n):
        P = matmul(P, A)
        m += 1
    if order is not None:
        if order % m:
            raise MalformedConfig(f"holonomy order {order} is not a multiple of the order of A")
        m = order
    H = HolonomyGroup.cyclic(m)
    lin, trans = {}, {}
    P, t = identity(n), (F(0),) * n
    for k in range(m):
        lin[str(k)] = P
        trans[str(k)] = tuple(c - (c.numerator // c.denominator) for c in t)
        t = tuple(x + y for x, y in zip(a, (sum(r[j] * t[j] for j in range(n)) for r in A)))
        P = matmul(A, P)
    gens = {}
    if m > 1:
        gens[gen_name] = GroupElement(tuple(F(c) for c in a), "1")
    for i, row in enumerate(identity(n)):
        lname = lattice_names[i] if lattice_names else f"t{i + 1}"
        gens[lname] = GroupElement(row, "0")
    return CrystGroup(n, H, lin, trans, gens, relations, name=name)


def hantzsche_wendt() -> CrystGroup:
    labels = ["e", "x", "y", "z"]
    # Z/2 x Z/2 with x*y = z
    rows = [
        ["e", "x", "y", "z"],
        ["x", "e", "z", "y"],
        ["y", "z", "e", "x"],
        ["z", "y", "x", "e"],
    ]
    H = HolonomyGroup.from_rows(labels, rows, "e")
    lin = {
        "e": _diag(1, 1, 1),
        "x": _diag(1, -1, -1),
        "y": _diag(-1, 1, -1),
        "z": _diag(-1, -1, 1),
    }
    trans = {
        "e": (0, 0, 0),
        "x": (half, half, 0),
        "y": (0, half, half),
        "z": (half, 0, half),
    }
    gens = {h: GroupElement(trans[h], h) for h in ("x", "y", "z")}
    relations = [
        (parse_word("x^2 y x^2"), parse_word("y")),
        (parse_word("y^2 x y^2"), parse_word("x")),
        (parse_word("z"), parse_word("y^-1 x^-1")),
    ]
    return CrystGroup(3, H, lin, trans, gens, relations, name="hantzsche-wendt")


def klein_bottle() -> CrystGroup:
    """Rank 2, holonomy Z/2 acting by diag(1, -1), glide translation (1/2, 0)."""
    return _cyclic_group(
        _diag(1, -1), (half, 0), lattice_names=["s", "t"], name="klein-bottle",
        relations=[(parse_word("x t x^-1"), parse_word("t^-1")), (parse_word("x^2"), parse_word("s"))],
    )


def free_abelian(n: int = 1) -> CrystGroup:
    H = HolonomyGroup.cyclic(1)
    gens = {f"t{i + 1}": GroupElement(row, "0") for i, row in enumerate(identity(n))}
    return CrystGroup(n, H, {"0": identity(n)}, {"0": (0,) * n}, gens, name=f"Z^{n}" if n > 1 else "Z")


def root_line() -> CrystGroup:
    """Rank 1 with holonomy Z/2 acting trivially and x^2 = t; isomorphic to Z."""
    return _cyclic_group(
        _diag(1), (half,), order=2, lattice_names=["t"], name="root-line",
        relations=[(parse_word("x^2"), parse_word("t"))],
    )


def reflection_line() -> CrystGroup:
    """Rank 1 with holonomy Z/2 acting by -1 and zero translation (has torsion)."""
    return _cyclic_group(_diag(-1), (0,), lattice_names=["t"], name="reflection-line")


def split_plane() -> CrystGroup:
    """Rank 2, holonomy Z/2 acting trivially, x^2 = t2 (abstractly Z^2).

    Its transfer-derived homomorphism has a kernel meeting the nontrivial
    holonomy class, so certification exercises the a > 1 branch.
    """
    return _cyclic_group(_diag(1, 1), (0, half), order=2, name="split-plane")


def dicosm() -> CrystGroup:
    return _cyclic_group(_diag(1, -1, -1), (half, 0, 0), name="dicosm")


def tricosm() -> CrystGroup:
    A = ((0, -1, 0), (1, -1, 0), (0, 0, 1))
    return _cyclic_group(A, (0, 0, F(1, 3)), name="tricosm")


def tetracosm() -> CrystGroup:
    A = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
    return _cyclic_group(A, (0, 0, F(1, 4)), name="tetracosm")


def hexacosm() -> CrystGroup:
    A = ((1, -1, 0), (1, 0, 0), (0, 0, 1))
    return _cyclic_group(A, (0, 0, F(1, 6)), name="hexacosm")


def first_amphicosm() -> CrystGroup:
    """Klein bottle times a circle."""
    return _cyclic_group(_diag(1, -1, 1), (half, 0, 0), name="first-amphicosm")


BUILTINS: dict[str, Callable[[], CrystGroup]] = {
    "hantzsche-wendt": hantzsche_wendt,
    "klein-bottle": klein_bottle,
    "z": lambda: free_abelian(1),
    "z2": lambda: free_abelian(2),
    "z3": lambda: free_abelian(3),
    "root-line": root_line,
    "reflection-line": reflection_line,
    "split-plane": split_plane,
    "dicosm": dicosm,
    "tricosm": tricosm,
    "tetracosm": tetracosm,
    "hexacosm": hexacosm,
    "first-amphicosm": first_amphicosm,
}


def builtin(name: str) -> CrystGroup:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise MalformedConfig(f"unknown builtin group {name!r}; known: {', '.join(BUILTINS)}") from None
