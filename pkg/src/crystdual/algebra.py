"""Exact group-algebra arithmetic over a finite-index normal subgroup.

Coefficients live in the Gaussian rationals ``QQ(i)``.  ``Gamma`` is a
normal subgroup of finite index, by default the lattice ``N``.  The map
``psi`` sends the group algebra of ``G`` into ``|H| x |H|`` matrices over
the group algebra of ``Gamma`` with entries ``E(g_h' a g_h^-1)``.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from sympy.polys.domains import QQ, QQ_I

from .core import CrystGroup, GroupElement, fmt_fraction, to_fraction
from .errors import BadSection, ComputationError, MalformedConfig, SizeMismatch

Coeff = type(QQ_I.one)
Predicate = Callable[[GroupElement], bool]


def gauss(re=0, im=0) -> Coeff:
    """A Gaussian rational from ints, Fractions or ``"p/q"`` strings."""
    r, i = to_fraction(re), to_fraction(im)
    return QQ_I(QQ(r.numerator, r.denominator), QQ(i.numerator, i.denominator))


def _coerce(c) -> Coeff:
    if isinstance(c, Coeff):
        return c
    if isinstance(c, complex):
        return gauss(Fraction(c.real).limit_denominator(), Fraction(c.imag).limit_denominator())
    return gauss(c)


def conj(c: Coeff) -> Coeff:
    return QQ_I(c.x, -c.y)


def coeff_str(c: Coeff) -> str:
    re_, im = Fraction(int(c.x.numerator), int(c.x.denominator)), Fraction(int(c.y.numerator), int(c.y.denominator))
    if im == 0:
        return fmt_fraction(re_)
    ims = "i" if im == 1 else "-i" if im == -1 else f"{fmt_fraction(im)}i"
    if re_ == 0:
        return ims
    return f"({fmt_fraction(re_)}{'+' if im > 0 else ''}{ims})"


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class GroupAlgebraElement:
    """Finitely supported function ``G -> QQ(i)``; zero coefficients are never stored."""

    __slots__ = ("group", "terms")

    def __init__(self, group: CrystGroup, terms: Union[Mapping, Iterable] = ()):
        self.group = group
        acc: dict[GroupElement, Coeff] = defaultdict(lambda: QQ_I.zero)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for g, c in items:
            acc[g] = acc[g] + _coerce(c)
        self.terms = {g: c for g, c in acc.items() if not QQ_I.is_zero(c)}

    @classmethod
    def zero(cls, group) -> "GroupAlgebraElement":
        return cls(group)

    @classmethod
    def one(cls, group) -> "GroupAlgebraElement":
        return cls(group, {group.identity(): 1})

    @classmethod
    def of(cls, group, g: GroupElement, c=1) -> "GroupAlgebraElement":
        return cls(group, {g: c})

    def __add__(self, other):
        return GroupAlgebraElement(self.group, list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return GroupAlgebraElement(self.group, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return self.scale(other)
        mul = self.group.mul
        return GroupAlgebraElement(
            self.group,
            [(mul(g1, g2), c1 * c2) for g1, c1 in self.terms.items() for g2, c2 in other.terms.items()],
        )

    def __rmul__(self, scalar):
        return self.scale(scalar)

    def scale(self, c) -> "GroupAlgebraElement":
        c = _coerce(c)
        return GroupAlgebraElement(self.group, {g: c * x for g, x in self.terms.items()})

    def star(self) -> "GroupAlgebraElement":
        inv = self.group.inv
        return GroupAlgebraElement(self.group, {inv(g): conj(c) for g, c in self.terms.items()})

    def coefficient(self, g: GroupElement) -> Coeff:
        return self.terms.get(g, QQ_I.zero)

    def augmentation(self) -> Coeff:
        return sum(self.terms.values(), QQ_I.zero)

    def support(self) -> list[GroupElement]:
        return sorted(self.terms, key=_element_key)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        out = ""
        for g in self.support():
            c = coeff_str(self.terms[g])
            sign = "-" if c.startswith("-") else "+"
            c = c.lstrip("-")
            term = str(g) if c == "1" else f"{c}*{g}"
            out += (("-" if sign == "-" else "") + term) if not out else f" {sign} {term}"
        return out

    def to_json(self) -> list:
        return [
            {"coeff": [fmt_fraction(_frac(self.terms[g].x)), fmt_fraction(_frac(self.terms[g].y))], "element": g.to_json()}
            for g in self.support()
        ]

    @classmethod
    def from_json(cls, group: CrystGroup, data: Sequence) -> "GroupAlgebraElement":
        try:
            return cls(group, [(GroupElement.from_json(t["element"]), gauss(*t["coeff"])) for t in data])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedConfig(f"malformed group-algebra element: {exc}") from None


def _element_key(g: GroupElement):
    return (g.h, g.v)


# -- Gamma and the expectation ------------------------------------------------

def lattice_predicate(group: CrystGroup) -> Predicate:
    e = group.holonomy.identity
    return lambda g: g.h == e


def kernel_predicate(quotient: Callable[[GroupElement], object], identity) -> Predicate:
    """``Gamma`` as the kernel of a quotient map."""
    return lambda g: quotient(g) == identity


def expectation(a: GroupAlgebraElement, gamma: Optional[Predicate] = None) -> GroupAlgebraElement:
    gamma = gamma or lattice_predicate(a.group)
    return GroupAlgebraElement(a.group, {g: c for g, c in a.terms.items() if gamma(g)})


class GammaMatrix:
    """Square matrix indexed by holonomy labels with Gamma-supported entries."""

    def __init__(self, group: CrystGroup, labels: Sequence[str], entries: Mapping[tuple[str, str], GroupAlgebraElement], gamma: Optional[Predicate] = None):
        self.group = group
        self.labels = tuple(labels)
        self.gamma = gamma or lattice_predicate(group)
        zero = GroupAlgebraElement.zero(group)
        self.entries = {(r, c): entries.get((r, c), zero) for r in self.labels for c in self.labels}
        for (r, c), x in self.entries.items():
            bad = [g for g in x.terms if not self.gamma(g)]
            if bad:
                raise BadSection(f"entry ({r},{c}) has support outside Gamma: {bad[0]}")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __getitem__(self, key: tuple[str, str]) -> GroupAlgebraElement:
        return self.entries[key]

    def _same_shape(self, other):
        if other.labels != self.labels:
            raise SizeMismatch(f"matrix shapes differ: {len(self.labels)} vs {len(other.labels)}")

    def __mul__(self, other: "GammaMatrix") -> "GammaMatrix":
        self._same_shape(other)
        L = self.labels
        out = {}
        for r in L:
            for c in L:
                acc = GroupAlgebraElement.zero(self.group)
                for k in L:
                    acc = acc + self.entries[r, k] * other.entries[k, c]
                out[r, c] = acc
        return GammaMatrix(self.group, L, out, self.gamma)

    def __add__(self, other: "GammaMatrix") -> "GammaMatrix":
        self._same_shape(other)
        return GammaMatrix(self.group, self.labels, {k: v + other.entries[k] for k, v in self.entries.items()}, self.gamma)

    def star(self) -> "GammaMatrix":
        return GammaMatrix(
            self.group, self.labels, {(r, c): self.entries[c, r].star() for r in self.labels for c in self.labels}, self.gamma
        )

    def is_diagonal(self) -> bool:
        return all(v.is_zero() for (r, c), v in self.entries.items() if r != c)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.values())

    def __eq__(self, other):
        if not isinstance(other, GammaMatrix):
            return NotImplemented
        return self.labels == other.labels and self.entries == other.entries

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "entries": [[self.entries[r, c].to_json() for c in self.labels] for r in self.labels],
        }


# -- the quasi-basis embedding ----------------------------------------------------

Lifts = Mapping[str, GroupElement]


def default_lifts(group: CrystGroup) -> dict[str, GroupElement]:
    """``h -> (a_h, h)``."""
    return {h: group.lift(h) for h in group.holonomy.labels}


def _check_lifts(group: CrystGroup, lifts: Lifts):
    H = group.holonomy
    if set(lifts) != set(H.labels):
        raise BadSection(f"section must cover exactly the labels {list(H.labels)}")
    for h, g in lifts.items():
        if not group.contains(g):
            raise BadSection(f"lift {g} of {h} is not a group element")
        if g.h != h:
            raise BadSection(f"lift {g} has label {g.h}, expected {h}")
    if lifts[H.identity] != group.identity():
        raise BadSection("lift of the identity label must be the identity element")


def psi(a: GroupAlgebraElement, lifts: Optional[Lifts] = None) -> GammaMatrix:
    group = a.group
    lifts = dict(lifts or default_lifts(group))
    _check_lifts(group, lifts)
    H = group.holonomy
    inv_lifts = {h: group.inv(g) for h, g in lifts.items()}
    # g_h' g g_h^-1 lies in N exactly when h = h' q(g), so each term feeds one entry per row
    buckets: dict[tuple[str, str], list] = defaultdict(list)
    for g, c in a.terms.items():
        for hp in H.labels:
            h = H.mul(hp, g.h)
            buckets[hp, h].append((group.mul(group.mul(lifts[hp], g), inv_lifts[h]), c))
    entries = {k: GroupAlgebraElement(group, v) for k, v in buckets.items()}
    return GammaMatrix(group, H.labels, entries)


def reconstruct(M: GammaMatrix, lifts: Optional[Lifts] = None) -> GroupAlgebraElement:
    """``(1/|H|) sum_{h', h} g_h'^-1 M[h', h] g_h``; the left inverse of :func:`psi`."""
    group = M.group
    lifts = dict(lifts or default_lifts(group))
    _check_lifts(group, lifts)
    if M.size != len(group.holonomy):
        raise SizeMismatch(f"matrix of size {M.size} for a holonomy group of order {len(group.holonomy)}")
    acc = GroupAlgebraElement.zero(group)
    for hp in M.labels:
        left = GroupAlgebraElement.of(group, group.inv(lifts[hp]))
        for h in M.labels:
            acc = acc + left * M[hp, h] * GroupAlgebraElement.of(group, lifts[h])
    return acc.scale(gauss(Fraction(1, M.size)))


def quasi_basis_sum(a: GroupAlgebraElement, lifts: Optional[Lifts] = None) -> GroupAlgebraElement:
    """``sum_h g_h^-1 E(g_h a)``, which equals ``a``."""
    group = a.group
    lifts = dict(lifts or default_lifts(group))
    _check_lifts(group, lifts)
    acc = GroupAlgebraElement.zero(group)
    for h, g in lifts.items():
        acc = acc + GroupAlgebraElement.of(group, group.inv(g)) * expectation(GroupAlgebraElement.of(group, g) * a)
    return acc


# -- I(G, H) -------------------------------------------------------------------

def push_forward(x: GroupAlgebraElement) -> dict[str, Coeff]:
    """Image in the group algebra of ``H``: coefficients summed per label."""
    out: dict[str, Coeff] = {h: QQ_I.zero for h in x.group.holonomy.labels}
    for g, c in x.terms.items():
        out[g.h] = out[g.h] + c
    return out


def augmentation_criteria(x: GroupAlgebraElement, lifts: Optional[Lifts] = None) -> tuple[bool, bool]:
    """Both membership tests for the kernel of ``I(G) -> I(H)``.

    First: every push-forward coefficient vanishes.  Second: ``E(x g_h^-1)``
    has zero augmentation for every ``h``.
    """
    group = x.group
    lifts = dict(lifts or default_lifts(group))
    _check_lifts(group, lifts)
    by_push = all(QQ_I.is_zero(c) for c in push_forward(x).values())
    by_exp = all(
        QQ_I.is_zero(expectation(x * GroupAlgebraElement.of(group, group.inv(g))).augmentation())
        for g in lifts.values()
    )
    return by_push, by_exp


def in_augmentation_relative(x: GroupAlgebraElement, lifts: Optional[Lifts] = None) -> bool:
    by_push, by_exp = augmentation_criteria(x, lifts)
    if by_push != by_exp:
        raise ComputationError(f"membership criteria disagree on {x}")
    return by_push
