"""Crystallographic groups as affine extensions 1 -> Z^n -> G -> H -> 1.

An element is stored as ``(v, h)`` where ``v`` is the full rational
translation of the affine map ``xi -> A_h xi + v`` and ``h`` is a holonomy
label.  The lattice ``N = Z^n`` is the set of elements with identity label.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import prod
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from . import smith
from .errors import (
    BadTable,
    CocycleViolation,
    MalformedConfig,
    NonUnimodularMatrix,
    NotInGroup,
    RankMismatch,
    UnknownGenerator,
)

Vec = tuple[Fraction, ...]
IntMatrix = tuple[tuple[int, ...], ...]
Word = tuple[tuple[str, int], ...]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise MalformedConfig(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise MalformedConfig(f"not a rational: {x!r}") from None
    raise MalformedConfig(f"not a rational: {x!r}")


def fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def is_integral(v: Iterable[Fraction]) -> bool:
    return all(Fraction(c).denominator == 1 for c in v)


@dataclass(frozen=True)
class GroupElement:
    v: Vec
    h: str

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(to_fraction(c) for c in self.v))

    @property
    def rank(self) -> int:
        return len(self.v)

    def __str__(self):
        return f"(({', '.join(fmt_fraction(c) for c in self.v)}), {self.h})"

    def to_json(self) -> dict:
        return {"v": [fmt_fraction(c) for c in self.v], "h": self.h}

    @classmethod
    def from_json(cls, data: Mapping) -> "GroupElement":
        return cls(tuple(to_fraction(c) for c in data["v"]), str(data["h"]))


class HolonomyGroup:
    """A finite group given by its multiplication table over string labels."""

    def __init__(self, labels: Sequence[str], table: Mapping[tuple[str, str], str], identity: str):
        self.labels = tuple(labels)
        self.identity = identity
        self._table = dict(table)
        self._validate()
        self._inv = {
            a: next(b for b in self.labels if self.mul(a, b) == identity) for a in self.labels
        }

    @classmethod
    def from_rows(cls, labels: Sequence[str], rows: Sequence[Sequence[str]], identity: str):
        if len(rows) != len(labels) or any(len(r) != len(labels) for r in rows):
            raise BadTable("multiplication table must be |H| x |H|")
        table = {(a, b): rows[i][j] for i, a in enumerate(labels) for j, b in enumerate(labels)}
        return cls(labels, table, identity)

    @classmethod
    def cyclic(cls, m: int, names: Optional[Sequence[str]] = None) -> "HolonomyGroup":
        names = list(names) if names is not None else [str(k) for k in range(m)]
        table = {(names[i], names[j]): names[(i + j) % m] for i in range(m) for j in range(m)}
        return cls(names, table, names[0])

    def _validate(self):
        labels = set(self.labels)
        if len(labels) != len(self.labels):
            raise BadTable("duplicate holonomy labels")
        if self.identity not in labels:
            raise BadTable(f"identity {self.identity!r} is not a label")
        for a, b in product(self.labels, repeat=2):
            if self._table.get((a, b)) not in labels:
                raise BadTable(f"table entry for ({a}, {b}) missing or not a label")
        for a in self.labels:
            if self.mul(self.identity, a) != a or self.mul(a, self.identity) != a:
                raise BadTable(f"{self.identity!r} is not a two-sided identity for {a!r}")
        for a, b, c in product(self.labels, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                raise BadTable(f"associativity fails for ({a}, {b}, {c})")
        for a in self.labels:
            if not any(self.mul(a, b) == self.identity == self.mul(b, a) for b in self.labels):
                raise BadTable(f"{a!r} has no two-sided inverse")

    def __len__(self):
        return len(self.labels)

    def __contains__(self, h):
        return h in self.labels

    def mul(self, a: str, b: str) -> str:
        return self._table[(a, b)]

    def inv(self, a: str) -> str:
        return self._inv[a]

    def power(self, a: str, k: int) -> str:
        base = a if k >= 0 else self.inv(a)
        out = self.identity
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def order(self, a: str) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def rows(self) -> list[list[str]]:
        return [[self.mul(a, b) for b in self.labels] for a in self.labels]

    def is_abelian(self, subset: Optional[Iterable[str]] = None) -> bool:
        elems = tuple(subset) if subset is not None else self.labels
        return all(self.mul(a, b) == self.mul(b, a) for a, b in combinations(elems, 2))

    def cyclic_generator(self) -> Optional[str]:
        """A label generating the whole group (config order), or None."""
        n = len(self.labels)
        for a in self.labels:
            if self.order(a) == n:
                return a
        return None

    def abelian_basis(self, subset: Optional[Iterable[str]] = None) -> list[tuple[str, int]]:
        """Independent generators ``[(h_i, k_i)]`` of an abelian subgroup.

        The map ``(e_i) -> prod h_i^e_i`` from ``prod Z/k_i`` is a bijection
        onto the subgroup.  Found by search over small generating tuples,
        which is cheap for holonomy-sized groups.
        """
        elems = tuple(subset) if subset is not None else self.labels
        if not self.is_abelian(elems):
            raise ValueError("subgroup is not abelian")
        size = len(elems)
        if size == 1:
            return []
        nontrivial = [h for h in elems if h != self.identity]
        for r in range(1, size):
            for gens in combinations(nontrivial, r):
                orders = [self.order(h) for h in gens]
                if prod(orders) != size:
                    continue
                seen = {self.express(gens, exps) for exps in product(*(range(k) for k in orders))}
                if len(seen) == size:
                    return list(zip(gens, orders))
        raise ValueError("no independent generating set found")  # pragma: no cover

    def express(self, gens: Sequence[str], exps: Sequence[int]) -> str:
        out = self.identity
        for h, e in zip(gens, exps):
            out = self.mul(out, self.power(h, e))
        return out


class CrystGroup:
    """A validated crystallographic group.

    Construction checks every structural invariant: the linear parts form
    a homomorphism into GL_n(Z), and the translations satisfy the cocycle
    condition modulo the lattice.
    """

    def __init__(
        self,
        rank: int,
        holonomy: HolonomyGroup,
        lin: Mapping[str, Sequence[Sequence[int]]],
        trans: Mapping[str, Sequence],
        generators: Optional[Mapping[str, GroupElement]] = None,
        relations: Sequence[tuple[Word, Word]] = (),
        name: str = "",
    ):
        if not isinstance(rank, int) or rank < 1:
            raise MalformedConfig(f"rank must be a positive integer, got {rank!r}")
        self.rank = rank
        self.holonomy = holonomy
        self.name = name
        try:
            self.lin = {h: tuple(tuple(int(x) for x in row) for row in lin[h]) for h in holonomy.labels}
            self.trans = {
                h: tuple(to_fraction(c) for c in trans.get(h, [0] * rank)) for h in holonomy.labels
            }
        except KeyError as exc:
            raise MalformedConfig(f"missing linear part for label {exc}") from None
        self._validate()
        self._inv_lin = {h: self.lin[holonomy.inv(h)] for h in holonomy.labels}
        self.generators: dict[str, GroupElement] = {}
        for gname, g in (generators or {}).items():
            self._check_member(g)
            self.generators[gname] = g
        self.relations = tuple((tuple(a), tuple(b)) for a, b in relations)

    def _validate(self):
        n, H = self.rank, self.holonomy
        for h in H.labels:
            A, a = self.lin[h], self.trans[h]
            if len(A) != n or any(len(r) != n for r in A) or len(a) != n:
                raise MalformedConfig(f"shape mismatch for label {h!r} (rank {n})")
            if abs(smith.det(A)) != 1:
                raise NonUnimodularMatrix(f"A_{h} has determinant {smith.det(A)}")
        e = H.identity
        if self.lin[e] != smith.identity(n):
            raise MalformedConfig("linear part of the identity label must be the identity matrix")
        if any(c != 0 for c in self.trans[e]):
            raise MalformedConfig("translation of the identity label must be zero")
        for h1, h2 in product(H.labels, repeat=2):
            h12 = H.mul(h1, h2)
            if smith.matmul(self.lin[h1], self.lin[h2]) != self.lin[h12]:
                raise MalformedConfig(f"A_{h1} A_{h2} != A_{h12}: linear parts are not a homomorphism")
            defect = tuple(
                x + y - z
                for x, y, z in zip(self.trans[h1], smith.matvec(self.lin[h1], self.trans[h2]), self.trans[h12])
            )
            if not is_integral(defect):
                raise CocycleViolation(h1, h2, defect)

    # -- elements ------------------------------------------------------------

    def _check_member(self, g: GroupElement):
        if g.rank != self.rank:
            raise RankMismatch(f"element of rank {g.rank} in a rank-{self.rank} group")
        if g.h not in self.lin:
            raise NotInGroup(f"unknown holonomy label {g.h!r}")
        if not is_integral(x - y for x, y in zip(g.v, self.trans[g.h])):
            raise NotInGroup(f"{g} is not in the group: v - a_h is not integral")

    def contains(self, g: GroupElement) -> bool:
        try:
            self._check_member(g)
        except (RankMismatch, NotInGroup):
            return False
        return True

    def identity(self) -> GroupElement:
        return GroupElement((Fraction(0),) * self.rank, self.holonomy.identity)

    def translation(self, m: Sequence) -> GroupElement:
        if len(m) != self.rank:
            raise RankMismatch(f"translation of length {len(m)} in a rank-{self.rank} group")
        return GroupElement(tuple(m), self.holonomy.identity)

    def lattice_basis(self) -> list[GroupElement]:
        return [self.translation(row) for row in smith.identity(self.rank)]

    def lift(self, h: str) -> GroupElement:
        """The lift of ``h`` whose translation part is ``a_h``."""
        return GroupElement(self.trans[h], h)

    def section(self, h: str) -> GroupElement:
        """Preferred lift of ``h``: a named generator if one has label ``h``."""
        if h == self.holonomy.identity:
            return self.identity()
        for g in self.generators.values():
            if g.h == h:
                return g
        return self.lift(h)

    def mul(self, g1: GroupElement, g2: GroupElement) -> GroupElement:
        if g1.rank != self.rank or g2.rank != self.rank:
            raise RankMismatch(f"cannot multiply ranks {g1.rank} and {g2.rank} in rank {self.rank}")
        A = self.lin[g1.h]
        v = tuple(x + y for x, y in zip(g1.v, smith.matvec(A, g2.v)))
        return GroupElement(v, self.holonomy.mul(g1.h, g2.h))

    def inv(self, g: GroupElement) -> GroupElement:
        if g.rank != self.rank:
            raise RankMismatch(f"element of rank {g.rank} in a rank-{self.rank} group")
        return GroupElement(tuple(-x for x in smith.matvec(self._inv_lin[g.h], g.v)), self.holonomy.inv(g.h))

    def power(self, g: GroupElement, k: int) -> GroupElement:
        base = g if k >= 0 else self.inv(g)
        out = self.identity()
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def product(self, elements: Iterable[GroupElement]) -> GroupElement:
        out = self.identity()
        for g in elements:
            out = self.mul(out, g)
        return out

    def conjugate(self, g: GroupElement, x: GroupElement) -> GroupElement:
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def is_translation(self, g: GroupElement) -> bool:
        return g.h == self.holonomy.identity

    def lattice_vector(self, g: GroupElement) -> tuple[int, ...]:
        if not self.is_translation(g):
            raise NotInGroup(f"{g} is not a lattice element")
        return tuple(int(c) for c in g.v)

    def __repr__(self):
        return f"CrystGroup(name={self.name!r}, rank={self.rank}, |H|={len(self.holonomy)})"

    # -- serialization ----------------------------------------------------------

    def to_config(self) -> dict:
        return {
            "name": self.name,
            "rank": self.rank,
            "holonomy": {
                "labels": list(self.holonomy.labels),
                "mult": self.holonomy.rows(),
                "identity": self.holonomy.identity,
            },
            "lin": {h: [list(r) for r in self.lin[h]] for h in self.holonomy.labels},
            "trans": {h: [fmt_fraction(c) for c in self.trans[h]] for h in self.holonomy.labels},
            "generators": {k: g.to_json() for k, g in self.generators.items()},
            "relations": [[format_word(a), format_word(b)] for a, b in self.relations],
        }


# -- words --------------------------------------------------------------------

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^\(?([+-]?\d+)\)?)?$")


def parse_word(text: Union[str, Sequence[tuple[str, int]]]) -> Word:
    """Parse ``"x^2 y x^-1"`` (``*`` or whitespace separated) into a word.

    ``""``, ``"e"`` and ``"1"`` denote the empty word.  Sequences of
    ``(name, exponent)`` pairs pass through unchanged.
    """
    if not isinstance(text, str):
        return tuple((str(n), int(e)) for n, e in text)
    s = text.strip()
    if s in ("", "e", "1"):
        return ()
    out = []
    for tok in re.split(r"[\s*·]+", s):
        if not tok:
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise MalformedConfig(f"cannot parse word token {tok!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) is not None else 1))
    return tuple(out)


def format_word(word: Word) -> str:
    if not word:
        return "e"
    return " ".join(n if e == 1 else f"{n}^{e}" for n, e in word)


def eval_word(group: CrystGroup, word) -> GroupElement:
    out = group.identity()
    for name, exp in parse_word(word):
        if name not in group.generators:
            raise UnknownGenerator(f"unknown generator {name!r}")
        out = group.mul(out, group.power(group.generators[name], exp))
    return out


# -- torsion ------------------------------------------------------------------

class TorsionResult(NamedTuple):
    torsion_free: bool
    witness: Optional[GroupElement]


def is_torsion_free(group: CrystGroup) -> TorsionResult:
    """Decide torsion-freeness exactly.

    ``g = (v, h)`` with ``h`` of order ``k`` satisfies ``g^k = (S v, e)`` with
    ``S = sum_j A_h^j``; so ``g`` is torsion iff ``S v = 0`` for some ``v`` in
    ``a_h + Z^n``, an integer system ``S m = -S a_h``.
    """
    H = group.holonomy
    for h in H.labels:
        if h == H.identity:
            continue
        k = H.order(h)
        A = group.lin[h]
        S = smith.identity(group.rank)
        P = smith.identity(group.rank)
        for _ in range(1, k):
            P = smith.matmul(P, A)
            S = tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(S, P))
        a = group.trans[h]
        m = smith.solve_integer(S, tuple(-x for x in smith.matvec(S, a)))
        if m is not None:
            w = GroupElement(tuple(x + y for x, y in zip(a, m)), h)
            assert group.power(w, k) == group.identity()
            return TorsionResult(False, w)
    return TorsionResult(True, None)


# -- construction ---------------------------------------------------------------

def build_group(config: Mapping) -> CrystGroup:
    """Build and validate a group from a group-definition document."""
    if not isinstance(config, Mapping):
        raise MalformedConfig("group definition must be a JSON object")
    try:
        rank = config["rank"]
        hol = config["holonomy"]
        labels = [str(x) for x in hol["labels"]]
        rows = [[str(x) for x in r] for r in hol["mult"]]
        ident = str(hol["identity"])
        lin = config["lin"]
        trans = config.get("trans", {})
        gens = config.get("generators", {})
    except (KeyError, TypeError) as exc:
        raise MalformedConfig(f"missing or malformed field: {exc}") from None
    if not isinstance(rank, int) or isinstance(rank, bool):
        raise MalformedConfig(f"rank must be an integer, got {rank!r}")
    H = HolonomyGroup.from_rows(labels, rows, ident)
    try:
        generators = {
            str(k): GroupElement(tuple(to_fraction(c) for c in g["v"]), str(g["h"])) for k, g in gens.items()
        }
    except (KeyError, TypeError, AttributeError) as exc:
        raise MalformedConfig(f"malformed generator: {exc}") from None
    relations = [
        (parse_word(a), parse_word(b)) for a, b in config.get("relations", [])
    ]
    group = CrystGroup(rank, H, lin, trans, generators, relations, name=str(config.get("name", "")))
    for a, b in group.relations:
        for word in (a, b):
            for gname, _ in word:
                if gname not in group.generators:
                    raise MalformedConfig(f"relation uses undeclared generator {gname!r}")
    return group


def load_group(path: Union[str, Path]) -> CrystGroup:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedConfig(f"{path}: invalid JSON ({exc})") from None
    return build_group(data)
