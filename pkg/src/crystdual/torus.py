"""Characters of the lattice as points of the dual torus.

Coordinates are :class:`Monomial` values ``e^{2 pi i angle} * prod s^k`` in
generic circle symbols.  Symbols are treated as algebraically independent,
so equality of monomials is syntactic; a coordinate such as ``u`` stands
for the stratum ``u != +-1`` in the usual case analysis.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from . import smith
from .core import CrystGroup, GroupElement, fmt_fraction, to_fraction
from .errors import InfiniteFixedLocus, MalformedConfig, MissingSymbol, RankMismatch

_EXACT_ROOTS = {
    Fraction(0): 1 + 0j,
    Fraction(1, 4): 1j,
    Fraction(1, 2): -1 + 0j,
    Fraction(3, 4): -1j,
}


def root_of_unity(angle: Fraction) -> complex:
    angle = Fraction(angle) % 1
    if angle in _EXACT_ROOTS:
        return _EXACT_ROOTS[angle]
    return cmath.exp(2j * cmath.pi * float(angle))


@dataclass(frozen=True)
class Monomial:
    angle: Fraction = Fraction(0)
    exps: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "angle", Fraction(self.angle) % 1)
        merged: dict[str, int] = {}
        for s, k in self.exps:
            merged[s] = merged.get(s, 0) + int(k)
        object.__setattr__(self, "exps", tuple(sorted((s, k) for s, k in merged.items() if k)))

    @classmethod
    def one(cls) -> "Monomial":
        return cls()

    @classmethod
    def root(cls, angle) -> "Monomial":
        return cls(Fraction(angle))

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "Monomial":
        return cls(Fraction(0), ((name, power),))

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.angle + other.angle, self.exps + other.exps)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.conj()

    def __pow__(self, k: int) -> "Monomial":
        return Monomial(self.angle * k, tuple((s, e * k) for s, e in self.exps))

    def conj(self) -> "Monomial":
        return self ** -1

    @property
    def is_numeric(self) -> bool:
        return not self.exps

    @property
    def is_one(self) -> bool:
        return self.angle == 0 and not self.exps

    def exponent(self, symbol: str) -> int:
        return dict(self.exps).get(symbol, 0)

    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.exps)

    def substitute(self, mapping: Mapping[str, "Monomial"]) -> "Monomial":
        out = Monomial(self.angle)
        for s, k in self.exps:
            out = out * (mapping[s] ** k if s in mapping else Monomial.symbol(s, k))
        return out

    def evaluate(self, assignment: Mapping[str, complex]) -> complex:
        z = root_of_unity(self.angle)
        for s, k in self.exps:
            if s not in assignment:
                raise MissingSymbol(f"no value for symbol {s!r}")
            z *= complex(assignment[s]) ** k
        return z

    def render(self, order: Optional[Sequence[str]] = None) -> str:
        rank = {s: i for i, s in enumerate(order or ())}
        factors = []
        for s, k in sorted(self.exps, key=lambda p: (rank.get(p[0], len(rank)), p[0])):
            base = s if k > 0 else f"conj({s})"
            factors.append(base if abs(k) == 1 else f"{base}^{abs(k)}")
        body = "*".join(factors)
        a = self.angle
        if a == 0:
            return body or "1"
        if a == Fraction(1, 2):
            return "-" + body if body else "-1"
        if a == Fraction(1, 4):
            return "i*" + body if body else "i"
        if a == Fraction(3, 4):
            return "-i*" + body if body else "-i"
        prefix = f"e({fmt_fraction(a)})"
        return prefix + "*" + body if body else prefix

    def __str__(self):
        return self.render()

    def to_json(self) -> dict:
        return {"angle": fmt_fraction(self.angle), "exponents": dict(self.exps)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Monomial":
        return cls(to_fraction(data["angle"]), tuple((str(s), int(k)) for s, k in data.get("exponents", {}).items()))

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        """Parse the rendered form, e.g. ``"conj(u)*w"``, ``"-a"``, ``"i"``, ``"e(1/3)*b^2"``."""
        s = text.strip().replace(" ", "")
        out = Monomial()
        if s.startswith("-"):
            out = Monomial.root(Fraction(1, 2))
            s = s[1:]
        if not s:
            raise MalformedConfig(f"cannot parse monomial {text!r}")
        for tok in s.split("*"):
            m = re.fullmatch(r"(conj\(([A-Za-z_]\w*)\)|([A-Za-z_]\w*)|e\(([^)]*)\)|1)(?:\^(-?\d+))?", tok)
            if not m:
                raise MalformedConfig(f"cannot parse monomial factor {tok!r} in {text!r}")
            power = int(m.group(5)) if m.group(5) else 1
            if m.group(1) == "1":
                f = Monomial()
            elif m.group(4) is not None:
                f = Monomial.root(to_fraction(m.group(4)))
            elif m.group(2):
                f = Monomial.symbol(m.group(2), -1)
            elif m.group(3) == "i":
                f = Monomial.root(Fraction(1, 4))
            else:
                f = Monomial.symbol(m.group(3))
            out = out * f ** power
        return out


@dataclass(frozen=True)
class Character:
    """A character of Z^n, given by its values on the standard basis."""

    coords: tuple[Monomial, ...]
    symbols: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        used = [s for c in self.coords for s in c.symbols()]
        syms = list(self.symbols)
        for s in used:
            if s not in syms:
                syms.append(s)
        object.__setattr__(self, "symbols", tuple(syms))

    @property
    def rank(self) -> int:
        return len(self.coords)

    @classmethod
    def trivial(cls, rank: int) -> "Character":
        return cls((Monomial(),) * rank)

    @classmethod
    def from_angles(cls, angles: Sequence) -> "Character":
        return cls(tuple(Monomial.root(to_fraction(a)) for a in angles))

    @classmethod
    def parse(cls, text: str) -> "Character":
        """Parse ``"(u,1,1)"``, ``"(-1, v, conj(w))"``, ``"(1/2, u)"``.

        A bare rational ``p/q`` is read as an angle, so ``1/2`` is the value -1.
        """
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        coords = []
        for tok in body.split(","):
            tok = tok.strip()
            if re.fullmatch(r"-?\d+/\d+", tok):
                coords.append(Monomial.root(to_fraction(tok)))
            else:
                coords.append(Monomial.parse(tok))
        return cls(tuple(coords))

    def value(self, m: Sequence[int]) -> Monomial:
        if len(m) != self.rank:
            raise RankMismatch(f"lattice vector of length {len(m)} for a rank-{self.rank} character")
        out = Monomial()
        for c, k in zip(self.coords, m):
            out = out * c ** int(k)
        return out

    def substitute(self, mapping: Mapping[str, Monomial], symbols: Optional[Sequence[str]] = None) -> "Character":
        return Character(tuple(c.substitute(mapping) for c in self.coords), tuple(symbols or ()))

    @property
    def is_numeric(self) -> bool:
        return all(c.is_numeric for c in self.coords)

    @property
    def is_stratum(self) -> bool:
        return not self.is_numeric

    @property
    def is_trivial(self) -> bool:
        return all(c.is_one for c in self.coords)

    def evaluate(self, assignment: Mapping[str, complex]) -> tuple[complex, ...]:
        return tuple(c.evaluate(assignment) for c in self.coords)

    def render(self) -> str:
        return "(" + ",".join(c.render(self.symbols) for c in self.coords) + ")"

    def __str__(self):
        return self.render()

    def same_point(self, other: "Character") -> bool:
        return self.coords == other.coords

    def to_json(self) -> list:
        return [c.to_json() for c in self.coords]


def act(group: CrystGroup, h: str, chi: Character) -> Character:
    """``chi'(m) = chi(A_h m)``, i.e. ``chi'`` is ``chi`` composed with conjugation by a lift of ``h``."""
    if chi.rank != group.rank:
        raise RankMismatch(f"rank-{chi.rank} character for a rank-{group.rank} group")
    A = group.lin[h]
    n = group.rank
    coords = tuple(chi.value(tuple(A[i][j] for i in range(n))) for j in range(n))
    return Character(coords, chi.symbols)


def orbit(group: CrystGroup, chi: Character) -> list[tuple[str, Character]]:
    """Distinct points ``act(h, chi)`` with the first label reaching each, identity first."""
    H = group.holonomy
    out = [(H.identity, Character(chi.coords, chi.symbols))]
    for h in H.labels:
        image = act(group, h, chi)
        if not any(image.same_point(c) for _, c in out):
            out.append((h, image))
    return out


@dataclass(frozen=True)
class Stabilizer:
    """``H_chi`` together with one lift per label; ``G_chi`` is ``N`` plus these lifts."""

    labels: tuple[str, ...]
    section: tuple[tuple[str, GroupElement], ...]

    def lift(self, h: str) -> GroupElement:
        return dict(self.section)[h]

    def __contains__(self, h: str) -> bool:
        return h in self.labels


def stabilizer(group: CrystGroup, chi: Character) -> Stabilizer:
    labels = tuple(h for h in group.holonomy.labels if act(group, h, chi).same_point(chi))
    return Stabilizer(labels, tuple((h, group.section(h)) for h in labels))


def fixed_points(group: CrystGroup) -> list[Character]:
    """All characters fixed by the whole holonomy group.

    Solves ``(A_h^T - I) theta = 0 mod 1`` for every ``h`` at once through
    the Smith form of the stacked system.
    """
    n = group.rank
    rows = []
    for h in group.holonomy.labels:
        At = smith.transpose(group.lin[h])
        rows.extend(tuple(At[i][j] - (i == j) for j in range(n)) for i in range(n))
    rows = [r for r in rows if any(r)]
    if not rows:
        raise InfiniteFixedLocus(f"holonomy acts trivially; the whole {n}-torus is fixed")
    dec = smith.snf(rows)
    if dec.rank < n:
        raise InfiniteFixedLocus(
            f"fixed locus has dimension {n - dec.rank} (stacked system has rank {dec.rank} < {n})"
        )
    points = []
    for ks in product(*(range(d) for d in dec.diagonal[:n])):
        phi = [Fraction(k, d) for k, d in zip(ks, dec.diagonal)]
        theta = tuple(x % 1 for x in smith.matvec(dec.V, phi))
        points.append(theta)
    points.sort()
    return [Character.from_angles(t) for t in points]


def strata_orbit_census(group: CrystGroup, strata: Iterable[Character]) -> dict[str, int]:
    return {chi.render(): len(orbit(group, chi)) for chi in strata}
