"""Extension of lattice characters to stabilizers and induced representations.

Induced matrices follow ``M(g)[i][j] = sigma(g_i^-1 g g_j)`` when that
element lies in the stabilizer, else zero, for a transversal
``g_1 = e, ..., g_d`` of ``G / G_chi``.  This is the matrix of
``(pi(g) xi)(s) = xi(g^-1 s)`` in the coordinates ``xi -> (xi(g_1), ..., xi(g_d))``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import CrystGroup, GroupElement, format_word, parse_word
from .errors import (
    BadTransversal,
    ElementEscapes,
    InconsistentExtension,
    NonabelianLittleGroup,
    NotDiagonalOnLattice,
    NotMonomial,
    OffCircleValue,
    MissingSymbol,
    UnknownGenerator,
    UnsupportedExtension,
)
from .torus import Character, Monomial, Stabilizer, orbit, stabilizer

Entry = Optional[Monomial]
MonoMatrix = tuple[tuple[Entry, ...], ...]

_FRESH_POOL = "abcdfghjklmnpqrstuvwxyz"


# -- monomial matrices ----------------------------------------------------------

def mono_identity(d: int) -> MonoMatrix:
    return tuple(tuple(Monomial() if i == j else None for j in range(d)) for i in range(d))


def mono_matmul(A: MonoMatrix, B: MonoMatrix) -> MonoMatrix:
    d = len(A)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            terms = [A[i][k] * B[k][j] for k in range(d) if A[i][k] is not None and B[k][j] is not None]
            if len(terms) > 1:
                raise NotMonomial(f"entry ({i}, {j}) is a sum of {len(terms)} monomials")
            row.append(terms[0] if terms else None)
        rows.append(tuple(row))
    return tuple(rows)


def mono_inverse(A: MonoMatrix) -> MonoMatrix:
    """Inverse of a monomial matrix with unit-circle entries: the conjugate transpose."""
    d = len(A)
    return tuple(tuple(A[j][i].conj() if A[j][i] is not None else None for j in range(d)) for i in range(d))


def mono_power(A: MonoMatrix, k: int) -> MonoMatrix:
    base = A if k >= 0 else mono_inverse(A)
    out = mono_identity(len(A))
    for _ in range(abs(k)):
        out = mono_matmul(out, base)
    return out


def is_monomial_matrix(A: MonoMatrix) -> bool:
    d = len(A)
    return all(sum(e is not None for e in row) == 1 for row in A) and all(
        sum(A[i][j] is not None for i in range(d)) == 1 for j in range(d)
    )


def render_matrix(A: MonoMatrix, symbols: Sequence[str] = ()) -> list[list[str]]:
    return [[e.render(symbols) if e is not None else "0" for e in row] for row in A]


def parse_matrix(rows: Sequence[Sequence[str]]) -> MonoMatrix:
    return tuple(tuple(None if str(x).strip() == "0" else Monomial.parse(str(x)) for x in row) for row in rows)


def evaluate_matrix(A: MonoMatrix, assignment: Mapping[str, complex]) -> np.ndarray:
    d = len(A)
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            if A[i][j] is not None:
                out[i, j] = A[i][j].evaluate(assignment)
    return out


# -- extensions -----------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionCharacter:
    """A one-dimensional character of ``G_chi`` restricting to ``base`` on the lattice.

    ``values`` holds its value on the chosen lift of every stabilizer label;
    ``substitutions`` records how the original symbols were rewritten in
    terms of fresh root symbols (``u -> a^2``).
    """

    base: Character
    stabilizer: Stabilizer
    values: tuple[tuple[str, Monomial], ...]
    substitutions: tuple[tuple[str, Monomial], ...] = ()

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.base.symbols

    def section_value(self, h: str) -> Monomial:
        return dict(self.values)[h]

    def __call__(self, group: CrystGroup, g: GroupElement) -> Monomial:
        if g.h not in self.stabilizer:
            raise ElementEscapes(f"{g} is not in the stabilizer")
        s = self.stabilizer.lift(g.h)
        lattice = tuple(int(x - y) for x, y in zip(g.v, s.v))
        return self.base.value(lattice) * self.section_value(g.h)

    def describe(self) -> str:
        vals = ", ".join(f"sigma({h})={m.render(self.symbols)}" for h, m in self.values)
        subs = ", ".join(f"{s} := {m.render(self.symbols)}" for s, m in self.substitutions)
        return f"base {self.base}; {vals}" + (f"; {subs}" if subs else "")


def _roots(target: Monomial, k: int, symbols: Sequence[str], fresh: Callable[[str], str]):
    """All k-th roots of ``target`` as ``(root, substitution)`` pairs.

    Numeric targets (and targets whose exponents are all divisible by k)
    give k explicit roots.  Otherwise a fresh symbol ``f`` is introduced
    and one original symbol with exponent +-1 is rewritten so that
    ``f^k == target``; the fresh symbol covers every root at once.
    """
    if all(e % k == 0 for _, e in target.exps):
        reduced = tuple((s, e // k) for s, e in target.exps)
        return [(Monomial((target.angle + j) / k, reduced), None) for j in range(k)]
    for sym in symbols:
        e = target.exponent(sym)
        if abs(e) == 1:
            f = fresh(sym)
            rest = target * Monomial.symbol(sym, -e)
            replacement = (Monomial.symbol(f, k) / rest) ** e
            return [(Monomial.symbol(f), (sym, replacement, f))]
    raise UnsupportedExtension(
        f"cannot extract a {k}-th root of {target}: no symbol with exponent +-1"
    )


def extend_character(
    group: CrystGroup,
    chi: Character,
    stab: Optional[Stabilizer] = None,
    fresh_names: Optional[Mapping[str, str]] = None,
) -> list[ExtensionCharacter]:
    """Every one-dimensional extension of ``chi`` to its stabilizer.

    Raises ``InconsistentExtension`` when no choice of roots is
    multiplicative, which is exactly a nontrivial Mackey obstruction.
    """
    stab = stab or stabilizer(group, chi)
    H = group.holonomy
    if not H.is_abelian(stab.labels):
        raise NonabelianLittleGroup(f"little group {stab.labels} is not abelian")
    basis = H.abelian_basis(stab.labels)
    used = set(chi.symbols) | {"e", "i"}
    fresh_names = dict(fresh_names or {})

    def fresh(sym: str) -> str:
        name = fresh_names.get(sym)
        if name is None:
            name = next(c for c in _FRESH_POOL if c not in used)
        used.add(name)
        return name

    families = [(chi, [], {})]
    for h, k in basis:
        lam = group.lattice_vector(group.power(stab.lift(h), k))
        grown = []
        for base, vals, subs in families:
            for root, sub in _roots(base.value(lam), k, base.symbols, fresh):
                if sub is None:
                    grown.append((base, vals + [root], subs))
                    continue
                sym, replacement, f = sub
                mapping = {sym: replacement}
                syms = tuple(f if s == sym else s for s in base.symbols)
                grown.append((
                    base.substitute(mapping, syms),
                    [v.substitute(mapping) for v in vals] + [root],
                    {**{s: m.substitute(mapping) for s, m in subs.items()}, sym: replacement},
                ))
        families = grown

    gens = [h for h, _ in basis]
    orders = [k for _, k in basis]
    out, failure = [], None
    for base, vals, subs in families:
        values = {}
        for exps in product(*(range(k) for k in orders)):
            label = H.express(gens, exps)
            P = group.product(group.power(stab.lift(h), e) for h, e in zip(gens, exps))
            ell = group.lattice_vector(group.mul(P, group.inv(stab.lift(label))))
            val = Monomial()
            for v, e in zip(vals, exps):
                val = val * v ** e
            values[label] = val / base.value(ell)
        sigma = ExtensionCharacter(
            base, stab, tuple((h, values[h]) for h in stab.labels), tuple(subs.items())
        )
        bad = _multiplicativity_failure(group, sigma)
        if bad is None:
            out.append(sigma)
        elif failure is None:
            failure = bad
    if not out:
        raise InconsistentExtension(f"no one-dimensional extension of {chi}: {failure}")
    return out


def _multiplicativity_failure(group: CrystGroup, sigma: ExtensionCharacter) -> Optional[str]:
    H = group.holonomy
    stab = sigma.stabilizer
    for h1, h2 in product(stab.labels, repeat=2):
        s1, s2, s12 = stab.lift(h1), stab.lift(h2), stab.lift(H.mul(h1, h2))
        ell = group.lattice_vector(group.mul(group.mul(s1, s2), group.inv(s12)))
        lhs = sigma.section_value(h1) * sigma.section_value(h2)
        rhs = sigma.section_value(H.mul(h1, h2)) * sigma.base.value(ell)
        if lhs != rhs:
            syms = sigma.symbols
            return (
                f"sigma(s({h1}))*sigma(s({h2})) = {lhs.render(syms)} but "
                f"sigma(s({H.mul(h1, h2)}))*chi{ell} = {rhs.render(syms)}"
            )
    return None


# -- induction ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Rep:
    group: CrystGroup
    sigma: ExtensionCharacter
    transversal: tuple[GroupElement, ...]
    matrices: tuple[tuple[str, MonoMatrix], ...]

    @property
    def dim(self) -> int:
        return len(self.transversal)

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.sigma.symbols

    def matrix(self, name: str) -> MonoMatrix:
        try:
            return dict(self.matrices)[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name!r}") from None

    def element_matrix(self, g: GroupElement) -> MonoMatrix:
        """The induced matrix of an arbitrary group element, straight from the definition."""
        G, T = self.group, self.transversal
        inv_T = [G.inv(t) for t in T]
        rows = []
        for i in range(self.dim):
            left = G.mul(inv_T[i], g)
            row = []
            for j in range(self.dim):
                k = G.mul(left, T[j])
                row.append(self.sigma(G, k) if k.h in self.sigma.stabilizer else None)
            if sum(e is not None for e in row) != 1:
                raise ElementEscapes(f"row {i} of the matrix of {g} is not monomial")
            rows.append(tuple(row))
        return tuple(rows)

    def word_matrix(self, word) -> MonoMatrix:
        return rep_of_word(self, word)

    def render(self) -> dict[str, list[list[str]]]:
        return {name: render_matrix(M, self.symbols) for name, M in self.matrices}

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "symbols": list(self.symbols),
            "inducing": {
                "character": self.sigma.base.to_json(),
                "stabilizer": list(self.sigma.stabilizer.labels),
                "section_values": {h: m.to_json() for h, m in self.sigma.values},
                "substitutions": {s: m.to_json() for s, m in self.sigma.substitutions},
            },
            "transversal": [t.to_json() for t in self.transversal],
            "matrices": {
                name: [[e.to_json() if e is not None else None for e in row] for row in M]
                for name, M in self.matrices
            },
        }


def default_transversal(group: CrystGroup, stab: Stabilizer) -> list[GroupElement]:
    """One preferred lift per left coset ``h H_chi``, labels in config order."""
    H = group.holonomy
    reps: list[str] = []
    for h in H.labels:
        if not any(H.mul(H.inv(r), h) in stab for r in reps):
            reps.append(h)
    return [group.section(h) for h in reps]


def induce(
    group: CrystGroup,
    sigma: ExtensionCharacter,
    transversal: Optional[Sequence[GroupElement]] = None,
) -> Rep:
    stab = sigma.stabilizer
    H = group.holonomy
    if transversal is None:
        transversal = default_transversal(group, stab)
    transversal = tuple(transversal)
    index = len(H) // len(stab.labels)
    if len(transversal) != index:
        raise BadTransversal(f"need {index} coset representatives, got {len(transversal)}")
    if transversal[0] != group.identity():
        raise BadTransversal("the first coset representative must be the identity")
    for t in transversal:
        if not group.contains(t):
            raise BadTransversal(f"{t} is not a group element")
    for i, a in enumerate(transversal):
        for b in transversal[i + 1:]:
            if H.mul(H.inv(a.h), b.h) in stab:
                raise BadTransversal(f"{a} and {b} lie in the same coset of the stabilizer")
    rep = Rep(group, sigma, transversal, ())
    mats = tuple((name, rep.element_matrix(g)) for name, g in group.generators.items())
    return Rep(group, sigma, transversal, mats)


def rep_of_word(rep: Rep, word) -> MonoMatrix:
    out = mono_identity(rep.dim)
    for name, e in parse_word(word):
        out = mono_matmul(out, mono_power(rep.matrix(name), e))
    return out


@dataclass
class CheckReport:
    items: list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    def failures(self) -> list[tuple[str, bool, str]]:
        return [it for it in self.items if not it[1]]


def verify_rep(
    group: CrystGroup,
    rep,
    relations: Optional[Iterable[tuple]] = None,
    expectations: Optional[Mapping] = None,
    tol: float = 1e-9,
) -> CheckReport:
    """Check defining relations (and optional expected word matrices).

    Works on exact :class:`Rep` (exact Monomial equality) and on
    :class:`NumericRep` (entrywise within ``tol``).
    """
    relations = group.relations if relations is None else [(parse_word(a), parse_word(b)) for a, b in relations]
    numeric = isinstance(rep, NumericRep)
    items = []

    def same(A, B) -> bool:
        if numeric:
            return bool(np.allclose(A, B, atol=tol, rtol=0))
        return A == B

    for a, b in relations:
        A, B = rep.word_matrix(a), rep.word_matrix(b)
        items.append((f"{format_word(a)} = {format_word(b)}", same(A, B), ""))
    for word, expected in (expectations or {}).items():
        w = parse_word(word)
        got = rep.word_matrix(w)
        if not numeric and not isinstance(expected, tuple):
            expected = parse_matrix(expected)
        ok = same(got, expected)
        detail = "" if ok or numeric else f"got {render_matrix(got, rep.symbols)}"
        items.append((f"pi({format_word(w)})", ok, detail))
    return CheckReport(items)


def restrict_to_lattice(rep: Rep) -> Counter:
    """Characters on the diagonal of the lattice matrices, with multiplicity.

    Also checks the result is the orbit of the inducing character with
    uniform multiplicity.
    """
    G = rep.group
    mats = [rep.element_matrix(t) for t in G.lattice_basis()]
    for M in mats:
        for i in range(rep.dim):
            for j in range(rep.dim):
                if i != j and M[i][j] is not None:
                    raise NotDiagonalOnLattice(f"off-diagonal entry at ({i}, {j})")
    chars = Counter(Character(tuple(M[i][i] for M in mats), rep.symbols) for i in range(rep.dim))
    expected = {c for _, c in orbit(G, rep.sigma.base)}
    if set(chars) != expected or len(set(chars.values())) != 1:
        raise ElementEscapes(
            f"lattice restriction {[str(c) for c in chars]} is not a uniform multiple of the orbit"
        )
    return chars


# -- numeric ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NumericRep:
    """A complex matrix representation of a crystallographic group.

    ``matrices`` holds the named generators; ``element_fn`` gives the
    matrix of any element (needed for traces over coset lifts).
    """

    group: CrystGroup
    dim: int
    matrices: Mapping[str, np.ndarray]
    element_fn: Callable[[GroupElement], np.ndarray]

    def element_matrix(self, g: GroupElement) -> np.ndarray:
        return self.element_fn(g)

    def word_matrix(self, word) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for name, e in parse_word(word):
            if name not in self.matrices:
                raise UnknownGenerator(f"unknown generator {name!r}")
            M = self.matrices[name]
            out = out @ np.linalg.matrix_power(M if e >= 0 else M.conj().T, abs(e))
        return out

    @classmethod
    def from_quotient(cls, group: CrystGroup, label_matrices: Mapping[str, np.ndarray]) -> "NumericRep":
        """Pull back a representation of the holonomy group."""
        mats = {k: np.asarray(v, dtype=complex) for k, v in label_matrices.items()}
        dim = next(iter(mats.values())).shape[0]
        return cls(
            group, dim,
            {name: mats[g.h] for name, g in group.generators.items()},
            lambda g: mats[g.h],
        )

    def direct_sum(self, other: "NumericRep") -> "NumericRep":
        def block(A, B):
            out = np.zeros((self.dim + other.dim,) * 2, dtype=complex)
            out[: self.dim, : self.dim] = A
            out[self.dim:, self.dim:] = B
            return out

        return NumericRep(
            self.group, self.dim + other.dim,
            {k: block(self.matrices[k], other.matrices[k]) for k in self.matrices},
            lambda g: block(self.element_fn(g), other.element_fn(g)),
        )


def evaluate(rep: Rep, assignment: Mapping[str, complex], tol: float = 1e-12) -> NumericRep:
    for s in rep.symbols:
        if s not in assignment:
            raise MissingSymbol(f"no value for symbol {s!r}")
        if abs(abs(complex(assignment[s])) - 1) > tol:
            raise OffCircleValue(f"{s} = {assignment[s]} is not on the unit circle")
    assignment = {s: complex(assignment[s]) for s in rep.symbols}
    return NumericRep(
        rep.group, rep.dim,
        {name: evaluate_matrix(M, assignment) for name, M in rep.matrices},
        lambda g: evaluate_matrix(rep.element_matrix(g), assignment),
    )


def is_unitary(M: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.allclose(M @ M.conj().T, np.eye(M.shape[0]), atol=tol, rtol=0))
