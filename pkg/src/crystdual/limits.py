"""Limits of induced families as symbols tend to 1, and the shielded-point scan.

A stratum such as ``(u,1,1)`` stands for the radial family ``u_n -> 1``.
Its limit is a representation trivial on the lattice, hence a
representation of the holonomy group, which decomposes into characters
of ``H`` when ``H`` is abelian.  The trivial representation is
stratum-certified shielded when it is isolated among fixed characters and
every family approaching it also approaches a nontrivial character.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .core import CrystGroup, GroupElement, fmt_fraction
from .errors import (
    ComputationError,
    DoesNotFactor,
    InfiniteFixedLocus,
    NonabelianQuotient,
    NonIntegerMultiplicity,
)
from .mackey import NumericRep, Rep, evaluate, extend_character, induce
from .torus import Character, fixed_points, orbit, root_of_unity, stabilizer

MATRIX_TOL = 1e-9
MULTIPLICITY_TOL = 1e-6


def limit_rep(rep: Rep) -> NumericRep:
    """Evaluate every symbol at 1."""
    return evaluate(rep, {s: 1.0 for s in rep.symbols})


@dataclass(frozen=True)
class HCharacter:
    """A one-dimensional character of an abelian holonomy group, as angles per label."""

    values: tuple[tuple[str, Fraction], ...]

    def __call__(self, h: str) -> complex:
        return root_of_unity(dict(self.values)[h])

    def angle(self, h: str) -> Fraction:
        return dict(self.values)[h]

    @property
    def is_trivial(self) -> bool:
        return all(a == 0 for _, a in self.values)

    def render(self) -> str:
        if self.is_trivial:
            return "iota"
        return "eta[" + ", ".join(f"{h}:{_angle_str(a)}" for h, a in self.values) + "]"

    def __str__(self):
        return self.render()

    def to_json(self) -> dict:
        return {h: fmt_fraction(a) for h, a in self.values}


def _angle_str(a: Fraction) -> str:
    return {Fraction(0): "1", Fraction(1, 2): "-1", Fraction(1, 4): "i", Fraction(3, 4): "-i"}.get(
        a, f"e({fmt_fraction(a)})"
    )


def quotient_characters(group: CrystGroup) -> list[HCharacter]:
    """All characters of the abelian holonomy group, trivial first."""
    H = group.holonomy
    if not H.is_abelian():
        raise NonabelianQuotient("holonomy group is not abelian")
    basis = H.abelian_basis()
    gens = [h for h, _ in basis]
    orders = [k for _, k in basis]
    coords = {}
    for exps in product(*(range(k) for k in orders)):
        coords[H.express(gens, exps)] = exps
    out = []
    for js in product(*(range(k) for k in orders)):
        values = tuple(
            (h, sum(Fraction(j * e, k) for j, e, k in zip(js, coords[h], orders)) % 1) for h in H.labels
        )
        out.append(HCharacter(values))
    return out


def decompose_through_quotient(
    group: CrystGroup, rep: NumericRep, tol: float = MATRIX_TOL, int_tol: float = MULTIPLICITY_TOL
) -> dict[HCharacter, int]:
    """Multiplicities of the holonomy characters in a rep that is trivial on the lattice.

    ``m_eta = (1/|H|) sum_h conj(eta(h)) trace(M(lift(h)))``.  Characters
    with multiplicity zero are omitted.
    """
    for t in group.lattice_basis():
        if not np.allclose(rep.element_matrix(t), np.eye(rep.dim), atol=tol, rtol=0):
            raise DoesNotFactor(f"lattice element {t} does not act trivially")
    H = group.holonomy
    traces = {h: np.trace(rep.element_matrix(group.lift(h))) for h in H.labels}
    out = {}
    total = 0
    for eta in quotient_characters(group):
        m = sum(np.conj(eta(h)) * traces[h] for h in H.labels) / len(H)
        r = round(m.real)
        if abs(m - r) > int_tol:
            raise NonIntegerMultiplicity(f"multiplicity of {eta} is {m}, not an integer")
        if r:
            out[eta] = int(r)
            total += int(r)
    if total != rep.dim:
        raise NonIntegerMultiplicity(f"multiplicities sum to {total}, dimension is {rep.dim}")
    return out


# -- the scan -------------------------------------------------------------------

@dataclass(frozen=True)
class Stratum:
    character: Character
    transversal: Optional[tuple[GroupElement, ...]] = None
    fresh_names: tuple[tuple[str, str], ...] = ()


@dataclass
class StratumRecord:
    stratum: Character
    orbit_length: int
    transversal: tuple[GroupElement, ...]
    extension: str
    limit_matrices: dict[str, np.ndarray]
    decomposition: dict[HCharacter, int]
    nontrivial_witness: Optional[HCharacter]

    @property
    def approaches_trivial(self) -> bool:
        return any(eta.is_trivial for eta in self.decomposition)

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum.render(),
            "orbit_length": self.orbit_length,
            "transversal": [t.to_json() for t in self.transversal],
            "extension": self.extension,
            "limit_matrices": {
                k: [[_num_str(z) for z in row] for row in M] for k, M in self.limit_matrices.items()
            },
            "decomposition": {eta.render(): m for eta, m in self.decomposition.items()},
            "approaches_trivial": self.approaches_trivial,
            "nontrivial_witness": self.nontrivial_witness.render() if self.nontrivial_witness else None,
        }


def _num_str(z: complex) -> str:
    re_, im = round(z.real, 9) + 0.0, round(z.imag, 9) + 0.0
    if im == 0:
        return f"{re_:g}"
    if re_ == 0:
        return f"{im:g}i"
    return f"{re_:g}{im:+g}i"


@dataclass
class ShieldedReport:
    group: str
    fixed_points: Optional[list[Character]]
    fixed_point_isolation: bool
    strata: list[StratumRecord] = field(default_factory=list)
    verdict: str = "NotCertified"
    reason: str = ""

    @property
    def shielded(self) -> bool:
        return self.verdict == "Shielded"

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "fixed_points": [c.render() for c in self.fixed_points] if self.fixed_points is not None else None,
            "fixed_point_isolation": self.fixed_point_isolation,
            "strata": [r.to_json() for r in self.strata],
            "verdict": self.verdict,
            "reason": self.reason,
            "scope": "stratum-certified: radial families along the listed strata only",
        }


def shielded_scan(group: CrystGroup, strata: Sequence[Stratum], tol: float = MATRIX_TOL) -> ShieldedReport:
    """Collect the finite-dimensional evidence that the trivial rep is shielded.

    1. The trivial character must be isolated in the finite set of fixed
       characters (so no family of fixed-point irreps creeps up on it).
    2. For every stratum and every one-dimensional extension: induce,
       take the limit, decompose, and record a nontrivial constituent as
       witness.  A record without one blocks the verdict.
    """
    try:
        fixed = fixed_points(group)
        isolation = any(c.is_trivial for c in fixed)
        reason = "" if isolation else "trivial character missing from fixed set"
    except InfiniteFixedLocus as exc:
        fixed, isolation, reason = None, False, f"InfiniteFixedLocus: {exc}"
    report = ShieldedReport(group.name, fixed, isolation, reason=reason)

    for st in strata:
        chi = st.character
        bad = [c for c in chi.coords if c.angle != 0]
        if bad:
            raise ComputationError(f"stratum {chi} does not approach the trivial character as symbols -> 1")
        try:
            sigmas = extend_character(group, chi, stabilizer(group, chi), dict(st.fresh_names))
        except ComputationError as exc:
            report.reason = report.reason or f"{type(exc).__name__} at stratum {chi}: {exc}"
            continue
        for sigma in sigmas:
            rep = induce(group, sigma, st.transversal)
            lim = limit_rep(rep)
            dec = decompose_through_quotient(group, lim, tol=tol)
            witness = next((eta for eta in dec if not eta.is_trivial), None)
            rec = StratumRecord(
                chi, len(orbit(group, chi)), rep.transversal, sigma.describe(),
                dict(lim.matrices), dec, witness,
            )
            report.strata.append(rec)
            if witness is None and not report.reason:
                report.reason = f"no nontrivial limit character for stratum {chi} ({sigma.describe()})"

    if report.fixed_point_isolation and not report.reason:
        report.verdict = "Shielded"
    return report


def hw_classical_strata(group: CrystGroup) -> list[Stratum]:
    """The four strata of the Hantzsche-Wendt case analysis with the classical transversals."""
    e = group.identity()
    x, y, z = (group.generators[k] for k in "xyz")
    names = (("u", "a"), ("v", "b"), ("w", "c"))
    return [
        Stratum(Character.parse("(u,1,1)"), (e, y), names),
        Stratum(Character.parse("(1,v,1)"), (e, x), names),
        Stratum(Character.parse("(1,1,w)"), (e, y), names),
        Stratum(Character.parse("(u,v,w)"), (e, x, y, z), names),
    ]


def classical_transversal(group: CrystGroup, chi: Character) -> tuple[GroupElement, ...]:
    """Classical Hantzsche-Wendt transversal for a stratum pattern."""
    e = group.identity()
    x, y, z = (group.generators[k] for k in "xyz")
    symbolic = tuple(not c.is_numeric for c in chi.coords)
    table = {
        (True, False, False): (e, y),
        (False, True, False): (e, x),
        (False, False, True): (e, y),
        (True, True, True): (e, x, y, z),
    }
    if symbolic not in table:
        return None
    return table[symbolic]
