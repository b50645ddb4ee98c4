"""Rank-reduction certificates for torsion-free groups with cyclic holonomy.

A certificate is a tree.  At rank one it is a :class:`Base` recording
``x^m = t^n`` with ``gcd(m, n) = 1`` and the isomorphism
``alpha(x^k t^l) = k n + l m`` onto ``Z``.  Above rank one it is a
:class:`Step` recording a surjection ``phi: G -> Z`` (from the transfer),
the split ``m = a b``, an element ``g`` with ``phi(g) = 1`` whose image
generates the holonomy, and ``ker(phi)`` realized as a crystallographic
group of rank ``n - 1`` together with its embedding in ``G``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Union

from sympy import primefactors

from . import smith
from .core import CrystGroup, GroupElement, HolonomyGroup, fmt_fraction, is_torsion_free
from .errors import (
    CertificateError,
    CrystError,
    NonCyclicHolonomy,
    NotAGenerator,
    NotTorsionFree,
    TrivialTransfer,
)

PSI_GRID = 7
ALPHA_WINDOW = 20


def gen_lift(a: int, b: int, y: int) -> int:
    """Lift a unit ``y`` mod ``b`` to a unit mod ``ab``.

    ``x = y + p_1...p_r b`` where the ``p_i`` are the primes of ``ab``
    not dividing ``y``.  Works for all ``a, b >= 1``.
    """
    if a < 1 or b < 1:
        raise NotAGenerator(f"need a, b >= 1, got a={a}, b={b}")
    y %= b
    if gcd(y, b) != 1:
        raise NotAGenerator(f"{y} is not a unit mod {b}")
    p = 1
    for q in primefactors(a * b):
        if y % q:
            p *= q
    return (y + p * b) % (a * b)


def _solve_row(row, target) -> Optional[tuple[int, ...]]:
    """Integers ``c`` with ``row . c = target``."""
    if not any(row):
        return None if target else (0,) * len(row)
    return smith.solve_integer([list(row)], [target])


def _gcd_all(values) -> int:
    out = 0
    for v in values:
        out = gcd(out, int(v))
    return out


# -- cyclic structure ------------------------------------------------------------

@dataclass(frozen=True)
class CyclicData:
    """Holonomy ``Z/m`` with a chosen generator label and exponents per label."""

    m: int
    generator: str
    exponent: dict

    def x0(self, group: CrystGroup) -> GroupElement:
        return group.lift(self.generator)


def cyclic_data(group: CrystGroup) -> CyclicData:
    H = group.holonomy
    gen = H.cyclic_generator()
    if gen is None:
        raise NonCyclicHolonomy(f"holonomy group of order {len(H)} is not cyclic")
    return CyclicData(len(H), gen, {H.power(gen, k): k for k in range(len(H))})


def transfer(group: CrystGroup, g: GroupElement) -> tuple[int, ...]:
    """Transfer to the lattice with coset representatives ``(a_h, h)``."""
    H = group.holonomy
    total = [0] * group.rank
    for h in H.labels:
        r = group.lift(h)
        r2 = group.lift(H.mul(g.h, h))
        n = group.lattice_vector(group.mul(group.inv(r2), group.mul(g, r)))
        total = [x + y for x, y in zip(total, n)]
    return tuple(total)


def transfer_on_lattice(group: CrystGroup, v) -> tuple[int, ...]:
    """Closed form ``sum_h A_h v`` of the transfer on a translation."""
    total = [0] * group.rank
    for h in group.holonomy.labels:
        total = [x + y for x, y in zip(total, smith.matvec(group.lin[h], v))]
    return tuple(total)


@dataclass(frozen=True)
class PhiData:
    """``phi`` on the lattice basis and on ``x0 = (a_gen, gen)``."""

    lattice: tuple[int, ...]
    x0: int
    coordinate: int = 0
    content: int = 1

    def __call__(self, group: CrystGroup, cyc: CyclicData, g: GroupElement) -> int:
        k = cyc.exponent[g.h]
        xk = group.power(cyc.x0(group), k)
        rest = group.mul(g, group.inv(xk))
        return sum(p * c for p, c in zip(self.lattice, group.lattice_vector(rest))) + k * self.x0

    def to_json(self) -> dict:
        return {"lattice": list(self.lattice), "x0": self.x0, "coordinate": self.coordinate, "content": self.content}


def build_phi(group: CrystGroup) -> PhiData:
    """Surjection ``G -> Z`` from one transfer coordinate divided by its content.

    The coordinate is the one with the largest absolute value on the
    generators ``e_1..e_n, x0``; ties go to the lowest index.
    """
    cyc = cyclic_data(group)
    tf = is_torsion_free(group)
    if not tf.torsion_free:
        raise NotTorsionFree(f"{tf.witness} has finite order")
    gens = group.lattice_basis() + ([cyc.x0(group)] if cyc.m > 1 else [])
    values = [transfer(group, g) for g in gens]
    best, best_val = None, 0
    for j in range(group.rank):
        top = max(abs(v[j]) for v in values)
        if top > best_val:
            best, best_val = j, top
    if best is None:
        raise TrivialTransfer("transfer vanishes on all generators")
    col = [v[best] for v in values]
    content = _gcd_all(col)
    col = [c // content for c in col]
    x0 = col[group.rank] if cyc.m > 1 else 0
    return PhiData(tuple(col[: group.rank]), x0, best, content)


# -- certificates ---------------------------------------------------------------

@dataclass
class Base:
    m: int
    n: int
    x: GroupElement
    t: GroupElement

    def alpha(self, group: CrystGroup, g: GroupElement) -> int:
        """``alpha(x^k t^l) = k n + l m``."""
        k = 0
        if self.m > 1:
            exps = {group.power(self.x, j).h: j for j in range(self.m)}
            k = exps[g.h]
        rest = group.mul(g, group.inv(group.power(self.x, k)))
        (l,) = group.lattice_vector(rest)
        return k * self.n + l * int(self.t.v[0]) * self.m

    @property
    def depth(self) -> int:
        return 1

    def to_json(self) -> dict:
        return {
            "kind": "base",
            "m": self.m,
            "n": self.n,
            "x": self.x.to_json(),
            "t": self.t.to_json(),
            "alpha": f"x^k t^l -> k*{self.n} + l*{self.m}",
        }


@dataclass
class Step:
    m: int
    a: int
    b: int
    phi: PhiData
    phi_named: dict
    g: GroupElement
    kernel_basis: tuple[tuple[int, ...], ...]
    kernel_gen: GroupElement
    sub_translations: tuple[tuple[Fraction, ...], ...]
    sub_group: CrystGroup
    sub: Union["Step", Base]
    notes: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return 1 + self.sub.depth

    def embed(self, parent: CrystGroup, h: GroupElement) -> GroupElement:
        """``(u, j) -> B(u - a'_j) * hH^j``."""
        j = int(h.h)
        shift = tuple(x - y for x, y in zip(h.v, self.sub_translations[j]))
        lat = tuple(sum(col[i] * shift[k] for k, col in enumerate(self.kernel_basis)) for i in range(parent.rank))
        return parent.mul(parent.translation(lat), parent.power(self.kernel_gen, j))

    def unembed(self, parent: CrystGroup, cyc: CyclicData, gamma: GroupElement) -> Optional[GroupElement]:
        """Preimage of ``gamma`` under :meth:`embed`, or None when ``gamma`` is outside ``ker(phi)``."""
        if self.phi(parent, cyc, gamma) != 0:
            return None
        k = cyc.exponent[gamma.h]
        if k % self.b:
            return None
        j = k // self.b
        delta = parent.mul(gamma, parent.inv(parent.power(self.kernel_gen, j)))
        if not parent.is_translation(delta):
            return None
        u = smith.solve_integer(smith.transpose(self.kernel_basis), parent.lattice_vector(delta))
        if u is None:
            return None
        return GroupElement(tuple(x + y for x, y in zip(u, self.sub_translations[j])), str(j))

    def to_json(self) -> dict:
        return {
            "kind": "step",
            "m": self.m,
            "a": self.a,
            "b": self.b,
            "phi": self.phi.to_json(),
            "phi_on_generators": dict(self.phi_named),
            "g": self.g.to_json(),
            "kernel": {
                "basis": [list(c) for c in self.kernel_basis],
                "holonomy_generator": self.kernel_gen.to_json(),
                "translations": [[fmt_fraction(c) for c in t] for t in self.sub_translations],
                "group": self.sub_group.to_config(),
            },
            "notes": list(self.notes),
            "sub": self.sub.to_json(),
        }


Certificate = Union[Step, Base]


def _base(group: CrystGroup) -> Base:
    cyc = cyclic_data(group)
    t = group.translation((1,))
    if cyc.m == 1:
        return Base(1, 0, group.identity(), t)
    x = cyc.x0(group)
    xm = group.power(x, cyc.m)
    if not group.is_translation(xm):
        raise CertificateError("x^m is not a translation")
    if group.lin[cyc.generator] != ((1,),):
        raise NotTorsionFree("holonomy acts by -1 on a rank-1 lattice")
    (n,) = group.lattice_vector(xm)
    m = cyc.m
    d = gcd(m, n)
    if d != 1:
        raise NotTorsionFree(f"x^{m} = t^{n} with gcd {d}")
    return Base(m, n, x, t)


def certify_cyclic(group: CrystGroup) -> Certificate:
    """Build the full certificate tree; every Step is checked on construction."""
    cyc = cyclic_data(group)
    tf = is_torsion_free(group)
    if not tf.torsion_free:
        raise NotTorsionFree(f"{tf.witness} has finite order")
    if group.rank == 1:
        return _base(group)

    n, m = group.rank, cyc.m
    phi = build_phi(group)
    x0 = cyc.x0(group)
    b = _gcd_all(phi.lattice)
    if b == 0 or m % b:
        raise CertificateError(f"phi(Z^n) = {b}Z does not divide the holonomy order {m}")
    a = m // b
    notes = []

    # g' with phi(g') = 1, then correct its holonomy image with an element of ker(phi)
    gens = list(phi.lattice) + [phi.x0]
    coeffs = _solve_row(gens, 1)
    if coeffs is None:
        raise CertificateError("phi is not surjective")
    *lat, c0 = coeffs
    c0 %= m if m > 1 else 1
    lat = _solve_row(phi.lattice, 1 - c0 * phi.x0)
    g1 = group.mul(group.translation(lat), group.power(x0, c0))
    u = phi.x0 % b
    y = pow(u, -1, b) if b > 1 else 0
    target = gen_lift(a, b, y)
    d = (cyc.exponent[g1.h] - target) % m
    if d % b:
        raise CertificateError("holonomy defect is not in the image of ker(phi)")
    w = _solve_row(phi.lattice, -d * phi.x0)
    h = group.mul(group.translation(w), group.power(x0, d))
    g = group.mul(g1, group.inv(h))
    if d:
        notes.append(f"g' = {g1} corrected by kernel element with holonomy exponent {d}")

    # ker(phi) as a rank n-1 crystallographic group
    B = smith.kernel_basis([list(phi.lattice)])
    t0 = _solve_row(phi.lattice, b)
    kernel_gen = group.mul(group.translation(tuple(-phi.x0 * c for c in t0)), group.power(x0, b))
    Ab = group.lin[kernel_gen.h]
    Bmat = smith.transpose(B)
    M_cols = []
    for col in B:
        img = smith.matvec(Ab, col)
        sol = smith.solve_integer(Bmat, img)
        if sol is None:
            raise CertificateError("kernel lattice is not invariant")
        M_cols.append(sol)
    M = smith.transpose(M_cols)
    ha = group.power(kernel_gen, a)
    cvec = smith.solve_integer(Bmat, group.lattice_vector(ha))
    if cvec is None:
        raise CertificateError("hH^a is not in the kernel lattice")
    wvec = tuple(Fraction(c, a) for c in cvec)
    r = n - 1
    lin, trans = {}, {}
    P, t = smith.identity(r), (Fraction(0),) * r
    for j in range(a):
        lin[str(j)] = P
        trans[str(j)] = t
        t = tuple(x + y for x, y in zip(t, smith.matvec(P, wvec)))
        P = smith.matmul(P, M)
    sub_gens = {}
    if a > 1:
        sub_gens["h"] = GroupElement(trans["1"], "1")
    for i, row in enumerate(smith.identity(r)):
        sub_gens[f"t{i + 1}"] = GroupElement(row, "0")
    sub_group = CrystGroup(
        r, HolonomyGroup.cyclic(a), lin, trans, sub_gens, name=f"ker(phi) in {group.name or 'G'}"
    )
    phi_named = {name: phi(group, cyc, el) for name, el in group.generators.items()}
    step = Step(
        m, a, b, phi, phi_named, g, B, kernel_gen,
        tuple(trans[str(j)] for j in range(a)), sub_group, None, notes,
    )
    step.sub = certify_cyclic(sub_group)
    return step


# -- verification ---------------------------------------------------------------

@dataclass
class Verification:
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [(n, d) for n, ok, d in self.checks if not ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks],
        }


def _random_elements(group: CrystGroup, rng: random.Random, count: int, spread: int = 3):
    out = []
    for _ in range(count):
        h = rng.choice(group.holonomy.labels)
        v = tuple(rng.randint(-spread, spread) for _ in range(group.rank))
        out.append(group.mul(group.translation(v), group.lift(h)))
    return out


def verify_certificate(group: CrystGroup, cert: Certificate, seed: int = 0) -> Verification:
    """Re-check every invariant of ``cert`` against ``group``; failures are listed, not raised."""
    report = Verification()
    try:
        _verify(group, cert, report, "", random.Random(seed))
    except CrystError as exc:
        report.add("verification completed", False, f"{type(exc).__name__}: {exc}")
    report.add("depth equals rank", cert.depth == group.rank, f"depth {cert.depth}, rank {group.rank}")
    return report


def _grid_elements(group: CrystGroup, count: int) -> list[GroupElement]:
    """Distinct short words in the generators, identity first."""
    gens = list(group.generators.values())
    cands = [group.identity()]
    for s in gens:
        cands += [s, group.inv(s), group.power(s, 2), group.power(s, -2)]
    for s in gens:
        for t in gens:
            cands.append(group.mul(s, t))
    k = 3
    while len(set(cands)) < count:
        cands += [group.power(s, k) for s in gens] + [group.power(s, -k) for s in gens]
        k += 1
    out = []
    for c in cands:
        if c not in out:
            out.append(c)
    return out[:count]


def _verify(group: CrystGroup, cert: Certificate, rep: Verification, path: str, rng: random.Random):
    try:
        cyc = cyclic_data(group)
    except NonCyclicHolonomy as exc:
        rep.add(f"{path}cyclic holonomy", False, str(exc))
        return
    if isinstance(cert, Base):
        _verify_base(group, cyc, cert, rep, path)
        return
    if group.rank < 2:
        rep.add(f"{path}step above rank 1", False, f"step certificate on a rank-{group.rank} group")
        return
    phi = cert.phi
    m, n = cyc.m, group.rank
    x0 = cyc.x0(group)
    f = lambda g: phi(group, cyc, g)  # noqa: E731

    # phi is a homomorphism: invariant under conjugation by x0 and consistent with x0^m
    invariant = all(
        sum(p * c for p, c in zip(phi.lattice, smith.matvec(group.lin[cyc.generator], e))) == sum(
            p * c for p, c in zip(phi.lattice, e)
        )
        for e in smith.identity(n)
    )
    rep.add(f"{path}phi invariant under holonomy", invariant)
    xm = group.lattice_vector(group.power(x0, m))
    rep.add(f"{path}phi(x0^m) = m phi(x0)", sum(p * c for p, c in zip(phi.lattice, xm)) == m * phi.x0)
    sample = _random_elements(group, rng, 12)
    rep.add(
        f"{path}phi multiplicative on samples",
        all(f(group.mul(p, q)) == f(p) + f(q) for p in sample for q in sample),
    )
    rep.add(f"{path}phi surjective", _gcd_all(list(phi.lattice) + [phi.x0]) == 1)
    rep.add(f"{path}m = a b", cert.m == m and cert.a * cert.b == m, f"m={m}, a={cert.a}, b={cert.b}")
    rep.add(f"{path}phi(Z^n) = bZ", _gcd_all(phi.lattice) == cert.b)

    # g
    in_group = group.contains(cert.g)
    rep.add(f"{path}g in G", in_group)
    if not in_group:
        return
    rep.add(f"{path}phi(g) = 1", f(cert.g) == 1, f"phi(g) = {f(cert.g)}")
    k = cyc.exponent[cert.g.h]
    hits = {(k * j) % m for j in range(m)}
    rep.add(f"{path}pi(g) generates Z/{m}", len(hits) == m, f"pi(g) = {k}")
    gm = group.power(cert.g, m)
    central = group.is_translation(gm) and all(
        group.mul(gm, s) == group.mul(s, gm) for s in group.lattice_basis() + [x0]
    )
    rep.add(f"{path}g^m central", central)

    # kernel lattice and embedding
    B = cert.kernel_basis
    ok_kernel = len(B) == n - 1 and all(sum(p * c for p, c in zip(phi.lattice, col)) == 0 for col in B)
    if ok_kernel and B:
        ok_kernel = smith.snf(smith.transpose(B)).diagonal == (1,) * (n - 1)
    rep.add(f"{path}kernel basis spans ker(phi) on Z^n", ok_kernel)
    sub = cert.sub_group
    rep.add(
        f"{path}kernel generator",
        f(cert.kernel_gen) == 0 and cyc.exponent[cert.kernel_gen.h] == cert.b % m and len(sub.holonomy) == cert.a,
    )
    sub_sample = _random_elements(sub, rng, 8)
    emb = lambda h: cert.embed(group, h)  # noqa: E731
    rep.add(
        f"{path}embedding is a homomorphism",
        all(emb(sub.mul(p, q)) == group.mul(emb(p), emb(q)) for p in sub_sample for q in sub_sample),
    )
    rep.add(f"{path}embedding lands in ker(phi)", all(f(emb(p)) == 0 for p in sub_sample))
    rep.add(f"{path}embedding inverts", all(cert.unembed(group, cyc, emb(p)) == p for p in sub_sample))

    # psi(h, k) = h g^{mk}
    hs = _grid_elements(sub, PSI_GRID)
    ks = range(-(PSI_GRID // 2), PSI_GRID - PSI_GRID // 2)
    psi = lambda h, kk: group.mul(emb(h), group.power(cert.g, m * kk))  # noqa: E731
    images = {psi(h, kk) for h in set(hs) for kk in ks}
    rep.add(f"{path}psi injective on grid", len(images) == len(set(hs)) * len(ks), f"{len(images)} images")
    rep.add(f"{path}psi lands in ker(phi mod m)", all(f(z) % m == 0 for z in images))
    surj = True
    reps = [group.power(cert.g, j) for j in range(m)]
    for s in group.lattice_basis() + [x0]:
        for j in range(m):
            jj = (j + f(s)) % m
            gen = group.mul(group.mul(reps[j], s), group.inv(reps[jj]))
            kk = f(gen) // m
            hpart = group.mul(gen, group.inv(group.power(cert.g, m * kk)))
            pre = cert.unembed(group, cyc, hpart)
            if f(gen) % m or pre is None or psi(pre, kk) != gen:
                surj = False
    rep.add(f"{path}psi hits generators of ker(phi mod m)", surj)
    _verify(sub, cert.sub, rep, path + "sub.", rng)


def _verify_base(group: CrystGroup, cyc: CyclicData, cert: Base, rep: Verification, path: str):
    rep.add(f"{path}rank 1", group.rank == 1)
    if group.rank != 1:
        return
    rep.add(f"{path}holonomy order", cert.m == cyc.m, f"m={cert.m}, |H|={cyc.m}")
    rep.add(f"{path}gcd(m, n) = 1", gcd(cert.m, cert.n) == 1)
    lhs = group.power(cert.x, cert.m)
    rhs = group.power(cert.t, cert.n)
    rep.add(f"{path}x^m = t^n", lhs == rhs, f"x^m = {lhs}, t^n = {rhs}")
    rep.add(f"{path}t generates the lattice", group.is_translation(cert.t) and abs(cert.t.v[0]) == 1)
    gen_ok = cert.m == 1 or (group.contains(cert.x) and len({group.power(cert.x, j).h for j in range(cert.m)}) == cert.m)
    rep.add(f"{path}x generates holonomy", gen_ok)
    if not (gen_ok and lhs == rhs and group.is_translation(cert.t)):
        return
    W = ALPHA_WINDOW
    L = W // max(1, cert.m) + abs(cert.n) + 2
    values = {}
    collision = False
    for k in range(cert.m):
        for l in range(-L, L + 1):
            g = group.mul(group.power(cert.x, k), group.power(cert.t, l))
            val = cert.alpha(group, g)
            if val != k * cert.n + l * cert.m or val in values:
                collision = True
            values[val] = g
    bij = not collision and all(v in values for v in range(-W, W + 1))
    rep.add(f"{path}alpha bijective on window", bij)
    xs = [group.mul(group.power(cert.x, k), group.power(cert.t, l)) for k in range(cert.m) for l in (-1, 0, 2)]
    rep.add(
        f"{path}alpha multiplicative",
        all(cert.alpha(group, group.mul(p, q)) == cert.alpha(group, p) + cert.alpha(group, q) for p in xs for q in xs),
    )


# -- rendering ------------------------------------------------------------------

def render_tree(cert: Certificate, group_name: str = "G", indent: str = "") -> str:
    if isinstance(cert, Base):
        return (
            f"{indent}Base: x^{cert.m} = t^{cert.n}, gcd = 1, "
            f"alpha(x^k t^l) = k*{cert.n} + l*{cert.m}  (x = {cert.x})"
        )
    phi = ", ".join(f"{k}:{v}" for k, v in cert.phi_named.items())
    lines = [
        f"{indent}Step on {group_name} (rank {len(cert.kernel_basis) + 1}): m = {cert.m} = {cert.a}*{cert.b}",
        f"{indent}  phi on generators: {phi or '(lattice only)'}; on lattice basis {list(cert.phi.lattice)}",
        f"{indent}  g = {cert.g}",
        f"{indent}  ker(phi): basis {[list(c) for c in cert.kernel_basis]}, holonomy Z/{cert.a} via {cert.kernel_gen}",
    ]
    lines.append(render_tree(cert.sub, cert.sub_group.name, indent + "  "))
    return "\n".join(lines)

