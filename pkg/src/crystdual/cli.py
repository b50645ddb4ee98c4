"""Command-line front end.

Exit codes: 0 ok, 1 check failed, 2 invalid input, 3 computation error,
4 reference mismatch.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Optional, Sequence

from .algebra import GroupAlgebraElement, augmentation_criteria, gauss, psi, quasi_basis_sum, reconstruct
from .builtins import BUILTINS, builtin
from .certify import certify_cyclic, render_tree, verify_certificate
from .core import CrystGroup, eval_word, format_word, is_torsion_free, load_group
from .errors import ComputationError, CrystError, MalformedConfig, ValidationError
from .golden import hw_verify, load_golden
from .limits import Stratum, hw_classical_strata, classical_transversal, shielded_scan
from .mackey import extend_character, induce, verify_rep
from .torus import Character, fixed_points, orbit, stabilizer

EXIT_OK, EXIT_FAILED, EXIT_VALIDATION, EXIT_COMPUTATION, EXIT_GOLDEN = 0, 1, 2, 3, 4

HW_ROOTS = {"u": "a", "v": "b", "w": "c"}


def _group(args) -> CrystGroup:
    if args.input:
        return load_group(args.input)
    return builtin(args.builtin or "hantzsche-wendt")


def _is_hw(args) -> bool:
    return not args.input and (args.builtin or "hantzsche-wendt") == "hantzsche-wendt"


def default_strata(group: CrystGroup) -> list[Character]:
    """One symbol per coordinate, then the fully generic point."""
    n = group.rank
    names = ["u", "v", "w"] if n <= 3 else [f"s{i + 1}" for i in range(n)]
    out = []
    for i in range(n):
        out.append(Character.parse("(" + ",".join(names[i] if j == i else "1" for j in range(n)) + ")"))
    if n > 1:
        out.append(Character.parse("(" + ",".join(names[:n]) + ")"))
    return out


def _strata(args, group) -> list[Character]:
    if args.stratum:
        out = []
        for s in args.stratum:
            chi = Character.parse(s)
            if chi.rank != group.rank:
                raise MalformedConfig(f"stratum {s} has {chi.rank} coordinates, group has rank {group.rank}")
            out.append(chi)
        return out
    return default_strata(group)


def _transversal(args, group):
    if not args.transversal:
        return None
    return [eval_word(group, w) for w in args.transversal.split(",")]


def _emit(args, data: dict, pretty: str):
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=False))
    else:
        print(pretty)


def _matrix_block(name: str, rows) -> str:
    width = max((len(c) for r in rows for c in r), default=1)
    lines = [f"pi({name}) ="]
    for r in rows:
        lines.append("  [ " + "  ".join(c.rjust(width) for c in r) + " ]")
    return "\n".join(lines)


# -- commands ------------------------------------------------------------------

def cmd_check(args) -> int:
    G = _group(args)
    rels = []
    for a, b in G.relations:
        ok = eval_word(G, a) == eval_word(G, b)
        rels.append({"relation": f"{format_word(a)} = {format_word(b)}", "ok": ok})
    tf = is_torsion_free(G)
    ok = all(r["ok"] for r in rels) and tf.torsion_free
    data = {
        "group": G.name,
        "rank": G.rank,
        "holonomy_order": len(G.holonomy),
        "valid": True,
        "relations": rels,
        "torsion_free": tf.torsion_free,
        "torsion_witness": tf.witness.to_json() if tf.witness else None,
        "ok": ok,
    }
    lines = [f"group {G.name or '(unnamed)'}: rank {G.rank}, |H| = {len(G.holonomy)}, invariants valid"]
    lines += [f"  {'ok  ' if r['ok'] else 'FAIL'} {r['relation']}" for r in rels]
    lines.append(f"  torsion-free: {tf.torsion_free}" + (f" (witness {tf.witness})" if tf.witness else ""))
    lines.append("PASS" if ok else "FAIL")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_orbits(args) -> int:
    G = _group(args)
    try:
        fixed = [c.render() for c in fixed_points(G)]
        fixed_note = None
    except ComputationError as exc:
        fixed, fixed_note = None, f"{type(exc).__name__}: {exc}"
    records = []
    for chi in _strata(args, G):
        orb = orbit(G, chi)
        stab = stabilizer(G, chi)
        records.append({
            "stratum": chi.render(),
            "orbit": [{"via": h, "point": c.render()} for h, c in orb],
            "stabilizer": list(stab.labels),
            "orbit_stabilizer": len(orb) * len(stab.labels) == len(G.holonomy),
        })
    data = {"group": G.name, "fixed_points": fixed, "fixed_points_note": fixed_note, "strata": records}
    lines = [f"fixed points: {len(fixed)}" if fixed is not None else f"fixed points: {fixed_note}"]
    if fixed:
        lines.append("  " + " ".join(fixed))
    for r in records:
        pts = ", ".join(p["point"] for p in r["orbit"])
        lines.append(f"{r['stratum']}: orbit length {len(r['orbit'])} {{{pts}}}, stabilizer {{{', '.join(r['stabilizer'])}}}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_induce(args) -> int:
    G = _group(args)
    out, lines = [], []
    for chi in _strata(args, G):
        trans = _transversal(args, G)
        roots = None
        if args.paper_basis:
            if not _is_hw(args):
                raise MalformedConfig("--paper-basis is only defined for the hantzsche-wendt group")
            trans = trans or classical_transversal(G, chi)
            if trans is None:
                raise MalformedConfig(f"no classical transversal for stratum {chi}")
            roots = HW_ROOTS
        sigmas = extend_character(G, chi, stabilizer(G, chi), roots)
        for sigma in sigmas:
            rep = induce(G, sigma, trans)
            check = verify_rep(G, rep)
            rendered = rep.render()
            out.append({
                "stratum": chi.render(),
                "extension": sigma.describe(),
                "transversal": [t.to_json() for t in rep.transversal],
                "matrices": rendered,
                "relations_ok": check.ok,
                "rep": rep.to_json(),
            })
            lines.append(f"stratum {chi}  [{sigma.describe()}]  dim {rep.dim}")
            lines.append("transversal: " + ", ".join(str(t) for t in rep.transversal))
            for name, rows in rendered.items():
                lines.append(_matrix_block(name, rows))
            lines.append(f"relations: {'ok' if check.ok else 'FAIL'}")
            lines.append("")
    _emit(args, {"group": G.name, "representations": out}, "\n".join(lines).rstrip())
    return EXIT_OK if all(r["relations_ok"] for r in out) else EXIT_FAILED


def cmd_shielded(args) -> int:
    G = _group(args)
    if args.stratum:
        strata = [Stratum(c) for c in _strata(args, G)]
    elif _is_hw(args):
        strata = hw_classical_strata(G)
    else:
        strata = [Stratum(c) for c in default_strata(G)]
    report = shielded_scan(G, strata, tol=args.tolerance)
    lines = []
    if report.fixed_points is not None:
        lines.append(f"fixed set: {len(report.fixed_points)} characters; trivial isolated: {report.fixed_point_isolation}")
    else:
        lines.append("fixed set: not finite")
    header = ("stratum", "orbit", "limit decomposition", "witness")
    rows = [
        (
            r.stratum.render(),
            str(r.orbit_length),
            " + ".join(f"{m}*{e.render()}" if m > 1 else e.render() for e, m in r.decomposition.items()),
            r.nontrivial_witness.render() if r.nontrivial_witness else "-",
        )
        for r in report.strata
    ]
    widths = [max(len(x) for x in col) for col in zip(header, *rows)]
    for row in [header] + rows:
        lines.append(" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    verdict = report.verdict + (f" ({report.reason})" if report.reason else "")
    lines.append(f"verdict: {verdict} [stratum-certified]")
    _emit(args, report.to_json(), "\n".join(lines))
    return EXIT_OK


_TERM = re.compile(r"^\s*(?:(?P<coef>[^*]+)\*)?(?P<word>.*)$")


def parse_element(group: CrystGroup, text: str) -> GroupAlgebraElement:
    """Parse ``"x + 2*y z - i*x^2 + 1/2*e"`` into a group-algebra element.

    Coefficients are rationals, ``i``, or a rational followed by ``i``.
    """
    pieces = re.split(r"(?<!\^)\s*([+-])\s*", " " + text.strip())
    sign, acc = 1, GroupAlgebraElement.zero(group)
    for tok in pieces:
        if tok in ("+", "-"):
            sign = 1 if tok == "+" else -1
            continue
        if not tok.strip():
            continue
        m = _TERM.match(tok)
        coef_s = (m.group("coef") or "1").strip()
        if coef_s.endswith("i"):
            im = coef_s[:-1] or "1"
            c = gauss(0, im)
        else:
            c = gauss(coef_s)
        g = eval_word(group, m.group("word").strip() or "e")
        acc = acc + GroupAlgebraElement.of(group, g, c).scale(sign)
        sign = 1
    return acc


def cmd_embed(args) -> int:
    G = _group(args)
    texts = args.element or ["x + 2*y z" if _is_hw(args) else "e"]
    out, lines, ok_all = [], [], True
    for text in texts:
        a = parse_element(G, text)
        M = psi(a)
        round_trip = reconstruct(M) == a
        qb = quasi_basis_sum(a) == a
        by_push, by_exp = augmentation_criteria(a)
        ok_all &= round_trip and qb and by_push == by_exp
        out.append({
            "element": a.to_json(),
            "psi": M.to_json(),
            "diagonal": M.is_diagonal(),
            "reconstruct_ok": round_trip,
            "quasi_basis_ok": qb,
            "in_relative_augmentation": {"push_forward": by_push, "expectation": by_exp},
        })
        lines.append(f"a = {a!r}")
        for r in M.labels:
            for c in M.labels:
                if not M[r, c].is_zero():
                    lines.append(f"  psi[{r},{c}] = {M[r, c]!r}")
        lines.append(f"  reconstruct(psi(a)) == a: {round_trip}; sum_h g_h^-1 E(g_h a) == a: {qb}")
        lines.append(f"  in I(G,H): push-forward {by_push}, expectation {by_exp}")
    _emit(args, {"group": G.name, "elements": out}, "\n".join(lines))
    return EXIT_OK if ok_all else EXIT_FAILED


def cmd_certify(args) -> int:
    G = _group(args)
    cert = certify_cyclic(G)
    ver = verify_certificate(G, cert)
    data = {"group": G.name, "certificate": cert.to_json(), "verification": ver.to_json()}
    lines = [render_tree(cert, G.name or "G")]
    lines.append(f"verification: {'pass' if ver.ok else 'FAIL'} ({len(ver.checks)} checks)")
    for name, detail in ver.failures():
        lines.append(f"  failed: {name} {detail}".rstrip())
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if ver.ok else EXIT_COMPUTATION


def cmd_hw_verify(args) -> int:
    gold = load_golden(args.golden)
    items = hw_verify(gold, tol=args.tolerance)
    diffs = [i for i in items if not i.ok]
    data = {"items": [i.to_json() for i in items], "passed": len(items) - len(diffs), "failed": len(diffs)}
    lines = [f"{'ok  ' if i.ok else 'DIFF'} {i.name}" for i in items]
    for d in diffs:
        lines.append(f"--- {d.name}\n  expected: {json.dumps(d.expected)}\n  got:      {json.dumps(d.got)}")
    lines.append(f"{len(items) - len(diffs)}/{len(items)} items match")
    _emit(args, data, "\n".join(lines))
    return EXIT_GOLDEN if diffs else EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "orbits": cmd_orbits,
    "induce": cmd_induce,
    "shielded": cmd_shielded,
    "embed": cmd_embed,
    "certify": cmd_certify,
    "hw-verify": cmd_hw_verify,
}


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=sorted(BUILTINS), help="built-in group (default hantzsche-wendt)")
    src.add_argument("--input", metavar="PATH", help="group definition JSON")
    common.add_argument("--format", choices=["pretty", "json"], default="pretty")
    common.add_argument("--tolerance", type=_positive_float, default=1e-9, help="numeric matrix tolerance")

    p = argparse.ArgumentParser(prog="crystdual", description="Unitary duals and certificates for crystallographic groups.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="validate a group, its relations and torsion-freeness")
    o = sub.add_parser("orbits", parents=[common], help="fixed characters, orbits and stabilizers")
    o.add_argument("--stratum", action="append", help='e.g. "(u,1,1)"; repeatable')
    i = sub.add_parser("induce", parents=[common], help="induced representations over strata")
    i.add_argument("--stratum", action="append")
    i.add_argument("--transversal", help='comma-separated words, e.g. "e,y"')
    i.add_argument("--paper-basis", action="store_true", help="classical Hantzsche-Wendt transversals and root names")
    s = sub.add_parser("shielded", parents=[common], help="shielded-point scan of the trivial representation")
    s.add_argument("--stratum", action="append")
    e = sub.add_parser("embed", parents=[common], help="quasi-basis embedding of group-algebra elements")
    e.add_argument("--element", action="append", help='e.g. "x + 2*y z - i*x^2"; repeatable')
    sub.add_parser("certify", parents=[common], help="cyclic-holonomy certificate")
    h = sub.add_parser("hw-verify", parents=[common], help="recompute the Hantzsche-Wendt reference data")
    h.add_argument("--golden", metavar="PATH", help="alternative reference file")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CrystError as exc:
        code = EXIT_VALIDATION if isinstance(exc, ValidationError) else EXIT_COMPUTATION
        err = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}
        if args.format == "json":
            print(json.dumps(err, indent=2))
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
