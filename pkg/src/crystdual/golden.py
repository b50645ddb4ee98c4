"""Reference check of the full Hantzsche-Wendt computation against stored values."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .builtins import hantzsche_wendt
from .core import CrystGroup, eval_word, fmt_fraction
from .limits import decompose_through_quotient, hw_classical_strata, limit_rep, shielded_scan
from .mackey import evaluate_matrix, extend_character, induce, parse_matrix, render_matrix, verify_rep
from .torus import Character, act, fixed_points, orbit, stabilizer

TOL = 1e-9


@dataclass
class GoldenItem:
    name: str
    ok: bool
    expected: Any
    got: Any

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "expected": self.expected, "got": self.got}


def load_golden(path: Optional[Union[str, Path]] = None) -> dict:
    if path is None:
        text = resources.files("crystdual").joinpath("data/hw_golden.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _numeric_equal(expected_rows, M: np.ndarray, tol: float = TOL) -> bool:
    E = evaluate_matrix(parse_matrix(expected_rows), {})
    return E.shape == M.shape and bool(np.allclose(E, M, atol=tol, rtol=0))


def _numeric_render(M: np.ndarray) -> list[list[str]]:
    out = []
    for row in M:
        cells = []
        for z in row:
            re_, im = round(z.real, 9) + 0.0, round(z.imag, 9) + 0.0
            cells.append(f"{re_:g}" if im == 0 else f"{re_:g}{im:+g}i")
        out.append(cells)
    return out


def hw_verify(golden: Optional[dict] = None, group: Optional[CrystGroup] = None, tol: float = TOL) -> list[GoldenItem]:
    """Recompute every stored quantity and compare item by item."""
    gold = golden if golden is not None else load_golden()
    G = group or hantzsche_wendt()
    items: list[GoldenItem] = []

    def add(name, expected, got, ok=None):
        items.append(GoldenItem(name, expected == got if ok is None else bool(ok), expected, got))

    for key in ("relations", "conjugations", "identities"):
        for lhs, rhs in gold.get(key, []):
            a, b = eval_word(G, lhs), eval_word(G, rhs)
            add(f"{key}: {lhs} = {rhs}", True, a == b)
    for word, vec in gold.get("squares", {}).items():
        g = eval_word(G, word)
        got = [fmt_fraction(c) for c in g.v] if G.is_translation(g) else str(g)
        add(f"square {word}", vec, got)

    generic = Character.parse("(u,v,w)")
    for h, expected in gold.get("action", {}).items():
        add(f"action of {h}", expected, act(G, G.generators[h].h, generic).render())
    if "fixed_set_size" in gold:
        add("fixed set size", gold["fixed_set_size"], len(fixed_points(G)))
    for text, entry in gold.get("orbits", {}).items():
        chi = Character.parse(text)
        add(f"orbit of {text}", entry["points"], [c.render() for _, c in orbit(G, chi)])
        add(f"stabilizer of {text}", entry["stabilizer"], list(stabilizer(G, chi).labels))

    for fam in gold.get("families", []):
        chi = Character.parse(fam["stratum"])
        trans = [eval_word(G, w) for w in fam["transversal"]]
        sigmas = extend_character(G, chi, stabilizer(G, chi), fam.get("roots", {}))
        rep = induce(G, sigmas[0], trans)
        tag = fam["stratum"]
        for name, rows in fam.get("matrices", {}).items():
            add(f"{tag} pi({name})", rows, render_matrix(rep.matrix(name), rep.symbols))
        for word, rows in fam.get("words", {}).items():
            add(f"{tag} pi({word})", rows, render_matrix(rep.word_matrix(word), rep.symbols))
        rel = verify_rep(G, rep, tol=tol)
        add(f"{tag} relations hold", True, rel.ok)
        if "limit" in fam or "decomposition" in fam:
            lim = limit_rep(rep)
            for name, rows in fam.get("limit", {}).items():
                M = lim.matrices[name]
                add(f"{tag} limit pi({name})", rows, _numeric_render(M), _numeric_equal(rows, M, tol))
            if "decomposition" in fam:
                dec = decompose_through_quotient(G, lim, tol=tol)
                add(f"{tag} limit decomposition", fam["decomposition"], {e.render(): m for e, m in dec.items()})

    if "shielded_verdict" in gold:
        report = shielded_scan(G, hw_classical_strata(G), tol=tol)
        add("shielded verdict", gold["shielded_verdict"], report.verdict)
    return items
