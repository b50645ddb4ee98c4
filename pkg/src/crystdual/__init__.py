"""Unitary duals, shielded-point scans and connectivity certificates for crystallographic groups."""

from .algebra import GroupAlgebraElement, expectation, in_augmentation_relative, psi, reconstruct
from .builtins import builtin, hantzsche_wendt, klein_bottle
from .certify import build_phi, certify_cyclic, gen_lift, transfer, verify_certificate
from .core import CrystGroup, GroupElement, HolonomyGroup, build_group, eval_word, is_torsion_free, load_group
from .limits import decompose_through_quotient, limit_rep, shielded_scan
from .mackey import extend_character, induce, verify_rep
from .torus import Character, Monomial, act, fixed_points, orbit, stabilizer

__all__ = [
    "Character",
    "CrystGroup",
    "GroupAlgebraElement",
    "GroupElement",
    "HolonomyGroup",
    "Monomial",
    "act",
    "build_group",
    "build_phi",
    "builtin",
    "certify_cyclic",
    "decompose_through_quotient",
    "eval_word",
    "expectation",
    "extend_character",
    "fixed_points",
    "gen_lift",
    "hantzsche_wendt",
    "in_augmentation_relative",
    "induce",
    "is_torsion_free",
    "klein_bottle",
    "limit_rep",
    "load_group",
    "orbit",
    "psi",
    "reconstruct",
    "shielded_scan",
    "stabilizer",
    "transfer",
    "verify_certificate",
    "verify_rep",
]
