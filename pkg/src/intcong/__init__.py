"""Exact solver for systems of congruences modulo gcds, and the cohomology
of complexes built from families of subgroups."""

from .abgroup import FPGroup, Invariants, Subgroup
from .cochain import FULL, INCREASING, FamilyCochain, FamilyComplex, RefinementMap, SubgroupFamily
from .intlin import IntMatrix, hnf, snf
from .solver import CocycleViolation, CongruenceInstance, Solution, check_cocycle, solve, verify

__all__ = [
    "FPGroup", "Invariants", "Subgroup",
    "FULL", "INCREASING", "FamilyCochain", "FamilyComplex", "RefinementMap", "SubgroupFamily",
    "IntMatrix", "hnf", "snf",
    "CocycleViolation", "CongruenceInstance", "Solution", "check_cocycle", "solve", "verify",
]
__version__ = "0.1.0"
