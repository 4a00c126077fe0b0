"""Sublattices of the subgroup lattice, distributivity, and the two
cohomological statements about subgroup families: vanishing for families
generating a distributive lattice, and nonvanishing ``H^1`` for four lines
in general position in ``Z^3``."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Hashable, NamedTuple

from .abgroup import FPGroup, Invariants, Subgroup, quotient, subgroup_intersection, subgroup_sum
from .cochain import (
    FULL, INCREASING, FamilyCochain, FamilyComplex, SubgroupFamily, cohomology, cohomology_classes,
    is_cocycle, solve_coboundary,
)
from .intlin import Infeasible, IntMatrix, rank

DEFAULT_CAP = 10_000
DEFAULT_ROUNDS = 200


class CapExceeded(RuntimeError):
    def __init__(self, message: str, partial: SubgroupLattice):
        super().__init__(message)
        self.partial = partial


class NotDistributive(ValueError):
    def __init__(self, witness):
        super().__init__(f"the generated lattice is not distributive, witness {witness}")
        self.witness = witness


class Inconclusive(ValueError):
    pass


@dataclass
class SubgroupLattice:
    ambient: FPGroup
    elements: tuple[Subgroup, ...]
    generated_from: SubgroupFamily
    complete: bool = True

    def __len__(self):
        return len(self.elements)

    def index(self, S: Subgroup) -> int:
        key = S.key()
        for k, T in enumerate(self.elements):
            if T.key() == key:
                return k
        raise KeyError(S)

    def __contains__(self, S: Subgroup) -> bool:
        return any(T.key() == S.key() for T in self.elements)


class _Ops:
    """Memoized join and meet on subgroup keys."""

    def __init__(self, ambient: FPGroup):
        self.ambient = ambient
        self.by_key = {}
        self._join = {}
        self._meet = {}

    def canon(self, S: Subgroup) -> Subgroup:
        return self.by_key.setdefault(S.key(), S.canonical())

    def join(self, A: Subgroup, B: Subgroup) -> Subgroup:
        k = (A.key(), B.key())
        if k not in self._join:
            self._join[k] = self._join[k[::-1]] = self.canon(subgroup_sum(A, B))
        return self._join[k]

    def meet(self, A: Subgroup, B: Subgroup) -> Subgroup:
        k = (A.key(), B.key())
        if k not in self._meet:
            self._meet[k] = self._meet[k[::-1]] = self.canon(subgroup_intersection(A, B))
        return self._meet[k]


def close(family: SubgroupFamily, cap: int = DEFAULT_CAP, max_rounds: int = DEFAULT_ROUNDS,
          strict: bool = True) -> SubgroupLattice:
    """The sublattice generated by ``family`` under sum and intersection.

    Elements are kept in discovery order, which is deterministic.  If the
    closure does not stabilize within ``cap`` elements and ``max_rounds``
    rounds, raises :class:`CapExceeded` carrying the partial lattice, or
    returns that partial lattice with ``complete=False`` when
    ``strict=False``.
    """
    ops = _Ops(family.ambient)
    elements = []
    seen = set()
    for i in family.labels:
        S = ops.canon(family[i])
        if S.key() not in seen:
            seen.add(S.key())
            elements.append(S)
    frontier = list(range(len(elements)))
    rounds = 0
    while frontier:
        if rounds >= max_rounds or len(elements) > cap:
            partial = SubgroupLattice(family.ambient, tuple(elements), family, complete=False)
            if strict:
                raise CapExceeded(f"closure not stable after {rounds} rounds, {len(elements)} elements", partial)
            return partial
        rounds += 1
        new = []
        fresh = set(frontier)
        n = len(elements)
        for a in range(n):
            for b in range(a + 1, n):
                if a not in fresh and b not in fresh:
                    continue
                for T in (ops.join(elements[a], elements[b]), ops.meet(elements[a], elements[b])):
                    if T.key() not in seen:
                        seen.add(T.key())
                        new.append(T)
                if len(seen) > cap:
                    elements.extend(new)
                    partial = SubgroupLattice(family.ambient, tuple(elements), family, complete=False)
                    if strict:
                        raise CapExceeded(f"closure exceeded {cap} elements in round {rounds}", partial)
                    return partial
        frontier = list(range(n, n + len(new)))
        elements.extend(new)
    if len(elements) > cap:
        partial = SubgroupLattice(family.ambient, tuple(elements), family, complete=False)
        if strict:
            raise CapExceeded(f"closure has {len(elements)} elements, above the cap {cap}", partial)
        return partial
    return SubgroupLattice(family.ambient, tuple(elements), family)


class DistributivityReport(NamedTuple):
    distributive: bool
    witness: tuple[int, int, int] | None       # B, C, D indices: B∩(C+D) != B∩C + B∩D
    dual_witness: tuple[int, int, int] | None  # B+(C∩D) != (B+C)∩(B+D)


def is_distributive(L: SubgroupLattice) -> DistributivityReport:
    """Scan ordered triples lexicographically for a failure of either
    distributive law.  On a complete lattice the two laws must agree; an
    incomplete lattice can only certify failure."""
    ops = _Ops(L.ambient)
    els = [ops.canon(S) for S in L.elements]
    witness = dual = None
    for b, c, d in itertools.product(range(len(els)), repeat=3):
        B, C, D = els[b], els[c], els[d]
        if witness is None:
            if ops.meet(B, ops.join(C, D)).key() != ops.join(ops.meet(B, C), ops.meet(B, D)).key():
                witness = (b, c, d)
        if dual is None:
            if ops.join(B, ops.meet(C, D)).key() != ops.meet(ops.join(B, C), ops.join(B, D)).key():
                dual = (b, c, d)
        if witness is not None and dual is not None:
            break
    if L.complete and (witness is None) != (dual is None):
        raise AssertionError("the two distributive laws disagree on a closed lattice")
    if witness is None and dual is None and not L.complete:
        raise Inconclusive("no failure found, but the lattice is not closed")
    return DistributivityReport(witness is None and dual is None, witness, dual)


def modular_law_holds(B: Subgroup, C: Subgroup, D: Subgroup) -> bool:
    """``D <= B`` implies ``B ∩ (C + D) == (B ∩ C) + D``."""
    if not D <= B:
        return True
    return subgroup_intersection(B, subgroup_sum(C, D)) == subgroup_sum(subgroup_intersection(B, C), D)


class Theorem4Report(NamedTuple):
    cohomology: dict
    holds: bool
    lattice_size: int


def theorem4_harness(family: SubgroupFamily, nmax: int = 2, cap: int = DEFAULT_CAP,
                     mode: str = INCREASING) -> Theorem4Report:
    """``H^n`` for ``1 <= n <= nmax``; refuses families whose generated
    lattice is not distributive."""
    L = close(family, cap=cap)
    rep = is_distributive(L)
    if not rep.distributive:
        raise NotDistributive(rep.witness or rep.dual_witness)
    C = FamilyComplex(family, mode, max_degree=nmax + 1)
    hs = {n: cohomology(C, n) for n in range(1, nmax + 1)}
    return Theorem4Report(hs, all(h.is_trivial for h in hs.values()), len(L))


class ReductionReport(NamedTuple):
    intersections: Invariants   # H^n((B ∩ A_i), A)
    quotients: Invariants       # H^n(((B + A_i)/B), A/B)
    original: Invariants        # H^n((A_i), A)
    distributive: bool | None   # None when the closure hit the cap

    @property
    def hypotheses_vanish(self) -> bool:
        return self.intersections.is_trivial and self.quotients.is_trivial

    @property
    def implication_holds(self) -> bool:
        return not self.hypotheses_vanish or self.original.is_trivial

    @property
    def holds(self) -> bool:
        """The implication is only claimed for distributive families."""
        return self.distributive is not True or self.implication_holds


def reduction_lemma_check(family: SubgroupFamily, B_label: Hashable, n: int,
                          mode: str = INCREASING, cap: int = 500) -> ReductionReport:
    try:
        distributive = is_distributive(close(family, cap=cap)).distributive
    except CapExceeded as exc:
        try:
            distributive = is_distributive(exc.partial).distributive
        except Inconclusive:
            distributive = None
    A = family.ambient
    B = family[B_label]
    labels = family.labels
    meets = SubgroupFamily(A, {i: subgroup_intersection(B, family[i]) for i in labels}, labels)
    AB = quotient(A, B)
    images = SubgroupFamily(AB, {i: Subgroup(AB, family[i].generators) for i in labels}, labels)

    def h(fam):
        return cohomology(FamilyComplex(fam, mode, max_degree=n + 1), n)

    return ReductionReport(h(meets), h(images), h(family), distributive)


@dataclass
class GenericLinesInstance:
    rank: int
    lines: tuple[tuple[int, ...], ...]

    @property
    def ambient(self) -> FPGroup:
        return FPGroup.free(self.rank)

    def family(self) -> SubgroupFamily:
        V = self.ambient
        return SubgroupFamily(V, [Subgroup(V, [v]) for v in self.lines], labels=range(1, len(self.lines) + 1))

    def in_general_position(self) -> bool:
        k = min(len(self.lines), self.rank)
        for sub in itertools.combinations(self.lines, k):
            if rank(IntMatrix.from_columns(sub, self.rank)) != k:
                return False
        return True


def generic_lines(r: int, k: int, seed: int | None = None, retries: int = 1000) -> GenericLinesInstance:
    """``k`` lines through the origin of ``Z^r`` in general position.

    Without a seed the first lines are ``e_1, ..., e_r, (1, ..., 1)`` (so
    ``(3, 4)`` gives the standard frame) and any further ones are drawn from
    a fixed-seed generator."""
    if k < 1 or r < 1:
        raise ValueError("rank and line count must be positive")
    rng = random.Random(0 if seed is None else seed)
    if seed is None:
        base = [tuple(int(i == j) for i in range(r)) for j in range(r)] + [(1,) * r]
        lines = base[:k]
    else:
        lines = []
    for _ in range(retries):
        while len(lines) < k:
            lines.append(tuple(rng.randint(-5, 5) for _ in range(r)))
        inst = GenericLinesInstance(r, tuple(lines))
        if inst.in_general_position():
            return inst
        lines = lines[:min(len(lines), r + 1)] if seed is None else []
    raise RuntimeError("could not draw lines in general position")


class CounterexampleReport(NamedTuple):
    h1: Invariants
    cochain: FamilyCochain | None   # increasing-tuple cocycle with no solution
    is_cocycle: bool
    unsolvable: bool
    full_mode_is_cocycle: bool
    full_mode_unsolvable: bool


def counterexample_h1(inst: GenericLinesInstance) -> CounterexampleReport:
    """``H^1`` of the increasing complex, and, when it is nonzero, a
    1-cocycle lifting a nonzero class: it passes the necessary condition
    but the congruences ``x_j - x_i == a(i, j) (mod L_i + L_j)`` have no
    solution.  The same data is re-checked in the full-tuple complex
    through its alternating extension."""
    if not inst.in_general_position():
        raise ValueError("lines are not in general position")
    fam = inst.family()
    C = FamilyComplex(fam, INCREASING, max_degree=2)
    H = cohomology_classes(C, 1)
    gens = H.free_generators + H.torsion_generators
    if not gens:
        return CounterexampleReport(H.invariants, None, True, False, True, False)
    a = C.from_vector(1, gens[0])
    ok, _ = is_cocycle(C, a)
    unsolvable = _unsolvable(C, a)
    F = FamilyComplex(fam, FULL, max_degree=2)
    a_full = FamilyCochain(1, {t: C.value(a, t) for t in F.tuples(1)})
    ok_full, _ = is_cocycle(F, a_full)
    return CounterexampleReport(H.invariants, a, ok, unsolvable, ok_full, _unsolvable(F, a_full))


def _unsolvable(C: FamilyComplex, a: FamilyCochain) -> bool:
    try:
        solve_coboundary(C, a)
    except Infeasible:
        return True
    return False
