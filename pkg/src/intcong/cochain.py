"""Cochain complexes attached to a family of subgroups.

For a family ``(A_i)`` of subgroups of ``A`` indexed by an ordered finite
set, the degree-``n`` term is the product over admissible ``(n+1)``-tuples
``t`` of ``A / (A_{t_0} + ... + A_{t_n})`` and

    (df)(t) = sum_j (-1)^j f(t with entry j deleted)

reduced modulo the subgroup sum of ``t``.  Two tuple conventions are
supported: ``"full"`` (all tuples, repetitions allowed) and
``"increasing"`` (strictly increasing in the family's index order).  In the
increasing complex a cochain is read on other tuples through its
alternating extension (zero on repeated entries, sign of the sorting
permutation otherwise).

Cochain values are stored as ambient representatives; reduction happens
when values are compared or emitted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .abgroup import (
    AmbientMismatch, Cohomology, FPGroup, Invariants, Subgroup, fp_cohomology, subgroup_sum,
)
from .intlin import Infeasible, IntMatrix, solve_integer

FULL = "full"
INCREASING = "increasing"
MODES = (FULL, INCREASING)

DEFAULT_MAX_DEGREE = 4

# Test hook for the self-test's mutation check: flips the sign of the
# j = 1 face in every coboundary computed by this package.
SIGN_FLIP_FOR_SELFTEST = False


class DegreeOverflow(ValueError):
    pass


class ContainmentViolation(ValueError):
    pass


def face(t: tuple, j: int) -> tuple:
    return t[:j] + t[j + 1:]


def face_sign(j: int) -> int:
    s = -1 if j % 2 else 1
    if SIGN_FLIP_FOR_SELFTEST and j == 1:
        s = -s
    return s


def sort_sign(t: Sequence, key=None) -> tuple[int, tuple]:
    """Return ``(sign, sorted_t)``: the signature of the sorting permutation,
    or 0 when ``t`` has a repeated entry."""
    keys = [key(x) if key else x for x in t]
    if len(set(keys)) < len(keys):
        return 0, tuple(sorted(t, key=key))
    inversions = sum(1 for a, b in itertools.combinations(keys, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(t, key=key))


def _add(u: Sequence[int], v: Sequence[int], c: int = 1) -> tuple[int, ...]:
    return tuple(a + c * b for a, b in zip(u, v))


class SubgroupFamily:
    """An indexed family of subgroups of one ambient group.  The order of
    ``labels`` is the index order used by increasing tuples."""

    def __init__(self, ambient: FPGroup, subgroups: Mapping[Hashable, Subgroup] | Sequence[Subgroup],
                 labels: Sequence[Hashable] = None):
        if isinstance(subgroups, Mapping):
            labels = list(subgroups) if labels is None else list(labels)
            members = {i: subgroups[i] for i in labels}
        else:
            subgroups = list(subgroups)
            labels = list(range(len(subgroups))) if labels is None else list(labels)
            if len(labels) != len(subgroups):
                raise ValueError("one label per subgroup is required")
            members = dict(zip(labels, subgroups))
        if len(members) != len(labels):
            raise ValueError("family labels must be distinct")
        for S in members.values():
            if S.ambient != ambient:
                raise AmbientMismatch("family member does not live in the ambient group")
        self.ambient = ambient
        self.labels = tuple(labels)
        self.members = members
        self.position = {i: k for k, i in enumerate(self.labels)}

    def __getitem__(self, label) -> Subgroup:
        return self.members[label]

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def relabeled(self, mapping: Mapping) -> SubgroupFamily:
        """Same subgroups under new labels; the index order follows the new
        labels' natural order."""
        new = {mapping[i]: self.members[i] for i in self.labels}
        return SubgroupFamily(self.ambient, new, sorted(new))

    def __repr__(self):
        return f"SubgroupFamily({dict(self.members)!r})"


@dataclass
class FamilyCochain:
    """Degree-``n`` cochain: ambient representatives on ``(n+1)``-tuples.
    Missing tuples read as zero."""
    degree: int
    values: dict = field(default_factory=dict)


class FamilyComplex:
    def __init__(self, family: SubgroupFamily, mode: str = FULL, max_degree: int = DEFAULT_MAX_DEGREE):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.family = family
        self.mode = mode
        self.max_degree = max_degree
        self._tuples = {}
        self._moduli = {}

    @property
    def ambient(self) -> FPGroup:
        return self.family.ambient

    @property
    def rank(self) -> int:
        return self.ambient.rank

    def _check_degree(self, n: int):
        if n < 0 or n > self.max_degree:
            raise DegreeOverflow(f"degree {n} outside 0..{self.max_degree}")

    def tuples(self, n: int) -> list[tuple]:
        """Admissible ``(n+1)``-tuples in lexicographic index order."""
        self._check_degree(n)
        if n not in self._tuples:
            labels = self.family.labels
            if self.mode == FULL:
                ts = itertools.product(labels, repeat=n + 1)
            else:
                ts = itertools.combinations(labels, n + 1)
            self._tuples[n] = list(ts)
        return self._tuples[n]

    def is_admissible(self, t: tuple) -> bool:
        pos = self.family.position
        if any(i not in pos for i in t):
            return False
        return self.mode == FULL or all(pos[a] < pos[b] for a, b in zip(t, t[1:]))

    def modulus(self, t: tuple) -> Subgroup:
        key = frozenset(t)
        if key not in self._moduli:
            self._moduli[key] = subgroup_sum(*(self.family[i] for i in sorted(key, key=self.family.position.get)),
                                             ambient=self.ambient)
        return self._moduli[key]

    def term_group(self, t: tuple) -> FPGroup:
        S = self.modulus(t)
        cols = list(S.generators) + self.ambient.relations.columns()
        return FPGroup(self.rank, IntMatrix.from_columns(cols, self.rank))

    def reduce(self, t: tuple, e: Sequence[int]) -> tuple[int, ...]:
        return self.modulus(t).lattice.reduce(e)

    def is_zero(self, t: tuple, e: Sequence[int]) -> bool:
        return not any(self.reduce(t, e))

    def value(self, f: FamilyCochain, t: tuple) -> tuple[int, ...]:
        """Read ``f`` at any tuple of labels (alternating extension in the
        increasing complex)."""
        if len(t) != f.degree + 1:
            raise ValueError(f"tuple {t} does not match degree {f.degree}")
        zero = self.ambient.zero()
        if self.mode == FULL:
            return tuple(f.values.get(t, zero))
        sign, s = sort_sign(t, key=self.family.position.get)
        if sign == 0:
            return zero
        v = f.values.get(s, zero)
        return tuple(sign * x for x in v)

    def reduced(self, f: FamilyCochain) -> FamilyCochain:
        """Canonical form: every admissible tuple present, values reduced."""
        return FamilyCochain(f.degree, {t: self.reduce(t, self.value(f, t)) for t in self.tuples(f.degree)})

    def equal(self, f: FamilyCochain, g: FamilyCochain) -> bool:
        if f.degree != g.degree:
            return False
        return all(self.is_zero(t, _add(self.value(f, t), self.value(g, t), -1)) for t in self.tuples(f.degree))

    def zero_cochain(self, n: int) -> FamilyCochain:
        return FamilyCochain(n, {})

    # matrix presentation of the terms, for SNF-based computations
    def relations(self, n: int) -> IntMatrix:
        g = self.rank
        ts = self.tuples(n)
        cols = []
        for k, t in enumerate(ts):
            for c in self.term_group(t).relations.columns():
                col = [0] * (g * len(ts))
                col[k * g:(k + 1) * g] = c
                cols.append(col)
        return IntMatrix.from_columns(cols, g * len(ts))

    def coboundary_matrix(self, n: int) -> IntMatrix:
        """Lift of ``d: C^n -> C^{n+1}`` to generator coordinates."""
        g = self.rank
        src = {t: k for k, t in enumerate(self.tuples(n))}
        tgt = self.tuples(n + 1)
        rows = [[0] * (g * len(src)) for _ in range(g * len(tgt))]
        for k, t in enumerate(tgt):
            for j in range(n + 2):
                ft = face(t, j)
                s = face_sign(j)
                col = src[ft]
                for c in range(g):
                    rows[k * g + c][col * g + c] += s
        return IntMatrix(g * len(tgt), g * len(src), rows)

    def to_vector(self, f: FamilyCochain) -> list[int]:
        out = []
        for t in self.tuples(f.degree):
            out.extend(self.value(f, t))
        return out

    def from_vector(self, n: int, vec: Sequence[int]) -> FamilyCochain:
        g = self.rank
        return FamilyCochain(n, {t: tuple(vec[k * g:(k + 1) * g]) for k, t in enumerate(self.tuples(n))})


def coboundary(C: FamilyComplex, f: FamilyCochain) -> FamilyCochain:
    n = f.degree + 1
    C._check_degree(n)
    out = {}
    for t in C.tuples(n):
        v = C.ambient.zero()
        for j in range(n + 1):
            v = _add(v, C.value(f, face(t, j)), face_sign(j))
        out[t] = C.reduce(t, v)
    return FamilyCochain(n, out)


def is_cocycle(C: FamilyComplex, a: FamilyCochain) -> tuple[bool, list[tuple]]:
    """``(True, [])`` if ``da`` vanishes, else ``(False, witnesses)`` listing
    every tuple where it does not."""
    da = coboundary(C, a)
    bad = [t for t, v in da.values.items() if any(v)]
    return not bad, bad


def cohomology_classes(C: FamilyComplex, n: int) -> Cohomology:
    """``H^n`` with representative cocycles (as generator vectors of
    ``C^n``).  ``H^0`` is the kernel of ``d`` with no augmentation."""
    C._check_degree(n + 1)
    d_prev = C.coboundary_matrix(n - 1) if n > 0 else None
    return fp_cohomology(d_prev, C.relations(n), C.coboundary_matrix(n), C.relations(n + 1))


def cohomology(C: FamilyComplex, n: int) -> Invariants:
    return cohomology_classes(C, n).invariants


def solve_coboundary(C: FamilyComplex, a: FamilyCochain) -> FamilyCochain:
    """Some ``x`` with ``dx == a``; raises :class:`Infeasible` if ``a`` is
    not a coboundary."""
    n = a.degree
    if n == 0:
        if all(C.is_zero(t, C.value(a, t)) for t in C.tuples(0)):
            return None
        raise Infeasible("a nonzero 0-cochain is never a coboundary")
    D = C.coboundary_matrix(n - 1)
    R = C.relations(n)
    A = D.hstack(R) if R.cols else D
    y = solve_integer(A, C.to_vector(a))
    return C.from_vector(n - 1, y[:D.cols])


def increasing_vs_full_check(C_full: FamilyComplex, C_incr: FamilyComplex, n: int) -> bool:
    if C_full.mode != FULL or C_incr.mode != INCREASING:
        raise ValueError("expected a full complex and an increasing complex")
    return cohomology(C_full, n) == cohomology(C_incr, n)


class RefinementMap:
    """``tau: J -> I`` with ``A_{tau j}`` contained in ``B_j``; induces a
    cochain map from the complex over ``I`` to the complex over ``J``."""

    def __init__(self, source: FamilyComplex, target: FamilyComplex, tau: Mapping):
        if source.ambient != target.ambient:
            raise AmbientMismatch("refinement between families in different ambient groups")
        self.source = source
        self.target = target
        self.tau = dict(tau)
        for j in target.family.labels:
            if j not in self.tau:
                raise ContainmentViolation(f"refinement map undefined at {j!r}")
            i = self.tau[j]
            if i not in source.family.position:
                raise ContainmentViolation(f"{j!r} maps to unknown index {i!r}")
            if not source.family[i] <= target.family[j]:
                raise ContainmentViolation(f"A_{i} is not contained in B_{j}")

    def __call__(self, j):
        return self.tau[j]

    def compose(self, other: RefinementMap) -> RefinementMap:
        """``self`` after ``other``: for ``other: K -> J`` and ``self: J -> I``
        the composite ``K -> I``."""
        if other.source is not self.target and other.source.family.labels != self.target.family.labels:
            raise ValueError("refinement maps do not compose")
        return RefinementMap(self.source, other.target, {k: self.tau[other.tau[k]] for k in other.tau})


def induced_map(r: RefinementMap, f: FamilyCochain) -> FamilyCochain:
    S, T = r.source, r.target
    out = {}
    for t in T.tuples(f.degree):
        out[t] = T.reduce(t, S.value(f, tuple(r.tau[j] for j in t)))
    return FamilyCochain(f.degree, out)


def refinement_homotopy(r_tau: RefinementMap, r_sigma: RefinementMap, f: FamilyCochain) -> FamilyCochain | None:
    """The prism operator: a degree ``n-1`` cochain over ``J`` with
    ``dh + hd = sigma - tau``.  Returns ``None`` in degree 0."""
    S, T = r_tau.source, r_tau.target
    if r_sigma.source.family.labels != S.family.labels or r_sigma.target.family.labels != T.family.labels:
        raise ValueError("the two refinement maps must share source and target families")
    n = f.degree
    if n == 0:
        return None
    tau, sigma = r_tau.tau, r_sigma.tau
    out = {}
    for t in T.tuples(n - 1):
        v = S.ambient.zero()
        for k in range(n):
            mixed = tuple(tau[j] for j in t[:k + 1]) + tuple(sigma[j] for j in t[k:])
            v = _add(v, S.value(f, mixed), -1 if k % 2 else 1)
        out[t] = T.reduce(t, v)
    return FamilyCochain(n - 1, out)


def homotopy_defects(r_tau: RefinementMap, r_sigma: RefinementMap, f: FamilyCochain) -> list[tuple]:
    """Tuples where ``dh f + h df`` differs from ``sigma f - tau f``."""
    S, T = r_tau.source, r_tau.target
    n = f.degree
    hf = refinement_homotopy(r_tau, r_sigma, f)
    hdf = refinement_homotopy(r_tau, r_sigma, coboundary(S, f))
    dhf = coboundary(T, hf) if hf is not None else T.zero_cochain(n)
    sf, tf = induced_map(r_sigma, f), induced_map(r_tau, f)
    bad = []
    for t in T.tuples(n):
        lhs = _add(T.value(dhf, t), T.value(hdf, t))
        rhs = _add(T.value(sf, t), T.value(tf, t), -1)
        if not T.is_zero(t, _add(lhs, rhs, -1)):
            bad.append(t)
    return bad


def tautological(C: FamilyComplex) -> tuple[FamilyComplex, RefinementMap, RefinementMap]:
    """The family of distinct members of ``C``'s family, indexed by
    themselves, with the natural surjection ``pi: I -> J`` and a section
    ``iota: J -> I``.  Returns ``(C_J, pi, iota)`` where ``pi`` induces
    ``C(J) -> C(I)`` and ``iota`` induces ``C(I) -> C(J)``."""
    fam = C.family
    firsts = {}
    pi = {}
    for i in fam.labels:
        key = fam[i].key()
        firsts.setdefault(key, i)
        pi[i] = list(firsts).index(key)
    J = SubgroupFamily(fam.ambient, [fam[i] for i in firsts.values()])
    C_J = FamilyComplex(J, C.mode, C.max_degree)
    iota = {k: i for k, i in enumerate(firsts.values())}
    return C_J, RefinementMap(C_J, C, pi), RefinementMap(C, C_J, iota)
