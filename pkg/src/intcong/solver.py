"""Constructive solver for gcd-congruence systems.

Given a finite set ``I`` of positive integers, a degree ``n >= 1`` and
integers ``a(t)`` on all ``(n+1)``-tuples over ``I``, find integers ``x`` on
``n``-tuples with

    sum_j (-1)^j x(t with entry j deleted) == a(t)   (mod gcd(t))

for every ``(n+1)``-tuple ``t``.  Such ``x`` exists iff ``a`` satisfies the
same alternating-sum condition one degree up.  The solver makes this
effective:

1. check the cocycle condition on all ``(n+2)``-tuples;
2. subtract ``d c`` with ``c = h'(a)`` (the transferred simplicial
   homotopy), leaving data that is alternating mod gcd;
3. for every prime ``p | lcm(I)``, reorder ``I`` by ``p``-adic valuation
   so the local moduli form a decreasing chain, and solve the local
   system by induction on the first entry;
4. glue the local answers by CRT, extend alternatingly, add back ``c``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Sequence

from sympy import primefactors

from .abgroup import p_part, vp
from .cochain import face, face_sign, sort_sign
from .intlin import Congruence, Infeasible, crt, lcm
from .simplicial import homotopy

DEFAULT_BRUTE_FORCE_BUDGET = 10 ** 6


def saturate(m: int, p: int) -> int:
    """``p ** vp(m, p)``: the ideal of ``Z`` obtained by localizing ``mZ``
    at ``p`` and contracting back."""
    return p_part(m, p)


class CocycleViolation(ValueError):
    def __init__(self, witnesses: Sequence[tuple], message: str = None):
        self.witnesses = list(witnesses)
        super().__init__(message or f"cocycle condition fails at {self.witnesses[:5]}"
                         + (" ..." if len(self.witnesses) > 5 else ""))


class NotACocycle(CocycleViolation):
    pass


class Unsolvable(Infeasible):
    pass


class SearchSpaceTooLarge(ValueError):
    pass


class InternalVerificationFailure(AssertionError):
    pass


@dataclass
class CongruenceInstance:
    indices: tuple[int, ...]
    degree: int
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if not idx:
            raise ValueError("the index set is empty")
        if idx[0] < 1:
            raise ValueError("indices must be positive integers")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        self.indices = idx
        data = {}
        for t, v in self.data.items():
            t = tuple(int(i) for i in t)
            if len(t) != self.degree + 1:
                raise ValueError(f"key {t} is not a {self.degree + 1}-tuple")
            if any(i not in idx for i in t):
                raise ValueError(f"key {t} uses an index outside {idx}")
            if v:
                data[t] = int(v)
        self.data = data

    @classmethod
    def from_increasing(cls, indices: Sequence[int], degree: int, data: Mapping) -> CongruenceInstance:
        """Data given on strictly increasing tuples only, extended
        alternatingly (zero on repeated entries)."""
        idx = sorted(set(indices))
        out = {}
        for t, v in data.items():
            if list(t) != sorted(set(t)):
                raise ValueError(f"key {tuple(t)} is not strictly increasing")
        for t in itertools.product(idx, repeat=degree + 1):
            sign, srt = sort_sign(t)
            if sign:
                out[t] = sign * data.get(srt, 0)
        return cls(idx, degree, out)

    def a(self, t: tuple) -> int:
        return self.data.get(t, 0)

    @staticmethod
    def modulus(t: tuple) -> int:
        return gcd(*t)

    @property
    def lcm(self) -> int:
        return lcm(*self.indices)

    def tuples(self, k: int):
        return itertools.product(self.indices, repeat=k)


@dataclass
class Solution:
    x: dict
    modulus: int

    def value(self, t: tuple) -> int:
        return self.x.get(t, 0)


def alternating_sum(values: Mapping, t: tuple) -> int:
    return sum(face_sign(j) * values.get(face(t, j), 0) for j in range(len(t)))


def integer_coboundary(indices: Sequence[int], y: Mapping, n: int) -> dict:
    """``(dy)(t)`` on every ``(n+1)``-tuple, for ``y`` on ``n``-tuples."""
    return {t: alternating_sum(y, t) for t in itertools.product(sorted(indices), repeat=n + 1)}


def check_cocycle(inst: CongruenceInstance) -> tuple[bool, list[tuple]]:
    """The necessary condition on every ``(n+2)``-tuple with repetition."""
    bad = [t for t in inst.tuples(inst.degree + 2) if alternating_sum(inst.data, t) % gcd(*t)]
    return not bad, bad


def verify(inst: CongruenceInstance, sol: Solution) -> tuple[bool, list[tuple]]:
    bad = [t for t in inst.tuples(inst.degree + 1)
           if (alternating_sum(sol.x, t) - inst.a(t)) % gcd(*t)]
    return not bad, bad


@dataclass
class AlternatingReduction:
    a_alt: dict       # strictly increasing (n+1)-tuples -> residues
    correction: dict  # all n-tuples -> integers


def alternating_reduce(inst: CongruenceInstance) -> AlternatingReduction:
    """Split ``a = (alternating part) + d c``.

    ``c = h'(a)``; since ``a`` is a cocycle, ``a - dc`` agrees mod gcd with
    the projection ``(1 - phi') a``, which vanishes on tuples with repeated
    entries and changes sign under odd permutations.
    """
    ok, bad = check_cocycle(inst)
    if not ok:
        raise NotACocycle(bad)
    n = inst.degree
    c = {}
    for s in inst.tuples(n):
        v = sum(lam * inst.a(t) for t, lam in homotopy(s).items())
        if v:
            c[s] = v
    a_alt = {}
    for t in itertools.combinations(inst.indices, n + 1):
        m = gcd(*t)
        a_alt[t] = (inst.a(t) - alternating_sum(c, t)) % m
    return AlternatingReduction(a_alt, c)


def alternating_defects(inst: CongruenceInstance, red: AlternatingReduction) -> list[tuple]:
    """Tuples where ``a - dc`` fails to match the alternating extension of
    ``a_alt`` mod gcd (empty when the reduction is correct)."""
    bad = []
    for t in inst.tuples(inst.degree + 1):
        r = inst.a(t) - alternating_sum(red.correction, t)
        sign, srt = sort_sign(t)
        expected = sign * red.a_alt[srt] if sign else 0
        if (r - expected) % gcd(*t):
            bad.append(t)
    return bad


@dataclass
class LocalInstance:
    """A system over ``Z_(p)`` on labels ``1..N`` with decreasing moduli
    ``p^v(1) >= p^v(2) >= ...``; data on strictly increasing tuples, the
    congruence at ``t`` taken mod ``p^v(t[0])``."""
    p: int
    degree: int
    valuations: tuple[int, ...]
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        self.valuations = tuple(self.valuations)
        if any(a > b for a, b in zip(self.valuations, self.valuations[1:])):
            raise ValueError("valuations must be nondecreasing so the ideals decrease")

    @property
    def N(self) -> int:
        return len(self.valuations)

    def modulus(self, t: tuple) -> int:
        return self.p ** self.valuations[t[0] - 1]

    def tuples(self, k: int):
        return itertools.combinations(range(1, self.N + 1), k)


def local_violations(li: LocalInstance, x: Mapping = None) -> list[tuple]:
    """With ``x=None``: tuples where the local cocycle condition fails.
    Otherwise: tuples where ``dx == a`` fails."""
    if x is None:
        return [t for t in li.tuples(li.degree + 2) if alternating_sum(li.data, t) % li.modulus(t)]
    return [t for t in li.tuples(li.degree + 1)
            if (alternating_sum(x, t) - li.data.get(t, 0)) % li.modulus(t)]


def local_solve(li: LocalInstance) -> dict:
    """Induction on the first entry: ``x(1, ...) = 0`` and, for
    ``i1 > 1`` with ``i0 = i1 - 1``,

        x(i1, ..., in) = -sum_{j=1..n} (-1)^j x(i0, ..., ^ij, ..., in) + a(i0, ..., in).
    """
    bad = local_violations(li)
    if bad:
        raise NotACocycle(bad)
    n = li.degree
    x = {}
    # lexicographic order visits tuples by increasing first entry
    for t in li.tuples(n):
        if t[0] == 1:
            x[t] = 0
            continue
        i0 = t[0] - 1
        full = (i0,) + t
        v = li.data.get(full, 0)
        for j in range(1, n + 1):
            v -= face_sign(j) * x[face(full, j)]
        x[t] = v
    return x


def _local_instance(inst: CongruenceInstance, a_alt: Mapping, p: int) -> tuple[LocalInstance, list[int]]:
    order = sorted(inst.indices, key=lambda i: (vp(i, p), i))
    vals = tuple(vp(i, p) for i in order)
    data = {}
    for t in itertools.combinations(range(1, len(order) + 1), inst.degree + 1):
        sign, srt = sort_sign([order[k - 1] for k in t])
        m = p ** vals[t[0] - 1]
        v = sign * a_alt[srt] % m
        if v:
            data[t] = v
    return LocalInstance(p, inst.degree, vals, data), order


def solve(inst: CongruenceInstance) -> Solution:
    """An integer solution reduced into ``[0, lcm(I))``, or
    :class:`CocycleViolation` carrying every failing ``(n+2)``-tuple."""
    ok, bad = check_cocycle(inst)
    if not ok:
        raise CocycleViolation(bad)
    M = inst.lcm
    n = inst.degree
    if n == 0:
        # x is one constant with x == a(i) mod i
        r = crt(Congruence.make(inst.a((i,)), i) for i in inst.indices)
        sol = Solution({(): r.residue % M}, M)
    else:
        red = alternating_reduce(inst)
        per_prime = {}
        for p in primefactors(M):
            li, order = _local_instance(inst, red.a_alt, p)
            x_loc = local_solve(li)
            label = {i: k + 1 for k, i in enumerate(order)}
            E = max(li.valuations)
            xp = {}
            for t in itertools.combinations(inst.indices, n):
                sign, srt = sort_sign([label[i] for i in t])
                xp[t] = Congruence.make(sign * x_loc[srt], p ** E)
            per_prime[p] = xp
        x_alt = {}
        for t in itertools.combinations(inst.indices, n):
            x_alt[t] = crt(per_prime[p][t] for p in per_prime).residue
        x = {}
        for s in inst.tuples(n):
            sign, srt = sort_sign(s)
            v = (sign * x_alt[srt] if sign else 0) + red.correction.get(s, 0)
            x[s] = v % M
        sol = Solution(x, M)
    ok, bad = verify(inst, sol)
    if not ok:
        raise InternalVerificationFailure(f"solver output violates congruences at {bad[:5]}")
    return sol


def brute_force_solve(inst: CongruenceInstance, budget: int = DEFAULT_BRUTE_FORCE_BUDGET) -> Solution:
    """Exhaustive search over ``x`` with values in ``[0, lcm(I))``.

    Raises :class:`Unsolvable` when no assignment works and
    :class:`SearchSpaceTooLarge` when ``M ** #unknowns`` exceeds ``budget``.
    """
    M = inst.lcm
    unknowns = list(inst.tuples(inst.degree))
    if M ** len(unknowns) > budget:
        raise SearchSpaceTooLarge(f"{M}^{len(unknowns)} assignments exceed budget {budget}")
    pos = {s: k for k, s in enumerate(unknowns)}
    checks = []
    for t in inst.tuples(inst.degree + 1):
        terms = [(face_sign(j), pos[face(t, j)]) for j in range(len(t))]
        checks.append((terms, inst.a(t), gcd(*t)))
    checks = [c for c in checks if c[2] > 1]
    for xs in itertools.product(range(M), repeat=len(unknowns)):
        if all((sum(sg * xs[k] for sg, k in terms) - a) % m == 0 for terms, a, m in checks):
            return Solution(dict(zip(unknowns, xs)), M)
    raise Unsolvable("no assignment in the search range satisfies the system")
