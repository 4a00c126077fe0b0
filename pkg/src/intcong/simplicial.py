"""Singular chains on finite simplicial complexes and coefficient systems.

A singular n-simplex of ``K`` is a tuple ``(s0, ..., sn)`` of vertices whose
underlying set is a simplex.  Chains are finitely supported integer
combinations of singular simplices of one degree.

The key constructions:

* ``phi``: the chain endomorphism fixing noninjective simplices and
  sending an injective ``s`` to ``s - sign(sigma) * sorted(s)``.
* ``carrier_contraction``: the cone on the first vertex of ``s``, a
  contraction of the augmented subcomplex spanned by the ``s o f``.
* ``homotopy``: ``h`` with ``d h + h d == phi`` and ``h(s)`` carried by
  ``s``, built degree by degree as ``h(s) = cone_s(phi(s) - h(d s))``.

Coefficient systems are read covariantly along faces: ``induced(s, f)``
maps ``value(s o f)`` into ``value(s)``, and the cochain differential is
``(dc)(s) = sum_i (-1)^i induced(s, f_i)(c(s o f_i))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .abgroup import FPGroup, Invariants, fp_cohomology, quotient, subgroup_sum
from .cochain import SubgroupFamily, face, face_sign, sort_sign
from .intlin import IntMatrix

DEFAULT_MAX_DEGREE = 4


class NotCarried(ValueError):
    """A chain term is not of the form ``s o f`` for the given ``s``."""


class SimplicialComplex:
    """Vertices in a fixed order (the ordering used by ``phi``) and the
    downward closure of the given simplices."""

    def __init__(self, vertices: Sequence[Hashable], simplices: Iterable[Iterable[Hashable]]):
        self.vertices = tuple(vertices)
        self.position = {v: k for k, v in enumerate(self.vertices)}
        if len(self.position) != len(self.vertices):
            raise ValueError("vertices must be distinct")
        closed = {frozenset([v]) for v in self.vertices}
        for simplex in simplices:
            simplex = frozenset(simplex)
            if not simplex:
                raise ValueError("simplices are nonempty")
            unknown = simplex - set(self.position)
            if unknown:
                raise ValueError(f"unknown vertices {sorted(unknown, key=repr)}")
            for k in range(1, len(simplex) + 1):
                closed.update(frozenset(c) for c in itertools.combinations(simplex, k))
        self.simplices = frozenset(closed)

    @classmethod
    def full(cls, vertices: Sequence[Hashable]) -> SimplicialComplex:
        return cls(vertices, [vertices])

    @classmethod
    def simplex_boundary(cls, vertices: Sequence[Hashable]) -> SimplicialComplex:
        return cls(vertices, itertools.combinations(vertices, len(vertices) - 1))

    def is_simplex(self, vertex_set: Iterable[Hashable]) -> bool:
        return frozenset(vertex_set) in self.simplices

    def key(self, v):
        return self.position[v]


def enumerate_simplices(K: SimplicialComplex, n: int) -> list[tuple]:
    """All singular n-simplices of ``K``, lexicographic in vertex order."""
    return [s for s in itertools.product(K.vertices, repeat=n + 1) if K.is_simplex(s)]


class Chain(dict):
    """Sparse integer combination of singular simplices; zero terms are
    never stored."""

    def add_term(self, s: tuple, coef: int) -> None:
        c = self.get(s, 0) + coef
        if c:
            self[s] = c
        else:
            self.pop(s, None)

    def add(self, other: Mapping, coef: int = 1) -> Chain:
        for s, c in other.items():
            self.add_term(s, coef * c)
        return self

    def __add__(self, other):
        return Chain(self).add(other)

    def __sub__(self, other):
        return Chain(self).add(other, -1)

    def __neg__(self):
        return Chain({s: -c for s, c in self.items()})

    def scaled(self, k: int) -> Chain:
        return Chain({s: k * c for s, c in self.items()}) if k else Chain()

    def map_vertices(self, fn: Callable) -> Chain:
        out = Chain()
        for s, c in self.items():
            out.add_term(tuple(fn(v) for v in s), c)
        return out


def boundary(c: Mapping) -> Chain:
    out = Chain()
    for s, coef in c.items():
        if len(s) < 2:
            raise ValueError("boundary is defined from degree 1 on")
        for i in range(len(s)):
            out.add_term(face(s, i), face_sign(i) * coef)
    return out


def augmentation(c: Mapping) -> int:
    for s in c:
        if len(s) != 1:
            raise ValueError("augmentation is defined on degree-0 chains")
    return sum(c.values())


def phi(s: tuple, key: Callable = None) -> Chain:
    sign, srt = sort_sign(s, key=key)
    out = Chain({s: 1})
    if sign:
        out.add_term(srt, -sign)
    return out


def phi_chain(c: Mapping, key: Callable = None) -> Chain:
    out = Chain()
    for s, coef in c.items():
        out.add(phi(s, key), coef)
    return out


def carried_by(s: tuple, t: tuple) -> bool:
    return set(t) <= set(s)


def carrier_contraction(s: tuple, c: Mapping | int) -> Chain:
    """Cone on the first vertex of ``s``: ``s o f -> (s0, s f0, ..., s fk)``.

    An ``int`` stands for a multiple of the degree -1 generator of the
    augmented complex and is sent to that multiple of ``(s0,)``.
    """
    if isinstance(c, int):
        return Chain({(s[0],): c}) if c else Chain()
    out = Chain()
    for t, coef in c.items():
        if not carried_by(s, t):
            raise NotCarried(f"{t} is not carried by {s}")
        out.add_term((s[0],) + t, coef)
    return out


def _pattern(s: tuple, key: Callable = None) -> tuple[tuple[int, ...], list]:
    distinct = sorted(set(s), key=key)
    rank = {v: k for k, v in enumerate(distinct)}
    return tuple(rank[v] for v in s), distinct


@lru_cache(maxsize=None)
def _homotopy_on_pattern(p: tuple[int, ...]) -> Chain:
    if len(p) == 1:
        return Chain()
    c = phi(p)
    for i in range(len(p)):
        c.add(homotopy(face(p, i)), -face_sign(i))
    return carrier_contraction(p, c)


def clear_caches() -> None:
    """Drop memoized homotopies (needed after toggling the sign test hook)."""
    _homotopy_on_pattern.cache_clear()


def homotopy(s: tuple, key: Callable = None) -> Chain:
    """``h(s)``, the value on ``s`` of the homotopy from ``phi`` to 0.

    The construction only looks at the faces of ``s`` and commutes with
    order-preserving relabeling, so it is computed once per vertex
    pattern and transported."""
    p, distinct = _pattern(s, key)
    return _homotopy_on_pattern(p).map_vertices(distinct.__getitem__)


def build_h(K: SimplicialComplex, N: int = DEFAULT_MAX_DEGREE) -> dict[int, dict[tuple, Chain]]:
    """Table ``{k: {s: h(s)}}`` for every singular k-simplex, ``k <= N``."""
    return {k: {s: homotopy(s, K.key) for s in enumerate_simplices(K, k)} for k in range(N + 1)}


# coefficient systems

class CoefficientSystem:
    """``value(s)`` is a finitely presented group; ``induced(s, f)`` is the
    matrix of the map ``value(s o f) -> value(s)``, ``f`` given as the tuple
    ``(f(0), ..., f(k))``."""

    def value(self, s: tuple) -> FPGroup:
        raise NotImplementedError

    def induced(self, s: tuple, f: tuple) -> IntMatrix:
        raise NotImplementedError

    def apply(self, s: tuple, f: tuple, e: Sequence[int]) -> tuple[int, ...]:
        return self.induced(s, f) @ e


class ConstantSystem(CoefficientSystem):
    def __init__(self, group: FPGroup):
        self.group = group
        self._id = IntMatrix.identity(group.rank)

    def value(self, s):
        return self.group

    def induced(self, s, f):
        return self._id

    def apply(self, s, f, e):
        return tuple(e)


class CongruenceSystem(CoefficientSystem):
    """``s -> A / sum of A_v over the vertices of s`` on a simplicial
    complex whose vertices are the family's labels; the induced maps are the
    natural projections."""

    def __init__(self, family: SubgroupFamily):
        self.family = family
        self._id = IntMatrix.identity(family.ambient.rank)
        self._cache = {}

    def value(self, s):
        key = frozenset(s)
        if key not in self._cache:
            A = self.family.ambient
            S = subgroup_sum(*(self.family[v] for v in sorted(key, key=self.family.position.get)), ambient=A)
            self._cache[key] = quotient(A, S)
        return self._cache[key]

    def induced(self, s, f):
        return self._id

    def apply(self, s, f, e):
        return tuple(e)


@dataclass
class SysCochain:
    degree: int
    values: dict = field(default_factory=dict)


class SystemComplex:
    """``C^n(K, V)``: one summand ``V(s)`` per singular n-simplex, or, with
    ``alternating=True``, per increasing injective simplex (a copy of the
    alternating subcomplex, which is determined by those values)."""

    def __init__(self, K: SimplicialComplex, V: CoefficientSystem, alternating: bool = False,
                 max_degree: int = DEFAULT_MAX_DEGREE):
        self.K = K
        self.V = V
        self.alternating = alternating
        self.max_degree = max_degree
        self._simplices = {}

    def simplices(self, n: int) -> list[tuple]:
        if n < 0 or n > self.max_degree:
            raise ValueError(f"degree {n} outside 0..{self.max_degree}")
        if n not in self._simplices:
            ss = enumerate_simplices(self.K, n)
            if self.alternating:
                ss = [s for s in ss if all(self.K.key(a) < self.K.key(b) for a, b in zip(s, s[1:]))]
            self._simplices[n] = ss
        return self._simplices[n]

    def zero(self, s: tuple) -> tuple[int, ...]:
        return self.V.value(s).zero()

    def get(self, c: SysCochain, s: tuple) -> tuple[int, ...]:
        return tuple(c.values.get(s, self.zero(s)))

    def d(self, c: SysCochain) -> SysCochain:
        n = c.degree + 1
        out = {}
        for s in self.simplices(n):
            v = list(self.zero(s))
            for i in range(n + 1):
                fi = face(tuple(range(n + 1)), i)
                w = self.V.apply(s, fi, self.get(c, face(s, i)))
                sg = face_sign(i)
                v = [a + sg * b for a, b in zip(v, w)]
            out[s] = tuple(v)
        return SysCochain(n, out)

    def equal(self, c1: SysCochain, c2: SysCochain) -> bool:
        if c1.degree != c2.degree:
            return False
        return all(self.V.value(s).equal(self.get(c1, s), self.get(c2, s)) for s in self.simplices(c1.degree))

    def _offsets(self, n):
        offs, total = [], 0
        for s in self.simplices(n):
            offs.append(total)
            total += self.V.value(s).rank
        return offs, total

    def relations(self, n: int) -> IntMatrix:
        offs, total = self._offsets(n)
        cols = []
        for s, o in zip(self.simplices(n), offs):
            G = self.V.value(s)
            for rc in G.relations.columns():
                col = [0] * total
                col[o:o + G.rank] = rc
                cols.append(col)
        return IntMatrix.from_columns(cols, total)

    def coboundary_matrix(self, n: int) -> IntMatrix:
        src_offs, src_total = self._offsets(n)
        src = dict(zip(self.simplices(n), src_offs))
        tgt_offs, tgt_total = self._offsets(n + 1)
        rows = [[0] * src_total for _ in range(tgt_total)]
        for s, o in zip(self.simplices(n + 1), tgt_offs):
            for i in range(n + 2):
                fi = face(tuple(range(n + 2)), i)
                M = self.V.induced(s, fi)
                so = src[face(s, i)]
                sg = face_sign(i)
                for r in range(M.rows):
                    for c in range(M.cols):
                        if M[r, c]:
                            rows[o + r][so + c] += sg * M[r, c]
        return IntMatrix(tgt_total, src_total, rows)

    def cohomology(self, n: int) -> Invariants:
        d_prev = self.coboundary_matrix(n - 1) if n > 0 else None
        return fp_cohomology(d_prev, self.relations(n), self.coboundary_matrix(n),
                             self.relations(n + 1)).invariants


def transfer(C: SystemComplex, psi: Callable[[tuple], Mapping], c: SysCochain, degree: int) -> SysCochain:
    """``(psi' c)(s) = sum over terms lambda * (s o f) of psi(s) of
    lambda * induced(s, f)(c(s o f))``, for ``s`` of the given degree.

    ``f`` is read off as the first occurrence of each vertex in ``s``; the
    result therefore assumes ``induced(s, f)`` depends only on ``s o f``,
    which holds for the constant and congruence systems."""
    out = {}
    for s in C.simplices(degree):
        v = list(C.zero(s))
        for t, lam in psi(s).items():
            if not carried_by(s, t):
                raise NotCarried(f"{t} is not carried by {s}")
            if len(t) != c.degree + 1:
                raise ValueError(f"operator output {t} does not match cochain degree {c.degree}")
            f = tuple(s.index(x) for x in t)
            w = C.V.apply(s, f, C.get(c, t))
            v = [a + lam * b for a, b in zip(v, w)]
        out[s] = tuple(v)
    return SysCochain(degree, out)


def phi_prime(C: SystemComplex, c: SysCochain) -> SysCochain:
    return transfer(C, lambda s: phi(s, C.K.key), c, c.degree)


def h_prime(C: SystemComplex, c: SysCochain) -> SysCochain | None:
    if c.degree == 0:
        return None
    return transfer(C, lambda s: homotopy(s, C.K.key), c, c.degree - 1)


def alternating_project(C: SystemComplex, c: SysCochain) -> SysCochain:
    """``(1 - phi') c``."""
    p = phi_prime(C, c)
    out = {}
    for s in C.simplices(c.degree):
        out[s] = tuple(a - b for a, b in zip(C.get(c, s), C.get(p, s)))
    return SysCochain(c.degree, out)


def alternation_violations(C: SystemComplex, c: SysCochain) -> list[tuple]:
    """Simplices where ``c`` vanishes-on-noninjective or sign alternation
    fails (checked against the sorted rearrangement, in ``value(s)``)."""
    bad = []
    for s in C.simplices(c.degree):
        G = C.V.value(s)
        sign, srt = sort_sign(s, key=C.K.key)
        if sign == 0:
            if not G.is_zero(C.get(c, s)):
                bad.append(s)
            continue
        f = tuple(s.index(x) for x in srt)
        expected = [sign * x for x in C.V.apply(s, f, C.get(c, srt))]
        if not G.equal(C.get(c, s), expected):
            bad.append(s)
    return bad


def quasi_iso_check(K: SimplicialComplex, V: CoefficientSystem, n: int) -> bool:
    full = SystemComplex(K, V, max_degree=n + 1)
    alt = SystemComplex(K, V, alternating=True, max_degree=n + 1)
    return full.cohomology(n) == alt.cohomology(n)
