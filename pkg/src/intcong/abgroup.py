"""Finitely generated abelian groups given by generators and relations.

A group ``G`` is ``Z^g`` modulo the lattice spanned by the columns of a
relation matrix.  Elements are coordinate tuples in ``Z^g``; two tuples
name the same element when their difference lies in the relation
lattice.  A subgroup is a generator matrix in the same coordinates.
"""

from __future__ import annotations

from functools import cached_property
from math import gcd, prod
from typing import Iterable, NamedTuple, Sequence

from .intlin import IntMatrix, hnf, hnf_rows, kernel_basis, snf


class AmbientMismatch(ValueError):
    pass


class Invariants(NamedTuple):
    """Canonical form ``Z^free_rank + Z/t_1 + ... + Z/t_k`` with
    ``1 < t_1 | t_2 | ... | t_k``."""
    free_rank: int
    torsion: tuple[int, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        return prod(self.torsion)

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def _invariants_of(gens: int, relations: IntMatrix) -> Invariants:
    diag = [d for d in snf(relations).diagonal if d] if relations.cols else []
    return Invariants(gens - len(diag), tuple(d for d in diag if d != 1))


class Echelon:
    """HNF basis of a lattice in ``Z^dim`` with canonical reduction."""

    __slots__ = ("dim", "basis", "pivots")

    def __init__(self, vectors: Iterable[Sequence[int]], dim: int):
        self.dim = dim
        self.basis = hnf_rows(vectors, dim)
        self.pivots = [next(j for j, x in enumerate(r) if x) for r in self.basis]

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        v = list(v)
        for row, c in zip(self.basis, self.pivots):
            q = v[c] // row[c]
            if q:
                for j in range(c, self.dim):
                    v[j] -= q * row[j]
        return tuple(v)

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Coefficients of ``v`` in the basis, or ``None`` if ``v`` is not
        in the lattice."""
        v = list(v)
        out = []
        for row, c in zip(self.basis, self.pivots):
            if v[c] % row[c]:
                return None
            q = v[c] // row[c]
            out.append(q)
            if q:
                for j in range(c, self.dim):
                    v[j] -= q * row[j]
        return out if not any(v) else None

    def __contains__(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def key(self) -> tuple:
        return tuple(self.basis)


class FPGroup:
    """``Z^rank`` modulo the column span of ``relations``."""

    def __init__(self, rank: int, relations: IntMatrix | Sequence[Sequence[int]] = ()):
        if not isinstance(relations, IntMatrix):
            relations = IntMatrix.from_columns(list(relations), rank)
        if relations.rows != rank:
            raise ValueError(f"relations have {relations.rows} rows, expected {rank}")
        self.rank = rank
        self.relations = relations

    @classmethod
    def free(cls, rank: int) -> FPGroup:
        return cls(rank)

    @classmethod
    def cyclic(cls, m: int) -> FPGroup:
        return cls(1, [[m]])

    @classmethod
    def from_invariants(cls, free_rank: int, torsion: Sequence[int]) -> FPGroup:
        k = len(torsion)
        cols = [[t if i == j else 0 for i in range(k + free_rank)] for j, t in enumerate(torsion)]
        return cls(k + free_rank, cols)

    @classmethod
    def direct_sum(cls, groups: Sequence[FPGroup]) -> FPGroup:
        rank = sum(G.rank for G in groups)
        cols = []
        offset = 0
        for G in groups:
            for c in G.relations.columns():
                col = [0] * rank
                col[offset:offset + G.rank] = c
                cols.append(col)
            offset += G.rank
        return cls(rank, cols)

    @cached_property
    def lattice(self) -> Echelon:
        return Echelon(self.relations.columns(), self.rank)

    @cached_property
    def invariants(self) -> Invariants:
        return _invariants_of(self.rank, self.relations)

    def reduce(self, e: Sequence[int]) -> tuple[int, ...]:
        return self.lattice.reduce(self._check(e))

    def equal(self, e1: Sequence[int], e2: Sequence[int]) -> bool:
        return (tuple(a - b for a, b in zip(self._check(e1), self._check(e2)))) in self.lattice

    def is_zero(self, e: Sequence[int]) -> bool:
        return self._check(e) in self.lattice

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def basis_vector(self, i: int) -> tuple[int, ...]:
        return tuple(int(j == i) for j in range(self.rank))

    def _check(self, e: Sequence[int]) -> Sequence[int]:
        if len(e) != self.rank:
            raise AmbientMismatch(f"element {tuple(e)} does not have {self.rank} coordinates")
        return e

    def __eq__(self, other):
        if not isinstance(other, FPGroup):
            return NotImplemented
        return self.rank == other.rank and self.lattice.key() == other.lattice.key()

    def __hash__(self):
        return hash((self.rank, self.lattice.key()))

    def __repr__(self):
        return f"FPGroup(rank={self.rank}, relations={[list(c) for c in self.relations.columns()]})"


class Subgroup:
    """The subgroup of ``ambient`` generated by the given coordinate columns."""

    def __init__(self, ambient: FPGroup, generators: Iterable[Sequence[int]] = ()):
        gens = [tuple(int(x) for x in g) for g in generators]
        for g in gens:
            if len(g) != ambient.rank:
                raise AmbientMismatch(f"generator {g} does not have {ambient.rank} coordinates")
        self.ambient = ambient
        self.generators = tuple(gens)

    @cached_property
    def lattice(self) -> Echelon:
        # preimage in Z^g: generators plus relations
        return Echelon(list(self.generators) + self.ambient.relations.columns(), self.ambient.rank)

    def key(self) -> tuple:
        return self.lattice.key()

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient == other.ambient and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __le__(self, other: Subgroup) -> bool:
        _same_ambient(self, other)
        return all(g in other.lattice for g in self.lattice.basis)

    def __repr__(self):
        return f"Subgroup({[list(g) for g in self.generators]})"

    def canonical(self) -> Subgroup:
        """Same subgroup, generated by the reduced echelon basis modulo
        relations (zero vectors dropped)."""
        gens = [self.ambient.reduce(v) for v in self.lattice.basis]
        return Subgroup(self.ambient, [g for g in gens if any(g)])


def _same_ambient(*subgroups: Subgroup) -> FPGroup:
    G = subgroups[0].ambient
    for S in subgroups[1:]:
        if S.ambient is not G and S.ambient != G:
            raise AmbientMismatch("subgroups live in different ambient groups")
    return G


def invariants(G: FPGroup) -> Invariants:
    return G.invariants


def subgroup_sum(*subgroups: Subgroup, ambient: FPGroup = None) -> Subgroup:
    if not subgroups:
        if ambient is None:
            raise ValueError("an ambient group is needed for the empty sum")
        return Subgroup(ambient)
    G = _same_ambient(*subgroups)
    if ambient is not None and ambient != G:
        raise AmbientMismatch("subgroups do not live in the given ambient group")
    return Subgroup(G, [g for S in subgroups for g in S.generators])


def subgroup_intersection(S1: Subgroup, S2: Subgroup) -> Subgroup:
    """Kernel of ``[G1 | -G2 | R]`` projected onto the ``G1`` combination."""
    G = _same_ambient(S1, S2)
    g1 = list(S1.generators)
    cols = g1 + [tuple(-x for x in g) for g in S2.generators] + G.relations.columns()
    if not cols:
        return Subgroup(G)
    K = kernel_basis(IntMatrix.from_columns(cols, G.rank))
    k1 = len(g1)
    gens = []
    for kv in K.columns():
        v = [sum(kv[j] * g1[j][i] for j in range(k1)) for i in range(G.rank)]
        if any(v):
            gens.append(v)
    return Subgroup(G, gens).canonical()


def quotient(G: FPGroup, S: Subgroup) -> FPGroup:
    if S.ambient != G:
        raise AmbientMismatch("subgroup does not live in the given group")
    return FPGroup(G.rank, G.relations.hstack(
        IntMatrix.from_columns(S.generators, G.rank)) if S.generators else G.relations)


def contains(S: Subgroup, e: Sequence[int]) -> bool:
    S.ambient._check(e)
    return e in S.lattice


def reduce(e: Sequence[int], S: Subgroup) -> tuple[int, ...]:
    """Canonical representative of ``e`` modulo ``S`` plus the relations."""
    S.ambient._check(e)
    return S.lattice.reduce(e)


def order(G: FPGroup, e: Sequence[int]) -> int | None:
    """Order of ``e`` in ``G``; ``None`` for infinite order."""
    G._check(e)
    if not G.relations.cols:
        return 1 if not any(e) else None
    U, S, _ = snf(G.relations)
    y = U @ e
    out = 1
    for i, yi in enumerate(y):
        d = S[i, i] if i < S.cols else 0
        if d == 0:
            if yi:
                return None
            continue
        k = d // gcd(d, yi)
        out = out // gcd(out, k) * k
    return out


def vp(m: int, p: int) -> int:
    """Largest ``e`` with ``p**e`` dividing ``m`` (``m >= 1``)."""
    if m < 1:
        raise ValueError(f"valuation needs a positive integer, got {m}")
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    return e


def p_part(m: int, p: int) -> int:
    return p ** vp(m, p)


def p_primary(G: FPGroup, p: int) -> FPGroup:
    """Localization of a finite group at ``p``: its p-primary part."""
    inv = G.invariants
    if inv.free_rank:
        raise ValueError("p_primary needs a finite group")
    parts = [q for q in (p_part(t, p) for t in inv.torsion) if q > 1]
    return FPGroup.from_invariants(0, parts)


def product_localization_check(groups: Sequence[FPGroup], p: int) -> bool:
    """Localizing a finite product at ``p`` agrees with the product of the
    localizations, compared through canonical invariants."""
    for G in groups:
        if G.invariants.free_rank:
            raise ValueError("product_localization_check needs finite groups")
    lhs = p_primary(FPGroup.direct_sum(groups), p).invariants
    rhs = FPGroup.direct_sum([p_primary(G, p) for G in groups]).invariants
    return lhs == rhs


def localization_kernel(G: FPGroup, e: Sequence[int], p: int) -> bool:
    """True iff ``e`` maps to zero in ``G`` localized at ``p``, i.e. ``e``
    is killed by some integer prime to ``p``."""
    n = order(G, e)
    return n is not None and n % p != 0


class Cohomology(NamedTuple):
    invariants: Invariants
    # one representative cycle per invariant factor: free generators
    # first, then torsion generators in the order of ``invariants.torsion``
    free_generators: tuple[tuple[int, ...], ...]
    torsion_generators: tuple[tuple[int, ...], ...]


def lattice_quotient(L: Sequence[Sequence[int]], M: Sequence[Sequence[int]], dim: int) -> Cohomology:
    """Invariants of ``span(L) / span(M)`` for ``span(M) <= span(L)`` in
    ``Z^dim``, with generating representatives in ``Z^dim``."""
    ech = Echelon(L, dim)
    k = len(ech.basis)
    if k == 0:
        return Cohomology(Invariants(0), (), ())
    coords = []
    for v in M:
        c = ech.coordinates(v)
        if c is None:
            raise ValueError(f"{tuple(v)} is not in the ambient lattice of the quotient")
        coords.append(c)
    if coords:
        U, S, _ = snf(IntMatrix.from_columns(coords, k))
        diag = [S[i, i] for i in range(min(S.shape))]
    else:
        U = IntMatrix.identity(k)
        diag = []
    diag = diag + [0] * (k - len(diag))
    # new basis of L: rows of U^{-1} applied to the echelon basis
    Uinv = _unimodular_inverse(U)
    B = IntMatrix.from_rows(ech.basis, dim)
    new_basis = (Uinv.T @ B).tolist()
    free, tors_gens, tors = [], [], []
    for i, d in enumerate(diag):
        if d == 0:
            free.append(tuple(new_basis[i]))
        elif d != 1:
            tors.append(d)
            tors_gens.append(tuple(new_basis[i]))
    return Cohomology(Invariants(len(free), tuple(tors)), tuple(free), tuple(tors_gens))


def _unimodular_inverse(U: IntMatrix) -> IntMatrix:
    # W @ U == HNF(U) == identity
    H, W = hnf(U)
    assert H == IntMatrix.identity(U.rows), "matrix is not unimodular"
    return W


def fp_cohomology(d_prev: IntMatrix | None, rel: IntMatrix, d_next: IntMatrix | None,
                  rel_next: IntMatrix | None) -> Cohomology:
    """Cohomology at a term of a complex of finitely presented groups.

    The term is ``Z^N / span(rel)``; ``d_prev`` maps the previous term's
    generators into ``Z^N`` (``None`` for the first term) and ``d_next``
    maps ``Z^N`` into the next term, presented by ``rel_next``.  The cycles
    are ``{x : d_next x in span(rel_next)}`` and the result is cycles
    modulo ``span(d_prev) + span(rel)``.
    """
    N = rel.rows
    boundaries = rel.columns() + (d_prev.columns() if d_prev is not None else [])
    if d_next is None or d_next.rows == 0:
        cycles = [tuple(int(i == j) for i in range(N)) for j in range(N)]
    else:
        stacked = d_next.hstack(rel_next) if rel_next is not None and rel_next.cols else d_next
        K = kernel_basis(stacked)
        cycles = [c[:N] for c in K.columns()]
    return lattice_quotient(list(cycles) + boundaries, boundaries, N)
