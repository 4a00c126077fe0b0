import itertools

import pytest
from hypothesis import given, settings, strategies as st
from sympy import primefactors

from intcong.abgroup import (
    AmbientMismatch, FPGroup, Invariants, Subgroup, contains, invariants, localization_kernel, order,
    p_primary, product_localization_check, quotient, reduce, subgroup_intersection, subgroup_sum, vp,
)

Z = FPGroup.free(1)
Z3 = FPGroup.free(3)
e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def sub(G, *gens):
    return Subgroup(G, list(gens))


def vec3():
    return st.tuples(*[st.integers(-4, 4)] * 3)


def finite_ambients():
    return st.tuples(st.integers(1, 12), st.integers(1, 12)).map(lambda mk: FPGroup(2, [[mk[0], 0], [0, mk[1]]]))


def subgroups_of(G):
    return st.lists(st.tuples(*[st.integers(-6, 6)] * G.rank), max_size=3).map(lambda gs: Subgroup(G, gs))


class TestInvariants:
    def test_examples(self):
        assert invariants(FPGroup(1, [[6]])) == Invariants(0, (6,))
        assert invariants(FPGroup.free(2)) == Invariants(2, ())
        assert invariants(FPGroup(2, [[2, 0], [0, 4]])) == Invariants(0, (2, 4))
        assert invariants(FPGroup(1, [[1]])).is_trivial
        assert str(FPGroup.from_invariants(1, [6]).invariants) == "Z + Z/6"

    def test_presentation_independent(self):
        a = FPGroup(2, [[2, 0], [0, 3]])
        b = FPGroup(2, [[6, 0], [1, 1]])
        c = FPGroup(1, [[6]])
        assert invariants(a) == invariants(c)
        assert invariants(b) == invariants(c)


class TestSubgroupArithmetic:
    def test_sum_examples(self):
        assert subgroup_sum(sub(Z, [2]), sub(Z, [3])) == sub(Z, [1])
        assert subgroup_sum(sub(Z3, e1), sub(Z3, e2)) == sub(Z3, e1, e2)
        S = sub(Z3, (1, 2, 3))
        assert subgroup_sum(S, S) == S

    def test_intersection_examples(self):
        assert subgroup_intersection(sub(Z, [4]), sub(Z, [6])) == sub(Z, [12])
        assert subgroup_intersection(sub(Z3, e1), sub(Z3, e2)) == sub(Z3)
        assert subgroup_intersection(sub(Z3, e1, e3), sub(Z3, e2, e3)) == sub(Z3, e3)

    def test_quotient_examples(self):
        assert invariants(quotient(Z, sub(Z, [6]))) == Invariants(0, (6,))
        assert invariants(quotient(Z3, sub(Z3, e1, e2))) == Invariants(1, ())
        assert invariants(quotient(Z3, sub(Z3, e1, (1, 1, 1)))) == Invariants(1, ())

    def test_mismatch(self):
        with pytest.raises(AmbientMismatch):
            subgroup_sum(sub(Z, [2]), sub(Z3, e1))

    def test_membership_examples(self):
        assert contains(sub(Z3, (1, 1, 1)), (2, 2, 2))
        assert not contains(sub(Z3, e2), e1)

    @given(vec3(), vec3(), vec3())
    def test_reduce_idempotent(self, e, g1, g2):
        S = sub(Z3, g1, g2)
        r = reduce(e, S)
        assert reduce(r, S) == r
        assert contains(S, tuple(a - b for a, b in zip(e, r)))

    @settings(max_examples=30)
    @given(finite_ambients().flatmap(lambda G: st.tuples(st.just(G), subgroups_of(G))))
    def test_membership_by_enumeration(self, GS):
        G, S = GS
        m, k = G.relations[0, 0], G.relations[1, 1]
        span = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            x = frontier.pop()
            for g in S.generators:
                y = ((x[0] + g[0]) % m, (x[1] + g[1]) % k)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        for e in itertools.product(range(m), range(k)):
            assert contains(S, e) == (e in span)

    @settings(max_examples=40)
    @given(vec3(), vec3(), vec3(), vec3())
    def test_quotient_presentation_independent(self, a, b, c, d):
        S1 = sub(Z3, a, b)
        S2 = sub(Z3, a, b, (a[0] + 2 * b[0], a[1] + 2 * b[1], a[2] + 2 * b[2]))
        assert invariants(quotient(Z3, S1)) == invariants(quotient(Z3, S2))


def lattice_triples():
    z3 = st.tuples(*[st.lists(vec3(), max_size=2).map(lambda gs: Subgroup(Z3, gs))] * 3)
    fin = finite_ambients().flatmap(lambda G: st.tuples(subgroups_of(G), subgroups_of(G), subgroups_of(G)))
    return st.one_of(z3, fin)


class TestLatticeLaws:
    @settings(max_examples=40)
    @given(lattice_triples())
    def test_laws(self, BCD):
        B, C, D = BCD
        plus, meet = subgroup_sum, subgroup_intersection
        assert plus(B, C) == plus(C, B) and meet(B, C) == meet(C, B)
        assert plus(plus(B, C), D) == plus(B, plus(C, D))
        assert meet(meet(B, C), D) == meet(B, meet(C, D))
        assert plus(B, B) == B and meet(B, B) == B
        assert plus(B, meet(B, C)) == B and meet(B, plus(B, C)) == B
        # modular law with D replaced by D ∩ B so the hypothesis holds
        Db = meet(D, B)
        assert meet(B, plus(C, Db)) == plus(meet(B, C), Db)

    @settings(max_examples=40)
    @given(lattice_triples())
    def test_intersection_is_greatest(self, BCD):
        B, C, _ = BCD
        M = subgroup_intersection(B, C)
        assert M <= B and M <= C


class TestLocalization:
    def test_vp(self):
        assert vp(12, 2) == 2 and vp(12, 5) == 0 and vp(8, 2) == 3

    def test_p_primary_examples(self):
        assert invariants(p_primary(FPGroup.cyclic(6), 2)) == Invariants(0, (2,))
        assert invariants(p_primary(FPGroup.cyclic(9), 2)).is_trivial
        G = FPGroup.direct_sum([FPGroup.cyclic(6), FPGroup.cyclic(4)])
        assert invariants(p_primary(G, 2)) == Invariants(0, (2, 4))
        with pytest.raises(ValueError):
            p_primary(FPGroup.free(1), 2)

    def test_product_check_examples(self):
        assert product_localization_check([FPGroup.cyclic(6), FPGroup.cyclic(4)], 2)
        assert product_localization_check([FPGroup.cyclic(3)], 2)

    @given(st.lists(st.integers(1, 60), min_size=1, max_size=4))
    def test_primary_orders_multiply(self, ms):
        G = FPGroup.direct_sum([FPGroup.cyclic(m) for m in ms])
        total = invariants(G).order
        prod = 1
        for p in primefactors(total):
            prod *= invariants(p_primary(G, p)).order
        assert prod == total

    def test_kernel_examples(self):
        Z6 = FPGroup.cyclic(6)
        assert localization_kernel(Z6, (2,), 2)
        assert not localization_kernel(Z6, (3,), 2)
        assert not localization_kernel(Z, (1,), 3)
        assert order(Z6, (4,)) == 3 and order(Z, (1,)) is None
