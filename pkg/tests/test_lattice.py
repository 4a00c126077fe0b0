import itertools
from math import prod

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from intcong.abgroup import FPGroup, Invariants, Subgroup, subgroup_intersection, subgroup_sum
from intcong.cochain import FamilyComplex, SubgroupFamily, is_cocycle
from intcong.lattice import (
    CapExceeded, Inconclusive, NotDistributive, close, counterexample_h1, generic_lines, is_distributive,
    modular_law_holds, reduction_lemma_check, theorem4_harness,
)
from intcong.intlin import IntMatrix, determinant

Z = FPGroup.free(1)


def zfam(*ms):
    return SubgroupFamily(Z, {m: Subgroup(Z, [[m]]) for m in ms})


def keys(L):
    return {S.key() for S in L.elements}


def chain_family(m, gens):
    """A descending chain in Z/m generated by successive multiples."""
    G = FPGroup.cyclic(m)
    return SubgroupFamily(G, [Subgroup(G, [[g]]) for g in gens])


class TestClose:
    def test_gcd_lcm_closure(self):
        L = close(zfam(2, 3))
        expected = {Subgroup(Z, [[k]]).key() for k in (2, 3, 1, 6)}
        assert keys(L) == expected and L.complete

    def test_chain_is_closed(self):
        L = close(chain_family(24, [2, 4, 12]))
        assert len(L) == 3

    def test_four_lines_do_not_stabilize(self):
        # the closure is infinite; the cap is an explicit outcome
        with pytest.raises(CapExceeded) as exc:
            close(generic_lines(3, 4).family(), cap=200)
        assert not exc.value.partial.complete
        partial = close(generic_lines(3, 4).family(), max_rounds=2, strict=False)
        V = Subgroup(FPGroup.free(3), [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert V in partial and Subgroup(FPGroup.free(3)) in partial

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.integers(1, 40), min_size=1, max_size=4, unique=True))
    def test_closed_idempotent_reproducible(self, ms):
        fam = zfam(*ms)
        L = close(fam)
        for A in L.elements:
            for B in L.elements:
                assert subgroup_sum(A, B) in L and subgroup_intersection(A, B) in L
        again = close(SubgroupFamily(Z, list(L.elements)))
        assert keys(again) == keys(L)
        assert [S.key() for S in close(fam).elements] == [S.key() for S in L.elements]


class TestDistributive:
    def test_subgroups_of_z(self):
        assert is_distributive(close(zfam(4, 6, 9, 10))).distributive

    def test_chain(self):
        assert is_distributive(close(chain_family(24, [2, 4, 12]))).distributive

    def test_four_lines_partial(self):
        partial = close(generic_lines(3, 4).family(), max_rounds=1, strict=False)
        rep = is_distributive(partial)
        assert not rep.distributive and rep.witness is not None
        b, c, d = (partial.elements[k] for k in rep.witness)
        assert subgroup_intersection(b, subgroup_sum(c, d)) != \
            subgroup_sum(subgroup_intersection(b, c), subgroup_intersection(b, d))

    def test_partial_without_failure_is_inconclusive(self):
        V = FPGroup.free(2)
        fam = SubgroupFamily(V, [Subgroup(V, [(1, 0)]), Subgroup(V, [(0, 1)])])
        partial = close(fam, max_rounds=0, strict=False)
        with pytest.raises(Inconclusive):
            is_distributive(partial)

    @settings(max_examples=15, deadline=None)
    @given(st.randoms())
    def test_label_invariant(self, rng):
        G = FPGroup(2, [[4, 0], [0, 6]])
        subs = [Subgroup(G, [(rng.randrange(4), rng.randrange(6))]) for _ in range(3)]
        a = is_distributive(close(SubgroupFamily(G, subs))).distributive
        rng.shuffle(subs)
        assert is_distributive(close(SubgroupFamily(G, subs))).distributive == a

    def test_modular_law(self):
        V = FPGroup.free(3)
        B = Subgroup(V, [(1, 0, 0), (0, 1, 0)])
        C = Subgroup(V, [(1, 1, 1)])
        D = Subgroup(V, [(1, 0, 0)])
        assert modular_law_holds(B, C, D)


class TestTheorem4:
    def test_integer_family(self):
        rep = theorem4_harness(zfam(4, 6, 9))
        assert rep.holds and rep.lattice_size == 9
        assert all(h.is_trivial for h in rep.cohomology.values())

    def test_chain_in_z24(self):
        assert theorem4_harness(chain_family(24, [1, 2, 6, 12])).holds

    def test_refuses_non_distributive(self):
        V = FPGroup.free(2)
        fam = SubgroupFamily(V, [Subgroup(V, [v]) for v in [(1, 0), (0, 1), (1, 1)]])
        with pytest.raises(NotDistributive):
            theorem4_harness(fam)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 60), st.lists(st.integers(0, 60), min_size=1, max_size=3))
    def test_random_cyclic(self, m, gens):
        fam = SubgroupFamily(FPGroup.cyclic(m), [Subgroup(FPGroup.cyclic(m), [[g]]) for g in gens])
        # subgroups of a cyclic group form a distributive lattice
        assert theorem4_harness(fam).holds


class TestReductionLemma:
    def test_chain(self):
        rep = reduction_lemma_check(chain_family(24, [2, 4, 12]), 0, 1)
        assert rep.intersections.is_trivial and rep.quotients.is_trivial and rep.original.is_trivial
        assert rep.holds and rep.distributive

    def test_four_lines_values(self):
        # both hypothesis groups vanish here while H^1 does not; the lattice is
        # not distributive, so the implication is not claimed
        rep = reduction_lemma_check(generic_lines(3, 4).family(), 1, 1)
        assert rep.intersections.is_trivial and rep.quotients.is_trivial
        assert rep.original == Invariants(1, ())
        assert rep.distributive is False and rep.holds

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.integers(1, 40), min_size=2, max_size=4, unique=True), st.integers(0, 3), st.integers(1, 2))
    def test_random_never_falsified(self, ms, b, n):
        fam = zfam(*ms)
        rep = reduction_lemma_check(fam, ms[b % len(ms)], n)
        assert rep.distributive and rep.holds


class TestGenericLines:
    def test_default(self):
        inst = generic_lines(3, 4)
        assert inst.lines == ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
        assert inst.in_general_position()

    @pytest.mark.parametrize("seed", range(5))
    def test_random_general_position(self, seed):
        inst = generic_lines(3, 5, seed=seed)
        for sub in itertools.combinations(inst.lines, 3):
            assert determinant(IntMatrix.from_columns(sub, 3)) != 0

    def test_two_lines(self):
        assert len(generic_lines(3, 2, seed=7).lines) == 2


class TestCounterexample:
    def test_default(self):
        rep = counterexample_h1(generic_lines(3, 4))
        assert rep.h1 == Invariants(1, ())
        assert rep.is_cocycle and rep.unsolvable
        assert rep.full_mode_is_cocycle and rep.full_mode_unsolvable
        fam = generic_lines(3, 4).family()
        assert is_cocycle(FamilyComplex(fam, "increasing", 2), rep.cochain)[0]

    def test_unsolvable_by_sympy_lattice_index(self):
        # independent certificate: b is in the column lattice of A iff appending b
        # keeps the rank and the product of the nonzero invariant factors
        rep = counterexample_h1(generic_lines(3, 4))
        C = FamilyComplex(generic_lines(3, 4).family(), "increasing", 2)
        A = C.coboundary_matrix(0).hstack(C.relations(1))
        b = C.to_vector(rep.cochain)

        def index_and_rank(M):
            d = smith_normal_form(Matrix(M), domain=ZZ)
            nz = [abs(d[i, i]) for i in range(min(d.shape)) if d[i, i]]
            return len(nz), prod(nz)

        rows = A.tolist()
        with_b = [r + [x] for r, x in zip(rows, b)]
        # a free class is not even in the rational span, so the rank grows
        assert index_and_rank(rows) != index_and_rank(with_b)
        assert index_and_rank(rows)[0] < index_and_rank(with_b)[0]

    def test_two_lines_vanish(self):
        rep = counterexample_h1(generic_lines(3, 2))
        assert rep.h1.is_trivial and rep.cochain is None
