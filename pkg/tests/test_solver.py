import itertools
from math import gcd

import pytest
from hypothesis import assume, given, settings, strategies as st

from intcong import solver
from intcong.abgroup import vp
from intcong.intlin import lcm
from intcong.solver import (
    CocycleViolation, CongruenceInstance, LocalInstance, NotACocycle, SearchSpaceTooLarge, Unsolvable,
    alternating_defects, alternating_reduce, brute_force_solve, check_cocycle, integer_coboundary,
    local_solve, local_violations, saturate, solve, verify,
)


@st.composite
def planted(draw, pool=60, max_size=6, degrees=(1, 2, 3)):
    I = draw(st.lists(st.integers(1, pool), min_size=1, max_size=max_size, unique=True))
    n = draw(st.sampled_from(degrees))
    tuples = list(itertools.product(sorted(I), repeat=n))
    y = dict(zip(tuples, draw(st.lists(st.integers(-50, 50), min_size=len(tuples), max_size=len(tuples)))))
    return CongruenceInstance(I, n, integer_coboundary(I, y, n))


@st.composite
def small_instances(draw):
    """Arbitrary data on |I| <= 3 with lcm(I) <= 12, degree 1."""
    I = draw(st.lists(st.integers(1, 12), min_size=1, max_size=3, unique=True).filter(lambda I: lcm(*I) <= 12))
    ts = list(itertools.product(sorted(I), repeat=2))
    vals = draw(st.lists(st.integers(0, 11), min_size=len(ts), max_size=len(ts)))
    return CongruenceInstance(I, 1, {t: v % gcd(*t) for t, v in zip(ts, vals)})


class TestUtilities:
    def test_vp_and_saturate(self):
        assert vp(12, 2) == 2 and vp(12, 5) == 0 and vp(8, 2) == 3
        assert saturate(12, 2) == 4 and saturate(12, 5) == 1

    @given(st.integers(1, 10 ** 9), st.sampled_from([2, 3, 5, 7, 11]))
    def test_saturate_idempotent(self, m, p):
        s = saturate(m, p)
        assert saturate(s, p) == s and m % s == 0 and (m // s) % p


class TestCheck:
    def test_examples(self):
        assert check_cocycle(CongruenceInstance([2, 3], 1, {}))[0]
        ok, bad = check_cocycle(CongruenceInstance([2], 1, {(2, 2): 1}))
        assert not ok and bad == [(2, 2, 2)]

    @settings(max_examples=50)
    @given(planted())
    def test_coboundaries_pass(self, inst):
        assert check_cocycle(inst)[0]


class TestReduction:
    def test_example(self):
        inst = CongruenceInstance([2, 4], 1, {(2, 2): 2, (2, 4): 1, (4, 2): -1, (4, 4): 0})
        red = alternating_reduce(inst)
        assert alternating_defects(inst, red) == []

    def test_already_alternating(self):
        inst = CongruenceInstance.from_increasing([4, 6, 9], 1, {(4, 6): 1, (6, 9): 2, (4, 9): 0})
        assert check_cocycle(inst)[0]
        assert alternating_defects(inst, alternating_reduce(inst)) == []

    def test_rejects_non_cocycle(self):
        with pytest.raises(NotACocycle):
            alternating_reduce(CongruenceInstance([2], 1, {(2, 2): 1}))

    @settings(max_examples=40)
    @given(planted())
    def test_random(self, inst):
        assert alternating_defects(inst, alternating_reduce(inst)) == []


class TestLocal:
    def test_zero(self):
        assert set(local_solve(LocalInstance(2, 1, (0, 1, 2), {})).values()) == {0}

    @settings(max_examples=50)
    @given(st.sampled_from([2, 3]), st.integers(1, 5), st.integers(1, 3), st.data())
    def test_planted(self, p, N, n, data):
        vals = sorted(data.draw(st.lists(st.integers(0, 3), min_size=N, max_size=N)))
        li = LocalInstance(p, n, vals)
        xs = {t: data.draw(st.integers(-50, 50)) for t in li.tuples(n)}
        li.data = {t: solver.alternating_sum(xs, t) % li.modulus(t) for t in li.tuples(n + 1)}
        x = local_solve(li)
        assert local_violations(li, x) == []
        if n == 1:
            assert all(x[(k,)] == sum(li.data.get((m, m + 1), 0) for m in range(1, k)) for k in range(1, N + 1))

    def test_valuations_must_increase(self):
        with pytest.raises(ValueError):
            LocalInstance(2, 1, (2, 1))


class TestSolve:
    def test_zero_data(self):
        sol = solve(CongruenceInstance([4, 6, 9], 2, {}))
        assert set(sol.x.values()) == {0} and sol.modulus == 36

    def test_planted_example(self):
        inst = CongruenceInstance([4, 6], 1, {(4, 6): 1, (6, 4): -1})
        sol = solve(inst)
        assert (sol.x[(6,)] - sol.x[(4,)]) % 2 == 1
        assert verify(inst, sol)[0]

    def test_violation(self):
        with pytest.raises(CocycleViolation) as exc:
            solve(CongruenceInstance([2], 1, {(2, 2): 1}))
        assert exc.value.witnesses == [(2, 2, 2)]

    def test_degree_zero(self):
        inst = CongruenceInstance([4, 6], 0, {(4,): 1, (6,): 3})
        sol = solve(inst)
        assert sol.x[()] % 4 == 1 and sol.x[()] % 6 == 3

    def test_input_validation(self):
        with pytest.raises(ValueError):
            CongruenceInstance([2, 3], 1, {(2, 5): 1})
        with pytest.raises(ValueError):
            CongruenceInstance([2, 3], 1, {(2,): 1})

    def test_verify_catches_perturbation(self):
        inst = CongruenceInstance([4, 6], 1, {(4, 6): 1, (6, 4): -1})
        sol = solve(inst)
        sol.x[(4,)] += 1
        ok, bad = verify(inst, sol)
        assert not ok and bad

    @settings(max_examples=60, deadline=None)
    @given(planted())
    def test_sound(self, inst):
        sol = solve(inst)
        assert verify(inst, sol)[0]
        assert all(0 <= v < sol.modulus for v in sol.x.values())

    @settings(max_examples=150, deadline=None)
    @given(small_instances())
    def test_complete_against_brute_force(self, inst):
        try:
            brute_force_solve(inst)
            brute = True
        except Unsolvable:
            brute = False
        assert brute == check_cocycle(inst)[0]
        if brute:
            assert verify(inst, solve(inst))[0]
        else:
            with pytest.raises(CocycleViolation):
                solve(inst)

    def test_brute_force_examples(self):
        inst = CongruenceInstance([2, 3], 1, {(2, 3): 5})
        assert verify(inst, brute_force_solve(inst))[0]
        with pytest.raises(Unsolvable):
            brute_force_solve(CongruenceInstance([2], 1, {(2, 2): 1}))
        with pytest.raises(SearchSpaceTooLarge):
            brute_force_solve(CongruenceInstance([7, 8, 9, 10], 1, {}))


class TestInvariance:
    @settings(max_examples=40, deadline=None)
    @given(small_instances())
    def test_index_one_is_neutral(self, inst):
        assume(1 not in inst.indices)
        bigger = CongruenceInstance(inst.indices + (1,), 1, inst.data)
        assert check_cocycle(bigger)[0] == check_cocycle(inst)[0]

    @settings(max_examples=40, deadline=None)
    @given(planted(pool=30, max_size=4, degrees=(1, 2)), st.randoms())
    def test_presentation_order(self, inst, rng):
        # the instance is a function on tuples of a set: listing order must not matter
        idx = list(inst.indices)
        rng.shuffle(idx)
        items = list(inst.data.items())
        rng.shuffle(items)
        shuffled = CongruenceInstance(idx, inst.degree, dict(items))
        assert solve(shuffled).x == solve(inst).x

    @settings(max_examples=30, deadline=None)
    @given(planted(pool=36, max_size=4, degrees=(1, 2)))
    def test_localization_consistency(self, inst):
        sol = solve(inst)
        for p in (2, 3):
            E = max(vp(i, p) for i in inst.indices)
            q = p ** E
            xp = {t: v % q for t, v in sol.x.items()}
            for t in inst.tuples(inst.degree + 1):
                m = p ** vp(gcd(*t), p)
                assert (solver.alternating_sum(xp, t) - inst.a(t)) % m == 0
