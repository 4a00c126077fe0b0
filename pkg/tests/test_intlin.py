import itertools
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from intcong.intlin import (
    Congruence, Infeasible, IntMatrix, crt, determinant, hnf, kernel_basis, lcm, rank, snf,
    solve_integer, solve_linear, xgcd,
)

small = st.integers(-20, 20)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    ).map(IntMatrix.from_rows)


def is_row_hnf(H: IntMatrix) -> bool:
    last = -1
    seen_zero = False
    for i in range(H.rows):
        row = H.row(i)
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        p = nz[0]
        if p <= last or row[p] <= 0:
            return False
        for k in range(i):
            if not 0 <= H[k, p] < row[p]:
                return False
        last = p
    return True


class TestXgcd:
    def test_examples(self):
        g, u, v = xgcd(12, 18)
        assert g == 6 and 12 * u + 18 * v == 6
        assert xgcd(0, 0)[0] == 0
        assert xgcd(7, 0) == (7, 1, 0)

    @given(small, small)
    def test_bezout(self, a, b):
        g, u, v = xgcd(a, b)
        assert g == gcd(a, b) and a * u + b * v == g


class TestCrt:
    def test_examples(self):
        assert crt([Congruence.make(1, 4), Congruence.make(2, 9)]) == Congruence(29, 36)
        with pytest.raises(Infeasible):
            crt([Congruence.make(1, 2), Congruence.make(0, 4)])
        assert crt([Congruence.make(0, 1)]) == Congruence(0, 1)

    @given(st.lists(st.tuples(st.integers(-30, 30), st.integers(1, 12)), min_size=1, max_size=3))
    def test_agrees_with_scan(self, pairs):
        M = lcm(*(m for _, m in pairs))
        hits = [x for x in range(M) if all((x - r) % m == 0 for r, m in pairs)]
        try:
            c = crt(Congruence.make(r, m) for r, m in pairs)
        except Infeasible:
            assert not hits
            return
        assert c.modulus == M and hits == [c.residue]


class TestHnf:
    def test_convention(self):
        H, U = hnf(IntMatrix.from_rows([[2, 4], [1, 3]]))
        # entries above pivots are reduced into [0, pivot)
        assert H.tolist() == [[1, 1], [0, 2]]
        assert U @ IntMatrix.from_rows([[2, 4], [1, 3]]) == H
        assert abs(determinant(U)) == 1

    def test_trivial(self):
        Z = IntMatrix.zeros(2, 3)
        H, U = hnf(Z)
        assert H == Z and U == IntMatrix.identity(2)
        H, U = hnf(IntMatrix.identity(3))
        assert H == IntMatrix.identity(3) and U == IntMatrix.identity(3)

    @given(matrices())
    def test_properties(self, M):
        H, U = hnf(M)
        assert U @ M == H
        assert abs(determinant(U)) == 1
        assert is_row_hnf(H)
        assert hnf(H)[0] == H

    @given(matrices(3, 3), st.permutations(range(3)))
    def test_uniqueness_under_row_operations(self, M, perm):
        # a second route to the same row lattice must give the same form
        if M.rows < 3:
            return
        shuffled = IntMatrix.from_rows([[M[perm[i], j] + (M[perm[0], j] if i == 1 else 0)
                                         for j in range(M.cols)] for i in range(3)])
        assert hnf(M)[0] == hnf(shuffled)[0]


class TestSnf:
    def test_examples(self):
        assert snf(IntMatrix.diagonal([4, 6])).S == IntMatrix.diagonal([2, 12])
        assert snf(IntMatrix.zeros(2, 2)).S.is_zero()
        assert snf(IntMatrix.identity(2)).S == IntMatrix.identity(2)

    @given(matrices())
    def test_invariants(self, M):
        U, S, V = snf(M)
        assert U @ M @ V == S
        assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
        d = [S[i, i] for i in range(min(S.rows, S.cols))]
        assert all(S[i, j] == 0 for i in range(S.rows) for j in range(S.cols) if i != j)
        assert all(x >= 0 for x in d)
        nz = [x for x in d if x]
        assert d[:len(nz)] == nz
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))

    @settings(max_examples=60)
    @given(matrices())
    def test_matches_sympy(self, M):
        ours = [x for x in snf(M).diagonal if x]
        ref = smith_normal_form(Matrix(M.tolist()), domain=ZZ)
        theirs = sorted(abs(ref[i, i]) for i in range(min(ref.shape)) if ref[i, i])
        assert sorted(ours) == theirs


class TestSolve:
    def test_examples(self):
        x = solve_linear(IntMatrix.from_rows([[-1, 1]]), [1], [2])
        assert (x[1] - x[0]) % 2 == 1
        with pytest.raises(Infeasible):
            solve_linear(IntMatrix.from_rows([[2]]), [1], [4])

    @given(matrices(3, 3), st.data())
    def test_planted(self, M, data):
        x_star = data.draw(st.lists(small, min_size=M.cols, max_size=M.cols))
        moduli = data.draw(st.lists(st.integers(1, 30), min_size=M.rows, max_size=M.rows))
        b = [v % m for v, m in zip(M @ x_star, moduli)]
        x = solve_linear(M, b, moduli)
        assert all((v - bi) % m == 0 for v, bi, m in zip(M @ x, b, moduli))

    @settings(max_examples=40)
    @given(st.integers(1, 2), st.integers(1, 3), st.data())
    def test_against_exhaustive(self, rows, cols, data):
        M = IntMatrix.from_rows(data.draw(st.lists(st.lists(st.integers(-4, 4), min_size=cols, max_size=cols),
                                                   min_size=rows, max_size=rows)))
        moduli = data.draw(st.lists(st.sampled_from([1, 2, 3, 4, 6, 12]), min_size=rows, max_size=rows))
        b = data.draw(st.lists(st.integers(0, 11), min_size=rows, max_size=rows))
        L = lcm(*moduli)
        feasible = any(all((v - bi) % m == 0 for v, bi, m in zip(M @ x, b, moduli))
                       for x in itertools.product(range(L), repeat=cols))
        try:
            x = solve_linear(M, b, moduli)
            assert feasible
            assert all((v - bi) % m == 0 for v, bi, m in zip(M @ x, b, moduli))
        except Infeasible:
            assert not feasible

    def test_integer_system(self):
        A = IntMatrix.from_rows([[2, 3], [4, 5]])
        assert A @ solve_integer(A, [7, 13]) == (7, 13)
        with pytest.raises(Infeasible):
            solve_integer(IntMatrix.from_rows([[2, 4]]), [1])


class TestKernel:
    def test_examples(self):
        K = kernel_basis(IntMatrix.from_rows([[2, 4]]))
        assert K.cols == 1 and set([K.column(0), tuple(-x for x in K.column(0))]) == {(2, -1), (-2, 1)}
        assert kernel_basis(IntMatrix.identity(3)).cols == 0
        assert kernel_basis(IntMatrix.zeros(1, 2)).cols == 2

    @given(matrices())
    def test_saturated_basis(self, M):
        K = kernel_basis(M)
        assert K.cols == M.cols - rank(M)
        assert (M @ K).is_zero() if K.cols else True
        if K.cols:
            # saturated: the SNF of the basis is all ones
            assert all(x == 1 for x in snf(K).diagonal[:K.cols])
