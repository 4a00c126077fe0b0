"""Exact integer linear algebra.

Everything here works on Python ints, so there is no overflow and no
rounding.  Matrices are :class:`IntMatrix` values; the elimination
routines copy the entries into plain lists of lists and never mutate
their inputs.

Conventions used throughout the package:

* Hermite normal form is row style: ``U @ M == H`` with ``U`` unimodular,
  nonzero rows of ``H`` on top, pivots positive and every entry above a
  pivot reduced into ``[0, pivot)``.
* Smith normal form returns ``U @ M @ V == S`` with ``s_1 | s_2 | ...``,
  all nonnegative, zeros trailing.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, NamedTuple, Sequence


class Infeasible(ValueError):
    """Raised when a system of congruences or linear equations has no
    integer solution."""


class IntMatrix:
    """An immutable ``rows x cols`` matrix of Python ints.

    Keeping the shape explicit lets ``0 x n`` and ``n x 0`` matrices
    round-trip, which a bare list of lists cannot do.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[int]] = None):
        if data is None:
            data = [[0] * cols for _ in range(rows)]
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entries do not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._data = tuple(tuple(int(x) for x in r) for r in data)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols is required for an empty row list")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise ValueError(f"column {c} does not have {rows} entries")
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols)

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int = None, cols: int = None) -> IntMatrix:
        k = len(entries)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        m = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(entries):
            m[i][i] = d
        return cls(rows, cols, m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         [[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = other.columns()
            return IntMatrix(self.rows, other.cols,
                             [[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self._data])
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} does not fit {self.shape}")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._data)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        return f"IntMatrix({self.rows}, {self.cols}, {self.tolist()})"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def hstack(self, *others: IntMatrix) -> IntMatrix:
        data = [list(r) for r in self._data]
        for o in others:
            if o.rows != self.rows:
                raise ValueError("hstack needs equal row counts")
            for i in range(self.rows):
                data[i].extend(o._data[i])
        return IntMatrix(self.rows, len(data[0]) if data else self.cols + sum(o.cols for o in others), data)

    def vstack(self, *others: IntMatrix) -> IntMatrix:
        data = [list(r) for r in self._data]
        for o in others:
            if o.cols != self.cols:
                raise ValueError("vstack needs equal column counts")
            data.extend(list(r) for r in o._data)
        return IntMatrix(len(data), self.cols, data)

    def select_rows(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix(len(idx), self.cols, [self._data[i] for i in idx])

    def select_columns(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix(self.rows, len(idx), [[r[j] for j in idx] for r in self._data])


class SNFResult(NamedTuple):
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


class Congruence(NamedTuple):
    residue: int
    modulus: int

    @classmethod
    def make(cls, residue: int, modulus: int) -> Congruence:
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        return cls(residue % modulus, modulus)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``g = gcd(a, b) >= 0`` and ``a*u + b*v == g``."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def crt(congruences: Iterable[Congruence]) -> Congruence:
    """Combine congruences with arbitrary (not necessarily coprime) moduli.

    The result has modulus equal to the lcm of the inputs.  Raises
    :class:`Infeasible` if two congruences disagree on a shared factor.
    """
    r, m = 0, 1
    for residue, modulus in congruences:
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        g, u, _ = xgcd(m, modulus)
        diff = residue - r
        if diff % g:
            raise Infeasible(f"{residue} mod {modulus} conflicts with {r} mod {m}")
        lcm = m // g * modulus
        r = (r + m * (diff // g * u % (modulus // g))) % lcm
        m = lcm
    return Congruence(r, m)


def _row_hnf(a: list[list[int]], u: list[list[int]] | None) -> list[int]:
    """Bring ``a`` to row Hermite normal form in place, applying the same
    row operations to ``u`` when given.  Returns the pivot columns."""
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        while True:
            best = None
            for i in range(r, nrows):
                x = a[i][c]
                if x and (best is None or abs(x) < abs(a[best][c])):
                    best = i
            if best is None:
                break
            if best != r:
                a[r], a[best] = a[best], a[r]
                if u is not None:
                    u[r], u[best] = u[best], u[r]
            piv_row = a[r]
            p = piv_row[c]
            done = True
            for i in range(r + 1, nrows):
                x = a[i][c]
                if x:
                    q = x // p
                    row = a[i]
                    for j in range(c, ncols):
                        row[j] -= q * piv_row[j]
                    if u is not None:
                        urow, upiv = u[i], u[r]
                        for j in range(len(urow)):
                            urow[j] -= q * upiv[j]
                    if row[c]:
                        done = False
            if done:
                break
        if r < nrows and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                if u is not None:
                    u[r] = [-x for x in u[r]]
            p = a[r][c]
            for i in range(r):
                q = a[i][c] // p
                if q:
                    row, piv_row = a[i], a[r]
                    for j in range(c, ncols):
                        row[j] -= q * piv_row[j]
                    if u is not None:
                        urow, upiv = u[i], u[r]
                        for j in range(len(urow)):
                            urow[j] -= q * upiv[j]
            pivots.append(c)
            r += 1
    return pivots


def hnf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form: returns ``(H, U)`` with ``U @ M == H``."""
    a = M.tolist()
    u = IntMatrix.identity(M.rows).tolist()
    _row_hnf(a, u)
    return IntMatrix(M.rows, M.cols, a), IntMatrix(M.rows, M.rows, u)


def hnf_rows(vectors: Iterable[Sequence[int]], dim: int) -> list[tuple[int, ...]]:
    """Echelon basis (nonzero HNF rows) of the lattice spanned by ``vectors``."""
    a = [list(v) for v in vectors]
    if not a:
        return []
    for v in a:
        if len(v) != dim:
            raise ValueError(f"vector {v} does not have {dim} entries")
    _row_hnf(a, None)
    return [tuple(r) for r in a if any(r)]


def snf(M: IntMatrix) -> SNFResult:
    """Smith normal form with transforms.

    Pivot choice: the nonzero entry of least absolute value in the active
    block, ties broken by lowest row then lowest column.
    """
    m, n = M.shape
    a = M.tolist()
    u = IntMatrix.identity(m).tolist()
    v = IntMatrix.identity(n).tolist()

    def col_op(dst, src, q):
        # column dst -= q * column src, on a and v
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    def row_op(dst, src, q):
        ra, rs = a[dst], a[src]
        for j in range(n):
            ra[j] -= q * rs[j]
        ua, us = u[dst], u[src]
        for j in range(m):
            ua[j] -= q * us[j]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            u[t], u[bi] = u[bi], u[t]
        if bj != t:
            swap_cols(t, bj)
        p = a[t][t]
        clean = True
        for i in range(t + 1, m):
            if a[i][t]:
                row_op(i, t, a[i][t] // p)
                if a[i][t]:
                    clean = False
        for j in range(t + 1, n):
            if a[t][j]:
                col_op(j, t, a[t][j] // p)
                if a[t][j]:
                    clean = False
        if not clean:
            continue
        bad = None
        for i in range(t + 1, m):
            if any(x % p for x in a[i][t + 1:]):
                bad = i
                break
        if bad is not None:
            row_op(t, bad, -1)
            continue
        if p < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return SNFResult(IntMatrix(m, m, u), IntMatrix(m, n, a), IntMatrix(n, n, v))


def solve_integer(A: IntMatrix, b: Sequence[int]) -> tuple[int, ...]:
    """Some integer ``x`` with ``A @ x == b``; raises :class:`Infeasible`."""
    b = list(b)
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has {len(b)} entries, matrix has {A.rows} rows")
    U, S, V = snf(A)
    c = U @ b
    z = [0] * A.cols
    for i in range(A.rows):
        d = S[i, i] if i < A.cols else 0
        if d == 0:
            if c[i]:
                raise Infeasible("right-hand side is not in the column lattice")
        else:
            if c[i] % d:
                raise Infeasible("right-hand side is not in the column lattice")
            z[i] = c[i] // d
    return V @ z


def solve_linear(M: IntMatrix, b: Sequence[int], moduli: Sequence[int]) -> tuple[int, ...]:
    """Solve ``M @ x == b`` row by row modulo ``moduli``.

    The congruences become one exact system ``M x + diag(moduli) s == b``
    in the extra slack unknowns ``s``.
    """
    if len(moduli) != M.rows or len(b) != M.rows:
        raise ValueError("one right-hand side and one modulus per row are required")
    if any(q < 1 for q in moduli):
        raise ValueError("moduli must be positive")
    A = M.hstack(IntMatrix.diagonal(list(moduli)))
    y = solve_integer(A, b)
    return y[:M.cols]


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel ``{x : M @ x == 0}``."""
    a = M.T.tolist()
    u = IntMatrix.identity(M.cols).tolist()
    _row_hnf(a, u)
    basis = [u[i] for i in range(M.cols) if not any(a[i])]
    return IntMatrix.from_columns(basis, M.cols)


def determinant(M: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    a = M.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def rank(M: IntMatrix) -> int:
    return snf(M).rank


def lcm(*values: int) -> int:
    out = 1
    for x in values:
        out = out // gcd(out, x) * x
    return out
