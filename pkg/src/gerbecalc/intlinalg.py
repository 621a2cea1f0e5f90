"""Exact integer and rational linear algebra.

Matrices are stored as sparse rows (``dict`` column -> entry); entries are
Python ints or :class:`fractions.Fraction`.  Nothing here touches floating
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import DimensionError

__all__ = [
    "Matrix",
    "SmithDecomposition",
    "smith_normal_form",
    "solve_integer_linear",
    "solve_rational_linear",
    "kernel_basis",
]


class Matrix:
    """Sparse matrix with exact entries."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise DimensionError(f"expected {nrows} rows, got {len(rows)}")
        self.rows = [{j: v for j, v in r.items() if v} for r in rows]

    @classmethod
    def from_dense(cls, entries, ncols=None):
        entries = [list(r) for r in entries]
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        for r in entries:
            if len(r) != ncols:
                raise DimensionError("ragged matrix")
        return cls(len(entries), ncols, [{j: v for j, v in enumerate(r) if v} for r in entries])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def coerce(cls, a):
        return a if isinstance(a, Matrix) else cls.from_dense(a)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def to_dense(self):
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def transpose(self):
        rows = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows[j][i] = v
        return Matrix(self.ncols, self.nrows, rows)

    def matvec(self, x):
        if len(x) != self.ncols:
            raise DimensionError(f"vector of length {len(x)} for {self.nrows}x{self.ncols} matrix")
        return [sum(v * x[j] for j, v in r.items()) for r in self.rows]

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionError("shape mismatch in product")
            rows = []
            for r in self.rows:
                acc = {}
                for k, v in r.items():
                    for j, w in other.rows[k].items():
                        acc[j] = acc.get(j, 0) + v * w
                rows.append(acc)
            return Matrix(self.nrows, other.ncols, rows)
        return self.matvec(other)

    def select_rows(self, indices):
        return Matrix(len(indices), self.ncols, [dict(self.rows[i]) for i in indices])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, {self.to_dense()!r})"


def _det(dense):
    # Bareiss elimination; only used to check unimodularity in tests.
    n = len(dense)
    if n == 0:
        return 1
    m = [list(r) for r in dense]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def determinant(a):
    a = Matrix.coerce(a)
    if a.nrows != a.ncols:
        raise DimensionError("determinant of a non-square matrix")
    return _det(a.to_dense())


@dataclass(eq=False)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular.

    ``diagonal`` holds d_1 | d_2 | ... (length ``min(m, n)``, trailing zeros
    included).  The transforms and their inverses are kept sparse:
    ``u_rows`` (rows of U), ``uinv_cols`` (columns of U^-1), ``v_cols``
    (columns of V) and ``vinv_rows`` (rows of V^-1).
    """

    nrows: int
    ncols: int
    diagonal: list
    rank: int
    u_rows: list
    uinv_cols: list
    v_cols: list
    vinv_rows: list

    @property
    def U(self):
        return Matrix(self.nrows, self.nrows, [dict(r) for r in self.u_rows])

    @property
    def U_inv(self):
        return Matrix(self.nrows, self.nrows, [dict(c) for c in self.uinv_cols]).transpose()

    @property
    def V(self):
        return Matrix(self.ncols, self.ncols, [dict(c) for c in self.v_cols]).transpose()

    @property
    def V_inv(self):
        return Matrix(self.ncols, self.ncols, [dict(r) for r in self.vinv_rows])

    @property
    def D(self):
        return Matrix(self.nrows, self.ncols, [
            ({i: self.diagonal[i]} if i < len(self.diagonal) else {}) for i in range(self.nrows)
        ])

    def apply_u(self, x):
        return [sum(v * x[j] for j, v in r.items()) for r in self.u_rows]

    def apply_vinv(self, x):
        return [sum(v * x[j] for j, v in r.items()) for r in self.vinv_rows]

    def apply_uinv(self, y):
        out = [0] * self.nrows
        for c, col in enumerate(self.uinv_cols):
            yc = y[c]
            if yc:
                for i, v in col.items():
                    out[i] += v * yc
        return out

    def apply_v(self, y):
        out = [0] * self.ncols
        for c, col in enumerate(self.v_cols):
            yc = y[c]
            if yc:
                for i, v in col.items():
                    out[i] += v * yc
        return out


def _axpy(target, source, q):
    """target += q * source, in place, for sparse dicts."""
    for k, v in source.items():
        nv = target.get(k, 0) + q * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def smith_normal_form(a) -> SmithDecomposition:
    """Smith normal form by unimodular row and column operations.

    Pivots are the smallest-magnitude nonzero entry among unfinished rows
    and columns, ties broken by (row, column) index.
    """
    a = Matrix.coerce(a)
    m, n = a.shape
    rows = [dict(r) for r in a.rows]
    for r in rows:
        for v in r.values():
            if not isinstance(v, int):
                raise TypeError("smith_normal_form needs integer entries")
    u = [{i: 1} for i in range(m)]
    uinv = [{i: 1} for i in range(m)]
    vcols = [{j: 1} for j in range(n)]
    vinv = [{j: 1} for j in range(n)]
    colrows = [set() for _ in range(n)]
    for i, r in enumerate(rows):
        for j in r:
            colrows[j].add(i)
    active = set(range(m))

    def row_add(src, dst, q):
        # row_dst += q * row_src
        before = set(rows[dst])
        _axpy(rows[dst], rows[src], q)
        after = set(rows[dst])
        for j in before - after:
            colrows[j].discard(dst)
        for j in after - before:
            colrows[j].add(dst)
        _axpy(u[dst], u[src], q)
        _axpy(uinv[src], uinv[dst], -q)

    def col_add(src, dst, q):
        # col_dst += q * col_src
        for i in list(colrows[src]):
            nv = rows[i].get(dst, 0) + q * rows[i][src]
            if nv:
                if dst not in rows[i]:
                    colrows[dst].add(i)
                rows[i][dst] = nv
            else:
                rows[i].pop(dst, None)
                colrows[dst].discard(i)
        _axpy(vcols[dst], vcols[src], q)
        _axpy(vinv[src], vinv[dst], -q)

    def find_pivot():
        best = None
        for i in sorted(active):
            r = rows[i]
            if not r:
                continue
            for j in sorted(r):
                key = (abs(r[j]), i, j)
                if best is None or key < best:
                    best = key
            if best is not None and best[0] == 1:
                break
        return best

    pivots = []
    while True:
        best = find_pivot()
        if best is None:
            break
        _, i, j = best
        while True:
            restart = False
            for k in sorted(colrows[j] - {i}):
                q = rows[k][j] // rows[i][j]
                row_add(i, k, -q)
                if rows[k].get(j, 0):
                    i = k
                    restart = True
                    break
            if restart:
                continue
            for col in sorted(set(rows[i]) - {j}):
                q = rows[i][col] // rows[i][j]
                col_add(j, col, -q)
                if rows[i].get(col, 0):
                    j = col
                    restart = True
                    break
            if restart:
                continue
            p = rows[i][j]
            if abs(p) > 1:
                bad = None
                for k in sorted(active - {i}):
                    for col in sorted(rows[k]):
                        if rows[k][col] % p:
                            bad = k
                            break
                    if bad is not None:
                        break
                if bad is not None:
                    row_add(bad, i, 1)
                    continue
            break
        if rows[i][j] < 0:
            rows[i][j] = -rows[i][j]
            u[i] = {k: -v for k, v in u[i].items()}
            uinv[i] = {k: -v for k, v in uinv[i].items()}
        pivots.append((i, j, rows[i][j]))
        active.discard(i)
        colrows[j].discard(i)

    prow = [i for i, _, _ in pivots]
    pcol = [j for _, j, _ in pivots]
    used_r, used_c = set(prow), set(pcol)
    row_order = prow + [i for i in range(m) if i not in used_r]
    col_order = pcol + [j for j in range(n) if j not in used_c]
    diag = [d for _, _, d in pivots] + [0] * (min(m, n) - len(pivots))
    return SmithDecomposition(
        nrows=m,
        ncols=n,
        diagonal=diag,
        rank=len(pivots),
        u_rows=[u[i] for i in row_order],
        uinv_cols=[uinv[i] for i in row_order],
        v_cols=[vcols[j] for j in col_order],
        vinv_rows=[vinv[j] for j in col_order],
    )


def solve_integer_linear(a, b, snf=None):
    """Integer solution of ``a @ x == b`` or ``None`` when none exists."""
    a = Matrix.coerce(a)
    if len(b) != a.nrows:
        raise DimensionError(f"right-hand side has length {len(b)}, matrix has {a.nrows} rows")
    if snf is None:
        snf = smith_normal_form(a)
    y = snf.apply_u(list(b))
    xp = [0] * a.ncols
    for t, yt in enumerate(y):
        if t < snf.rank:
            d = snf.diagonal[t]
            if yt % d:
                return None
            xp[t] = yt // d
        elif yt:
            return None
    x = snf.apply_v(xp)
    if a.matvec(x) != list(b):
        raise ArithmeticError("integer solve produced a bad witness")
    return x


def solve_rational_linear(a, b, snf=None):
    """Rational solution of ``a @ x == b`` or ``None`` when inconsistent.

    Without ``snf`` the system is cleared of denominators and reduced by
    fraction-free integer elimination; with an integer ``snf`` of ``a`` the
    diagonal form is used directly.
    """
    a = Matrix.coerce(a)
    if len(b) != a.nrows:
        raise DimensionError(f"right-hand side has length {len(b)}, matrix has {a.nrows} rows")
    b = [Fraction(v) for v in b]
    if snf is not None:
        y = snf.apply_u(b)
        xp = [Fraction(0)] * a.ncols
        for t, yt in enumerate(y):
            if t < snf.rank:
                xp[t] = yt / snf.diagonal[t]
            elif yt:
                return None
        x = snf.apply_v(xp)
    else:
        x = _fraction_free_solve(a, b)
        if x is None:
            return None
    if [Fraction(v) for v in a.matvec(x)] != b:
        raise ArithmeticError("rational solve produced a bad witness")
    return x


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def _fraction_free_solve(a, b):
    n = a.ncols
    rhs_col = n
    work = []
    for r, bi in zip(a.rows, b):
        entries = {j: Fraction(v) for j, v in r.items()}
        if bi:
            entries[rhs_col] = bi
        den = 1
        for v in entries.values():
            den = lcm(den, v.denominator)
        work.append(_primitive({j: int(v * den) for j, v in entries.items() if v}))
    pivots = []
    remaining = [r for r in work if r]
    while remaining:
        # pick the row whose leading column is smallest, then sparsest
        lead = min(min(r) for r in remaining)
        cands = [r for r in remaining if min(r) == lead]
        piv = min(cands, key=lambda r: (abs(r[lead]), len(r)))
        if lead == rhs_col:
            return None
        remaining = [r for r in remaining if r is not piv]
        nxt = []
        for r in remaining:
            if lead in r:
                f, g = piv[lead], r[lead]
                new = {}
                for k in set(r) | set(piv):
                    v = f * r.get(k, 0) - g * piv.get(k, 0)
                    if v:
                        new[k] = v
                r = _primitive(new)
            if r:
                nxt.append(r)
        remaining = nxt
        pivots.append((lead, piv))
    x = [Fraction(0)] * n
    for lead, piv in reversed(pivots):
        acc = Fraction(piv.get(rhs_col, 0))
        for k, v in piv.items():
            if k != lead and k != rhs_col:
                acc -= v * x[k]
        x[lead] = acc / piv[lead]
    return x


def kernel_basis(a, snf=None):
    """Integer basis of ``{x : a @ x == 0}`` as a list of vectors."""
    a = Matrix.coerce(a)
    if snf is None:
        snf = smith_normal_form(a)
    basis = []
    for t in range(snf.rank, a.ncols):
        vec = [0] * a.ncols
        for i, v in snf.v_cols[t].items():
            vec[i] = v
        basis.append(vec)
    return basis
