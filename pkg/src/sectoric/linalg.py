"""Exact linear algebra over the rationals and the integers.

Matrices are plain lists of rows. Entries are ``int`` or ``Fraction``;
nothing here ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Sequence

Matrix = list[list]


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (row rank is unchanged)."""
    out = []
    for row in rows:
        den = 1
        for v in row:
            if isinstance(v, Fraction):
                den = lcm(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def rank(rows: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss style) elimination."""
    m = _integer_rows(rows)
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f == 0:
                row = m[i]
                for j in range(c, ncols):
                    row[j] = row[j] * p // prev
                continue
            row, prow = m[i], m[r]
            for j in range(c, ncols):
                row[j] = (row[j] * p - f * prow[j]) // prev
        prev = p
        r += 1
        if r == len(m):
            break
    return r


def det(rows: Sequence[Sequence]) -> Fraction | int:
    """Determinant of a square matrix (Bareiss on integers, rescaled)."""
    n = len(rows)
    if n == 0:
        return 1
    scale = Fraction(1)
    m = []
    for row in rows:
        den = 1
        for v in row:
            if isinstance(v, Fraction):
                den = lcm(den, v.denominator)
        scale /= den
        m.append([int(v * den) for v in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    value = sign * m[n - 1][n - 1] * scale
    if value.denominator == 1:
        return int(value)
    return value


class IncrementalSpan:
    """Row-echelon basis that accepts vectors one at a time.

    Used to get ranks of large point sets with an early exit once a target
    rank is reached.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: list[list[int]] = []
        self._pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def add(self, vec: Sequence) -> bool:
        v = _integer_rows([vec])[0]
        for row, p in zip(self._rows, self._pivots):
            if v[p]:
                a, b = row[p], v[p]
                v = [a * x - b * y for x, y in zip(v, row)]
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            return False
        g = 0
        for x in v:
            g = gcd(g, x)
        v = [x // g for x in v]
        self._rows.append(v)
        self._pivots.append(piv)
        return True


def affine_rank(points: Sequence[Sequence], stop_at: int | None = None) -> int:
    """Dimension of the affine hull of ``points`` (-1 for the empty set)."""
    if not points:
        return -1
    base = points[0]
    span = IncrementalSpan(len(base))
    for p in points[1:]:
        span.add([a - b for a, b in zip(p, base)])
        if stop_at is not None and span.rank >= stop_at:
            break
    return span.rank


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One rational solution of ``rows @ x = rhs`` (free variables set to 0)."""
    n = len(rows[0]) if rows else 0
    m = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = m[i][n]
    return x


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel."""
    n = ncols if ncols is not None else len(rows[0])
    m = [[Fraction(v) for v in row] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        basis.append(v)
    return basis


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    den = 1
    for v in vec:
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def maximal_minor_gcd(rows: Sequence[Sequence[int]]) -> int:
    """gcd of all r x r minors of an r x n integer matrix (r <= n)."""
    r = len(rows)
    n = len(rows[0])
    if r == n:
        return abs(int(det(rows)))
    g = 0
    for cols in combinations(range(n), r):
        d = det([[row[c] for c in cols] for row in rows])
        g = gcd(g, abs(int(d)))
        if g == 1:
            break
    return g


def _column_hnf(a: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style echelon form ``a @ v = h`` with ``v`` unimodular."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    h = [list(r) for r in a]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(i: int, j: int, p: int, q: int, s: int, t: int) -> None:
        # (col_i, col_j) <- (p col_i + q col_j, s col_i + t col_j)
        for mat in (h, v):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, s * x + t * y

    c = 0
    for r in range(rows):
        if c >= cols:
            break
        for j in range(c + 1, cols):
            if h[r][j] == 0:
                continue
            x, y = h[r][c], h[r][j]
            g, p, q = _xgcd(x, y)
            colop(c, j, p, q, -y // g, x // g)
        if h[r][c] != 0:
            if h[r][c] < 0:
                for mat in (h, v):
                    for row in mat:
                        row[c] = -row[c]
            c += 1
    return h, v


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def solve_integer(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[int] | None:
    """An integer solution of ``rows @ x = rhs``, or None if there is none."""
    a = [list(map(int, r)) for r in rows]
    n = len(a[0])
    h, v = _column_hnf(a)
    y = [0] * n
    c = 0
    for r, row in enumerate(h):
        acc = sum(row[j] * y[j] for j in range(c))
        if c < n and row[c] != 0:
            num = rhs[r] - acc
            if num % row[c]:
                return None
            y[c] = num // row[c]
            c += 1
        elif acc != rhs[r]:
            return None
    return [sum(v[i][j] * y[j] for j in range(n)) for i in range(n)]


def lattice_basis(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row basis (Hermite form) of the lattice generated by integer vectors."""
    basis: list[list[int]] = []
    dim = len(vectors[0])
    for vec in vectors:
        basis = _hermite_insert(basis, list(map(int, vec)), dim)
        if len(basis) == dim and all(basis[i][i] == 1 for i in range(dim)):
            # already the whole of Z^dim
            return [[int(i == j) for j in range(dim)] for i in range(dim)]
    return basis


def _hermite_insert(basis: list[list[int]], vec: list[int], dim: int) -> list[list[int]]:
    rows = [list(r) for r in basis] + [vec]
    out = []
    col = 0
    while rows and col < dim:
        nz = [r for r in rows if r[col] != 0]
        zero = [r for r in rows if r[col] == 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                (rest if r2[col] != 0 else zero).append(r2)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        rows = [r for r in zero if any(r)]
        col += 1
    return out


def coordinates_in_basis(basis: Sequence[Sequence[int]], vec: Sequence[int]) -> list[int]:
    """Integer coordinates of ``vec`` in a lattice basis (must lie in the lattice)."""
    t = [list(col) for col in zip(*basis)]
    sol = solve(t, vec)
    if sol is None or any(x.denominator != 1 for x in sol):
        raise ValueError("vector is not in the lattice")
    return [int(x) for x in sol]
