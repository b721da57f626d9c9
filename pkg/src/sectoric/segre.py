"""Segre, secant and tangential points, flattenings and border-rank-2 membership.

Parameters follow the affine chart: factor ``j`` contributes a vector
``(1, a_1, ..., a_{k_j})`` and only the ``k_j`` free coordinates are passed
around. Factor positions are 0-based throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linalg
from .tensor import (
    Shape,
    Tensor,
    central_to_cumulants,
    interval_partitions,
    moments_to_central,
    reordered_cumulants,
    support,
    support_size,
)

FactorParams = list[list[Fraction]]


class RationalSampler:
    """Seeded source of small rationals ``p/q`` with ``|p| <= 9`` and ``1 <= q <= 9``."""

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def rational(self) -> Fraction:
        return Fraction(self._rng.randint(-9, 9), self._rng.randint(1, 9))

    def nonzero_rational(self) -> Fraction:
        while True:
            value = self.rational()
            if value:
                return value

    def factor_params(self, shape: Shape | Sequence[int]) -> FactorParams:
        dims = shape.dims if isinstance(shape, Shape) else tuple(shape)
        return [[self.rational() for _ in range(k)] for k in dims]

    def secant_params(self, shape: Shape | Sequence[int]) -> "SecantParams":
        shape = _as_shape(shape)
        a = self.factor_params(shape)
        b = self.factor_params(shape)
        return SecantParams(shape, a, b, self.rational())

    def tensor(self, shape: Shape | Sequence[int]) -> Tensor:
        """A random tensor on the affine chart."""
        shape = _as_shape(shape)
        entries = {idx: self.rational() for idx in shape.indices()}
        entries[shape.zero] = Fraction(1)
        return Tensor(shape, entries, "x")

    def rank_one_sum(self, shape: Shape | Sequence[int], terms: int) -> Tensor:
        """``sum_r w_r * segre(a_r)`` with nonzero weights summing to 1 (stays on the chart)."""
        shape = _as_shape(shape)
        while True:
            weights = [self.nonzero_rational() for _ in range(terms - 1)]
            weights.append(1 - sum(weights, Fraction(0)))
            if weights[-1]:
                break
        total = {idx: Fraction(0) for idx in shape.indices()}
        for w in weights:
            point = segre_point(shape, self.factor_params(shape))
            for idx, v in point.items():
                total[idx] += w * v
        return Tensor(shape, total, "x")


@dataclass(frozen=True)
class SecantParams:
    shape: Shape
    a: FactorParams
    b: FactorParams
    t: Fraction


def _as_shape(shape) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(shape)


def _check_params(shape: Shape, params: Sequence[Sequence]) -> list[list[Fraction]]:
    if len(params) != shape.n or any(len(p) != k for p, k in zip(params, shape.dims)):
        raise ValueError(f"parameter lengths do not match shape {shape.dims}")
    return [[Fraction(v) for v in p] for p in params]


def _coord(params: list[list[Fraction]], j: int, i: int) -> Fraction:
    return Fraction(1) if i == 0 else params[j][i - 1]


def segre_point(shape, a: Sequence[Sequence]) -> Tensor:
    """Rank-one tensor ``x_I = prod_j a^j_{i_j}``."""
    shape = _as_shape(shape)
    a = _check_params(shape, a)
    entries = {}
    for idx in shape.indices():
        v = Fraction(1)
        for j in support(idx):
            v *= a[j][idx[j] - 1]
        entries[idx] = v
    return Tensor(shape, entries, "x")


def secant_point(p: SecantParams) -> Tensor:
    """``(1 - t) * segre(a) + t * segre(b)``."""
    xa = segre_point(p.shape, p.a)
    xb = segre_point(p.shape, p.b)
    t = Fraction(p.t)
    return Tensor(p.shape, {idx: (1 - t) * xa[idx] + t * xb[idx] for idx in p.shape.indices()}, "x")


def tangent_point(shape, a: Sequence[Sequence], b: Sequence[Sequence], normalize: bool = True) -> Tensor:
    """Point on the line through ``segre(a)`` in the direction given by ``b``.

    ``x_I = (1/n) sum_k b^k_{i_k} prod_{j != k} a^j_{i_j}``. Without
    ``normalize`` the ``1/n`` is dropped; the all-zero entry is then ``n`` and
    the tensor is off the standard chart.
    """
    shape = _as_shape(shape)
    a = _check_params(shape, a)
    b = _check_params(shape, b)
    n = shape.n
    scale = Fraction(1, n) if normalize else Fraction(1)
    entries = {}
    for idx in shape.indices():
        total = Fraction(0)
        for k in range(n):
            term = _coord(b, k, idx[k])
            for j in range(n):
                if j != k:
                    term *= _coord(a, j, idx[j])
            total += term
        entries[idx] = scale * total
    return Tensor(shape, entries, "x")


def secant_cumulant_closed_form(p: SecantParams) -> Tensor:
    """Cumulants of a secant point, straight from the parameters.

    Singletons are ``(1-t) a + t b``; for ``|I| >= 2``,
    ``z_I = t (1-t) (1-2t)^{|I|-2} prod_j (b^j_{i_j} - a^j_{i_j})``.
    """
    shape = p.shape
    a = _check_params(shape, p.a)
    b = _check_params(shape, p.b)
    t = Fraction(p.t)
    entries = {}
    for idx in shape.indices():
        s = support(idx)
        if not s:
            entries[idx] = Fraction(1)
        elif len(s) == 1:
            j = s[0]
            entries[idx] = (1 - t) * a[j][idx[j] - 1] + t * b[j][idx[j] - 1]
        else:
            v = t * (1 - t) * (1 - 2 * t) ** (len(s) - 2)
            for j in s:
                v *= b[j][idx[j] - 1] - a[j][idx[j] - 1]
            entries[idx] = v
    return Tensor(shape, entries, "z")


def secant_cumulants_via_transforms(p: SecantParams) -> Tensor:
    return central_to_cumulants(moments_to_central(secant_point(p)))


# Tangential constant ---------------------------------------------------------


def tangent_gamma(n: int, m: int) -> Fraction:
    """Constant in ``y_I = gamma * prod (b - a)`` for ``|I| = m`` on ``n`` factors.

    Obtained by evaluating at ``a = 0``, ``b = 1``, where the product is 1.
    """
    return Fraction((-1) ** (m - 1) * (m - 1), n**m)


def fit_tangent_gamma(shape, seed: int, samples: int = 20) -> dict[int, Fraction]:
    """Fit the tangential constant per support size from random samples.

    Raises ``ValueError`` if some sample is not of the monomial form with a
    constant depending only on ``|I|``.
    """
    shape = _as_shape(shape)
    sampler = RationalSampler(seed)
    fitted: dict[int, Fraction] = {}
    for _ in range(samples):
        a = sampler.factor_params(shape)
        b = sampler.factor_params(shape)
        y = moments_to_central(tangent_point(shape, a, b))
        for idx, value in y.items():
            m = support_size(idx)
            if m < 2:
                continue
            prod = Fraction(1)
            for j in support(idx):
                prod *= b[j][idx[j] - 1] - a[j][idx[j] - 1]
            if prod == 0:
                if value != 0:
                    raise ValueError(f"y{idx} = {value} although a factor b - a vanishes")
                continue
            ratio = value / prod
            if fitted.setdefault(m, ratio) != ratio:
                raise ValueError(f"no single constant for |I| = {m}: {fitted[m]} vs {ratio}")
    return fitted


# Flattenings -----------------------------------------------------------------


@dataclass(frozen=True)
class Flattening:
    left: tuple[int, ...]
    right: tuple[int, ...]
    rows: list[tuple[int, ...]]
    cols: list[tuple[int, ...]]
    matrix: list[list[Fraction]]


def _colex_labels(dims: Sequence[int]) -> list[tuple[int, ...]]:
    """Multi-indices over the given factors with the first factor varying fastest."""
    labels = [()]
    for k in dims:
        labels = [lab + (i,) for i in range(k + 1) for lab in labels]
    # built with the last factor outermost, so the first one varies fastest
    return labels


def _merge(n: int, left, right, r, c) -> tuple[int, ...]:
    idx = [0] * n
    for j, i in zip(left, r):
        idx[j] = i
    for j, i in zip(right, c):
        idx[j] = i
    return tuple(idx)


def flattening(t: Tensor, left: Sequence[int]) -> Flattening:
    """Matrix with rows indexed by the ``left`` factors and columns by the rest."""
    n = t.shape.n
    left = tuple(sorted(set(left)))
    if not left or len(left) == n or any(not 0 <= j < n for j in left):
        raise ValueError("left factors must be a nonempty proper subset of the factors")
    right = tuple(j for j in range(n) if j not in left)
    rows = _colex_labels([t.shape.dims[j] for j in left])
    cols = _colex_labels([t.shape.dims[j] for j in right])
    matrix = [[t[_merge(n, left, right, r, c)] for c in cols] for r in rows]
    return Flattening(left, right, rows, cols, matrix)


def flattening_partitions(n: int, max_left: int | None = None) -> list[tuple[int, ...]]:
    """One left side per unordered bipartition, smaller side on the left.

    When both sides have the same size the side containing factor 0 is used.
    Sorted by size, then lexicographically. ``max_left`` bounds the size.
    """
    out = []
    top = n // 2
    if max_left is not None:
        top = min(top, max_left)
    for size in range(1, top + 1):
        for left in combinations(range(n), size):
            if 2 * size == n and 0 not in left:
                continue
            out.append(left)
    return out


@dataclass(frozen=True)
class MinorWitness:
    left: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]
    value: Fraction

    def to_dict(self) -> dict:
        return {
            "left": list(self.left),
            "rows": [list(r) for r in self.rows],
            "cols": [list(c) for c in self.cols],
            "value": f"{self.value.numerator}/{self.value.denominator}",
        }


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness: MinorWitness | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.member


def first_nonzero_minor(f: Flattening, size: int = 3) -> MinorWitness | None:
    """Lexicographically first nonvanishing ``size x size`` minor."""
    m = f.matrix
    for rs in combinations(range(len(m)), size):
        sub_rows = [m[r] for r in rs]
        for cs in combinations(range(len(m[0])), size):
            value = linalg.det([[row[c] for c in cs] for row in sub_rows])
            if value != 0:
                return MinorWitness(
                    f.left,
                    tuple(f.rows[r] for r in rs),
                    tuple(f.cols[c] for c in cs),
                    Fraction(value),
                )
    return None


def membership_secant(t: Tensor, max_left: int | None = None) -> MembershipResult:
    """Do all 3x3 minors of all flattenings (left side <= ``max_left``) vanish?

    A flattening has vanishing 3x3 minors exactly when its rank is at most 2,
    so ranks are tested first and minors are only searched to build a witness.
    """
    if t.system != "x":
        raise ValueError("membership is tested on x-coordinates")
    checked = 0
    for left in flattening_partitions(t.shape.n, max_left):
        f = flattening(t, left)
        checked += 1
        if linalg.rank(f.matrix) > 2:
            return MembershipResult(False, first_nonzero_minor(f), checked)
    return MembershipResult(True, None, checked)


# Similarity of x- and z-flattenings (binary shapes) -----------------------------


def _matmul(a, b):
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def _subsets(items: Sequence[int]) -> list[frozenset]:
    out = [frozenset()]
    for j in items:
        out = out + [s | {j} for s in out]
    return out


def _interval_sum(block: Sequence[int], yval) -> Fraction:
    total = Fraction(0)
    for beta in interval_partitions(block, no_singletons=True):
        term = Fraction(-1 if len(beta) % 2 else 1)
        for part in beta:
            term *= yval(part)
        total += term
    return total


def similarity_matrices(t: Tensor, left: Sequence[int], order: Sequence[int] | None = None):
    """Return ``(reduced, expected)`` for the x-to-z flattening similarity.

    ``reduced`` is the x-flattening after the triangular row and column
    operations; ``expected`` is the z-flattening with its first row and
    column replaced by a unit vector. ``left`` must be an initial segment of
    ``order`` (a permutation of factor positions, default the identity).
    """
    shape = t.shape
    n = shape.n
    if not shape.is_binary():
        raise ValueError("the similarity check is implemented for binary shapes")
    if t.system != "x":
        raise ValueError("the similarity check starts from x-coordinates")
    order = tuple(range(n)) if order is None else tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")
    rank = {f: p for p, f in enumerate(order)}
    left_set = set(left)
    if not left_set or len(left_set) == n:
        raise ValueError("left factors must be a nonempty proper subset of the factors")
    positions = sorted(rank[j] for j in left_set)
    if positions == list(range(len(positions))):
        a1 = [f for f in order if f in left_set]
        a2 = [f for f in order if f not in left_set]
    elif positions == list(range(n - len(positions), n)):
        # left is a final segment; the transpose has the same rank
        a1 = [f for f in order if f not in left_set]
        a2 = [f for f in order if f in left_set]
    else:
        raise ValueError("similarity only proved for interval partitions")

    x = t.entries()
    y = moments_to_central(t).entries()
    z = reordered_cumulants(t, order).entries()

    def key(s) -> tuple[int, ...]:
        return tuple(1 if j in s else 0 for j in range(n))

    def prod_x(s) -> Fraction:
        v = Fraction(1)
        for j in s:
            v *= x[key({j})]
        return v

    def yval(block) -> Fraction:
        return y[key(set(block))]

    rows = _subsets(a1)
    cols = _subsets(a2)
    mx = [[x[key(r | c)] for c in cols] for r in rows]
    u = [[(-1) ** len(r - r2) * prod_x(r - r2) if r2 <= r else Fraction(0) for r2 in rows] for r in rows]
    v = [[(-1) ** len(c - c2) * prod_x(c - c2) if c2 <= c else Fraction(0) for c in cols] for c2 in cols]
    m_tilde = _matmul(_matmul(u, mx), v)

    def by_rank(s):
        return sorted(s, key=rank.__getitem__)

    def u_tilde(r, r2) -> Fraction:
        if r == r2:
            return Fraction(1)
        if not r2 < r:
            return Fraction(0)
        gap = r - r2
        if r2 and min(rank[j] for j in r2) < max(rank[j] for j in gap):
            return Fraction(0)
        return _interval_sum(by_rank(gap), yval)

    def v_tilde(c2, c) -> Fraction:
        if c == c2:
            return Fraction(1)
        if not c2 < c:
            return Fraction(0)
        gap = c - c2
        if c2 and max(rank[j] for j in c2) > min(rank[j] for j in gap):
            return Fraction(0)
        return _interval_sum(by_rank(gap), yval)

    ut = [[u_tilde(r, r2) for r2 in rows] for r in rows]
    vt = [[v_tilde(c2, c) for c in cols] for c2 in cols]
    reduced = _matmul(_matmul(ut, m_tilde), vt)

    expected = []
    for r in rows:
        line = []
        for c in cols:
            if not r and not c:
                line.append(Fraction(1))
            elif not r or not c:
                line.append(Fraction(0))
            else:
                line.append(z[key(r | c)])
        expected.append(line)
    return reduced, expected


def flattening_similarity_check(t: Tensor, left: Sequence[int], order: Sequence[int] | None = None) -> bool:
    reduced, expected = similarity_matrices(t, left, order)
    return reduced == expected
