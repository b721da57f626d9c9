"""Lattice polytopes of the secant: point sets, facets, dilations, triangulations.

Points are integer tuples. An H-representation is a list of inequalities
``<u, q> >= c``. The secant polytope ``P`` lives in the product lattice
``Z^{k_1+1} x ... x Z^{k_n+1}``; forgetting the first coordinate of every
factor gives the isomorphic polytope ``Q`` in ``Z^{k_1} x ... x Z^{k_n}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Sequence

from . import _kernels, linalg
from .tensor import Shape, support_size, variable_key

Point = tuple[int, ...]


def _as_shape(shape) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(shape)


# Point sets --------------------------------------------------------------------


def j_ab(n: int, a: int, b: int) -> list[Point]:
    """Points ``(1, p_1, ..., p_n)`` with ``p`` a 0/1 vector of weight in ``[a, b]``.

    Returned in the variable order (weight first, then support).
    """
    if not 0 <= a <= b <= n:
        raise ValueError(f"need 0 <= a <= b <= n, got a={a}, b={b}, n={n}")
    bits = [p for p in product((0, 1), repeat=n) if a <= sum(p) <= b]
    bits.sort(key=variable_key)
    return [(1, *p) for p in bits]


def j_ab_hrep(n: int, a: int, b: int) -> "HRep":
    """Facet candidates of ``conv(j_ab(n, a, b))`` in ``Z^{n+1}``."""
    ineqs = []
    for i in range(n):
        u = [0] * (n + 1)
        u[i + 1] = 1
        ineqs.append(Inequality(tuple(u), 0, f"q{i}>=0"))
        u = [0] * (n + 1)
        u[i + 1] = -1
        ineqs.append(Inequality(tuple(u), -1, f"q{i}<=1"))
    ineqs.append(Inequality((0,) + (1,) * n, a, f"sum>={a}"))
    ineqs.append(Inequality((0,) + (-1,) * n, -b, f"sum<={b}"))
    # the homogenising coordinate is pinned to 1
    ineqs.append(Inequality((1,) + (0,) * n, 1, "q0>=1"))
    ineqs.append(Inequality((-1,) + (0,) * n, -1, "q0<=1"))
    return HRep(n + 1, ineqs)


def general_indices(shape) -> list[tuple[int, ...]]:
    """Multi-indices with support of size at least 2, in the variable order."""
    shape = _as_shape(shape)
    return sorted((idx for idx in shape.indices() if support_size(idx) >= 2), key=variable_key)


def embed_index(shape, idx: Sequence[int]) -> Point:
    """``e^1_{i_1} + ... + e^n_{i_n}`` in the product lattice."""
    shape = _as_shape(shape)
    out: list[int] = []
    for k, i in zip(shape.dims, idx):
        block = [0] * (k + 1)
        block[i] = 1
        out.extend(block)
    return tuple(out)


def j_general(shape) -> list[Point]:
    """Points of ``P``, one per multi-index with ``|I| >= 2``, in the variable order."""
    shape = _as_shape(shape)
    return [embed_index(shape, idx) for idx in general_indices(shape)]


def project_pi(points: Sequence[Sequence[int]], shape) -> list[Point]:
    """Drop the first coordinate of every factor block."""
    shape = _as_shape(shape)
    out = []
    for p in points:
        if len(p) != sum(k + 1 for k in shape.dims):
            raise ValueError("point does not live in the product lattice of the shape")
        q: list[int] = []
        pos = 0
        for k in shape.dims:
            q.extend(p[pos + 1 : pos + k + 1])
            pos += k + 1
        out.append(tuple(q))
    return out


def q_points(shape) -> list[Point]:
    shape = _as_shape(shape)
    return project_pi(j_general(shape), shape)


# H-representations -------------------------------------------------------------


@dataclass(frozen=True)
class Inequality:
    """``<normal, q> >= offset``."""

    normal: tuple[int, ...]
    offset: int
    label: str = ""
    facet: bool | None = None

    def value(self, q: Sequence[int]) -> int:
        return sum(u * x for u, x in zip(self.normal, q))

    def holds(self, q: Sequence[int]) -> bool:
        return self.value(q) >= self.offset

    def tight(self, q: Sequence[int]) -> bool:
        return self.value(q) == self.offset

    def to_dict(self) -> dict:
        out = {"normal": list(self.normal), "offset": self.offset, "label": self.label}
        if self.facet is not None:
            out["facet"] = self.facet
        return out


@dataclass
class HRep:
    dim: int
    inequalities: list[Inequality]
    shape: Shape | None = None
    meta: dict = field(default_factory=dict)

    def contains(self, q: Sequence[int]) -> bool:
        return all(h.holds(q) for h in self.inequalities)

    def facets(self) -> list[Inequality]:
        return [h for h in self.inequalities if h.facet]

    def dilate(self, d: int) -> "HRep":
        return HRep(
            self.dim,
            [Inequality(h.normal, h.offset * d, h.label, h.facet) for h in self.inequalities],
            self.shape,
        )


def q_inequalities(shape) -> list[Inequality]:
    """The three families cutting out ``Q`` (without facet flags)."""
    shape = _as_shape(shape)
    dim = sum(shape.dims)
    out = []
    pos = 0
    blocks = []
    for i, k in enumerate(shape.dims):
        blocks.append(range(pos, pos + k))
        for j in range(k):
            u = [0] * dim
            u[pos + j] = 1
            out.append(Inequality(tuple(u), 0, f"q[{i}][{j + 1}]>=0"))
        pos += k
    for i, blk in enumerate(blocks):
        u = [0] * dim
        for c in blk:
            u[c] = -1
        out.append(Inequality(tuple(u), -1, f"sum q[{i}]<=1"))
    out.append(Inequality((1,) * dim, 2, "sum q>=2"))
    return out


def flag_facets(points: Sequence[Sequence[int]], inequalities: Sequence[Inequality]) -> list[Inequality]:
    """Mark each inequality that cuts out a facet of ``conv(points)``.

    An inequality is a facet when the points it holds with equality span an
    affine space of dimension one less than the whole point set.
    """
    dim = linalg.affine_rank(points)
    out = []
    for h in inequalities:
        if not all(h.holds(p) for p in points):
            raise ValueError(f"inequality {h.label or h.normal} is violated by the point set")
        tight = [p for p in points if h.tight(p)]
        is_facet = bool(tight) and len(tight) < len(points) and linalg.affine_rank(tight) == dim - 1
        out.append(Inequality(h.normal, h.offset, h.label, is_facet))
    return out


def facets_Q(shape) -> HRep:
    """H-representation of ``Q`` with facet flags."""
    shape = _as_shape(shape)
    ineqs = flag_facets(q_points(shape), q_inequalities(shape))
    return HRep(sum(shape.dims), ineqs, shape)


def _coordinate_bounds(hrep: HRep) -> tuple[list[int], list[int]]:
    """A bounding box implied by the inequalities, or ``ValueError`` if none is found.

    Lower bounds come from single-coordinate inequalities; upper bounds from
    inequalities with only nonpositive coefficients once the lower bounds are
    known.
    """
    dim = hrep.dim
    lo: list[int | None] = [None] * dim
    hi: list[int | None] = [None] * dim
    for h in hrep.inequalities:
        nz = [(c, u) for c, u in enumerate(h.normal) if u]
        if len(nz) == 1:
            c, u = nz[0]
            bound = Fraction(h.offset, u)
            if u > 0:
                v = -((-bound.numerator) // bound.denominator)
                lo[c] = v if lo[c] is None else max(lo[c], v)
            else:
                v = bound.numerator // bound.denominator
                hi[c] = v if hi[c] is None else min(hi[c], v)
    changed = True
    while changed:
        changed = False
        for h in hrep.inequalities:
            if any(u > 0 for u in h.normal):
                continue
            # sum_c (-u_c) q_c <= -offset with every q_c >= lo_c
            if any(u and lo[c] is None for c, u in enumerate(h.normal)):
                continue
            slack = -h.offset - sum(-u * lo[c] for c, u in enumerate(h.normal) if u)
            for c, u in enumerate(h.normal):
                if u:
                    v = lo[c] + slack // (-u)
                    if hi[c] is None or v < hi[c]:
                        hi[c] = v
                        changed = True
    if any(v is None for v in lo) or any(v is None for v in hi):
        raise ValueError("unbounded hrep")
    return lo, hi  # type: ignore[return-value]


def dilation_lattice_points(hrep: HRep, d: int) -> list[Point]:
    """Integer points of the ``d``-th dilation, sorted lexicographically."""
    if d < 0:
        raise ValueError("dilation factor must be nonnegative")
    scaled = hrep.dilate(d)
    lo, hi = _coordinate_bounds(scaled)
    if any(l > h for l, h in zip(lo, hi)):
        return []
    A = [list(h.normal) for h in scaled.inequalities]
    b = [h.offset for h in scaled.inequalities]
    return sorted(_kernels.box_points(A, b, lo, hi))


# Normality ---------------------------------------------------------------------


@dataclass(frozen=True)
class NormalityResult:
    normal: bool
    dmax: int
    witness: Point | None = None
    witness_degree: int | None = None

    def __bool__(self) -> bool:
        return self.normal


def normality_witness(shape, dmax: int, canonical: bool = True) -> NormalityResult:
    """Search ``dQ`` for ``2 <= d <= dmax`` for a point that is not ``Q + (d-1)Q``.

    With ``canonical`` only one representative per symmetry orbit is checked
    (permuting coordinates inside a factor, permuting factors of equal size).
    The witness, if any, is reported in the coordinates of the sorted shape.
    """
    shape = _as_shape(shape)
    if dmax < 2:
        raise ValueError("dmax must be at least 2")
    dims = tuple(sorted(shape.dims))
    for d in range(2, dmax + 1):
        hit = _kernels.first_undecomposable(dims, d, canonical)
        if hit is not None:
            return NormalityResult(False, dmax, tuple(hit), d)
    return NormalityResult(True, dmax)


def normality_certificate(shape, dmax: int) -> bool:
    """True when every lattice point of ``dQ`` splits off a point of ``Q`` for ``d <= dmax``."""
    return normality_witness(shape, dmax).normal


# Pulling triangulations -----------------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    points: tuple[Point, ...]
    simplices: tuple[tuple[int, ...], ...]
    dim: int


@dataclass(frozen=True)
class TriangulationMetrics:
    unimodular: bool
    normalized_volume: int
    euclidean_volume: Fraction
    simplex_volumes: tuple[int, ...]

    def to_dict(self) -> dict:
        v = self.euclidean_volume
        return {
            "unimodular": self.unimodular,
            "normalizedVolume": self.normalized_volume,
            "euclideanVolume": f"{v.numerator}/{v.denominator}",
            "simplexVolumes": list(self.simplex_volumes),
        }


def _generic_facets(points: Sequence[Point], face: frozenset, dim: int) -> list[frozenset]:
    """Facets of ``conv(face)`` found by testing hyperplanes through its points."""
    idx = sorted(face)
    base = points[idx[0]]
    # coordinates in an affine frame of the face
    span = []
    for i in idx[1:]:
        v = [a - b for a, b in zip(points[i], base)]
        if linalg.rank(span + [v]) > len(span):
            span.append(v)
        if len(span) == dim:
            break
    frame_t = [list(col) for col in zip(*span)]
    local = {}
    for i in idx:
        sol = linalg.solve(frame_t, [a - b for a, b in zip(points[i], base)])
        local[i] = sol
    found: set[frozenset] = set()
    for chosen in combinations(idx, dim):
        rows = [local[i] + [Fraction(1)] for i in chosen]
        if linalg.rank(rows) < dim:
            continue
        ns = linalg.nullspace(rows, dim + 1)
        if len(ns) != 1:
            continue
        w = ns[0]
        vals = {i: sum((a * b for a, b in zip(w[:-1], local[i])), Fraction(0)) + w[-1] for i in idx}
        if all(v >= 0 for v in vals.values()) or all(v <= 0 for v in vals.values()):
            found.add(frozenset(i for i in idx if vals[i] == 0))
    return sorted(found, key=sorted)


def pulling_triangulation(
    points: Sequence[Sequence[int]],
    order: Sequence[int] | None = None,
    hrep: HRep | None = None,
) -> Triangulation:
    """Pulling triangulation of ``conv(points)``.

    ``order`` lists point indices from first pulled to last (default: the
    given order). When ``hrep`` lists every facet of the polytope (extra
    valid inequalities are harmless) faces are found from it; otherwise a
    brute-force facet search is used.
    """
    pts = [tuple(int(v) for v in p) for p in points]
    if not pts:
        raise ValueError("no points to triangulate")
    if order is None:
        order = range(len(pts))
    order = list(order)
    if sorted(order) != list(range(len(pts))):
        raise ValueError("order must be a permutation of the point indices")
    rank = {p: r for r, p in enumerate(order)}
    dim_cache: dict[frozenset, int] = {}

    def dim_of(face: frozenset) -> int:
        if face not in dim_cache:
            dim_cache[face] = linalg.affine_rank([pts[i] for i in sorted(face)])
        return dim_cache[face]

    def facets_of(face: frozenset) -> list[frozenset]:
        d = dim_of(face)
        if hrep is None:
            return _generic_facets(pts, face, d)
        seen = []
        for h in hrep.inequalities:
            g = frozenset(i for i in face if h.tight(pts[i]))
            if g and g != face and g not in seen and dim_of(g) == d - 1:
                seen.append(g)
        return seen

    memo: dict[frozenset, list[tuple[int, ...]]] = {}

    def pull(face: frozenset) -> list[tuple[int, ...]]:
        if face in memo:
            return memo[face]
        d = dim_of(face)
        if len(face) == d + 1:
            out = [tuple(sorted(face))]
        else:
            p = min(face, key=rank.__getitem__)
            out = []
            for g in facets_of(face):
                if p in g:
                    continue
                for s in pull(g):
                    out.append(tuple(sorted(s + (p,))))
        memo[face] = out
        return out

    full = frozenset(range(len(pts)))
    if hrep is not None:
        for p in pts:
            if not hrep.contains(p):
                raise ValueError("a point violates the supplied H-representation")
    simplices = sorted(set(pull(full)))
    return Triangulation(tuple(pts), tuple(simplices), dim_of(full))


def simplex_volume(points: Sequence[Point], simplex: Sequence[int]) -> int:
    """Normalized volume: gcd of the maximal minors of the edge matrix."""
    base = points[simplex[0]]
    edges = [[a - b for a, b in zip(points[i], base)] for i in simplex[1:]]
    if not edges:
        return 1
    return linalg.maximal_minor_gcd(edges)


def triangulation_metrics(t: Triangulation) -> TriangulationMetrics:
    vols = tuple(simplex_volume(t.points, s) for s in t.simplices)
    total = sum(vols)
    return TriangulationMetrics(
        all(v == 1 for v in vols),
        total,
        Fraction(total, factorial(t.dim)),
        vols,
    )


def secant_triangulation(shape) -> Triangulation:
    """Pulling triangulation of ``Q`` in the variable order."""
    shape = _as_shape(shape)
    return pulling_triangulation(q_points(shape), hrep=facets_Q(shape))
