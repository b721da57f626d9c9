"""Cones, normal fans and singularity classification of secant and tangential varieties.

Locally the secant (resp. tangential) variety is an affine space times the
affine toric variety of the monoid generated by the homogenized points of
``Q`` (resp. by the points of ``Q`` themselves). Everything here works with
the cone ``C`` spanned by those generators, inside the lattice they generate.
The singularity type is read off the dual cone, whose rays are the primitive
inward facet normals of ``C``.

Facet normals are never found by a general convex hull algorithm. Each
variety comes with an explicit list of candidate inequalities, and we check
exactly which of them cut out facets.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from . import _kernels, linalg
from .polytopes import HRep, Inequality, flag_facets, j_ab, q_inequalities, q_points
from .tensor import Shape

Vector = tuple[int, ...]


def _as_shape(shape) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(shape)


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _linear_rank(vectors: Sequence[Sequence[int]], stop_at: int | None = None) -> int:
    if not vectors:
        return 0
    span = linalg.IncrementalSpan(len(vectors[0]))
    for v in vectors:
        span.add(v)
        if stop_at is not None and span.rank >= stop_at:
            break
    return span.rank


# Cones --------------------------------------------------------------------------


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone given by primitive ray generators."""

    rays: tuple[Vector, ...]

    def __post_init__(self):
        if not self.rays:
            raise ValueError("a cone needs at least one ray")
        width = len(self.rays[0])
        for r in self.rays:
            if len(r) != width:
                raise ValueError("rays have different lengths")
            if not any(r):
                raise ValueError("zero ray")
            if linalg.primitive(r) != tuple(r):
                raise ValueError(f"ray {list(r)} is not primitive")

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence]) -> "Cone":
        """Scale every vector to a primitive one and drop repeats."""
        rays: list[Vector] = []
        for v in vectors:
            if not any(v):
                raise ValueError("zero ray")
            p = linalg.primitive(v)
            if p not in rays:
                rays.append(p)
        return cls(tuple(rays))

    @property
    def ambient_dim(self) -> int:
        return len(self.rays[0])

    def to_dict(self) -> dict:
        return {"rays": [list(r) for r in self.rays]}


def cone_tests(cone: Cone) -> dict:
    """``simplicial``: rays independent. ``smooth``: rays extend to a lattice basis."""
    rays = [list(r) for r in cone.rays]
    simplicial = linalg.rank(rays) == len(rays)
    smooth = simplicial and linalg.maximal_minor_gcd(rays) == 1
    return {"simplicial": simplicial, "smooth": smooth}


def normal_fan_max_cones(points: Sequence[Sequence[int]], hrep: HRep) -> list[tuple[Vector, Cone]]:
    """Maximal cones of the inner normal fan, one per vertex of ``conv(points)``.

    A point is a vertex when it is the only point lying on every facet through
    it. Its cone is spanned by the inward normals of those facets. Points that
    are not vertices are skipped.
    """
    points = [tuple(p) for p in points]
    ineqs = hrep.inequalities
    if any(h.facet is None for h in ineqs):
        ineqs = flag_facets(points, ineqs)
    facets = [h for h in ineqs if h.facet]
    out = []
    for v in points:
        through = [h for h in facets if h.tight(v)]
        if not through:
            continue
        if any(p != v and all(h.tight(p) for h in through) for p in points):
            continue
        out.append((v, Cone.from_vectors([h.normal for h in through])))
    return out


# Dual cones from candidate inequalities --------------------------------------------


@dataclass
class DualCone:
    """Cone spanned by ``generators`` together with its dual rays.

    ``basis`` is a basis of the lattice the generators span. ``coords`` holds
    the generators in that basis. The dual rays are primitive vectors of the
    dual lattice, written in the dual basis. When the generators span the
    whole ambient lattice the basis is the standard one and nothing changes.
    """

    generators: list[Vector]
    basis: list[list[int]]
    coords: list[Vector]
    inequalities: list[Inequality]
    rays: list[Vector]
    ray_labels: list[str]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def full_lattice(self) -> bool:
        n = len(self.generators[0])
        return self.rank == n and all(self.basis[i][i] == 1 for i in range(n))

    def cone(self) -> Cone:
        return Cone(tuple(self.rays))


def dual_cone(generators: Sequence[Sequence[int]], candidates: Sequence[Inequality]) -> DualCone:
    """Keep the candidate inequalities ``<u, x> >= 0`` that define facets.

    Every candidate must hold on every generator. A candidate is a facet when
    the generators it vanishes on span a space of dimension one less than the
    cone. Candidates that restrict to the same functional on the lattice are
    merged. The candidate list must contain all facets; that part is not
    checked here.
    """
    gens = list(dict.fromkeys(tuple(int(x) for x in g) for g in generators))
    basis = linalg.lattice_basis(gens)
    r = len(basis)
    n = len(gens[0])
    full = r == n and all(basis[i][i] == 1 for i in range(n))
    coords = gens if full else [tuple(linalg.coordinates_in_basis(basis, g)) for g in gens]

    flagged = []
    rays: list[Vector] = []
    labels: list[str] = []
    for h in candidates:
        if h.offset != 0:
            raise ValueError("cone inequalities must be homogeneous")
        values = [h.value(g) for g in gens]
        if min(values) < 0:
            raise ValueError(f"inequality {h.label or list(h.normal)} is violated by a generator")
        restricted = tuple(_dot(h.normal, b) for b in basis)
        is_facet = False
        if any(restricted):
            tight = [g for g, val in zip(gens, values) if val == 0]
            is_facet = _linear_rank(tight, stop_at=r - 1) == r - 1
        flagged.append(Inequality(h.normal, 0, h.label, is_facet))
        if is_facet:
            ray = linalg.primitive(restricted)
            if ray not in rays:
                rays.append(ray)
                labels.append(h.label)
    return DualCone(gens, basis, coords, flagged, rays, labels)


def cone_facet_normals(rays: Sequence[Sequence[int]]) -> list[Vector]:
    """Primitive inward facet normals of a full-dimensional cone, by brute force.

    Tries every set of ``dim - 1`` independent rays. Only meant for small
    cones and as a cross-check of the candidate-based route.
    """
    rays = [tuple(r) for r in rays]
    dim = len(rays[0])
    if linalg.rank(rays) != dim:
        raise ValueError("cone is not full-dimensional")
    normals: list[Vector] = []
    for subset in combinations(rays, dim - 1):
        if linalg.rank(subset) != dim - 1:
            continue
        u = linalg.primitive(linalg.nullspace(subset, dim)[0])
        values = [_dot(u, r) for r in rays]
        if all(x >= 0 for x in values):
            pass
        elif all(x <= 0 for x in values):
            u = tuple(-x for x in u)
        else:
            continue
        if u not in normals:
            normals.append(u)
    return normals


# Gorenstein and terminal tests ----------------------------------------------------


@dataclass(frozen=True)
class GorensteinResult:
    """Outcome of the (Q-)Gorenstein test on a set of rays.

    ``certificate`` is an integer covector equal to 1 on every ray, when one
    exists. ``rational_certificate`` is the same over the rationals.
    """

    gorenstein: bool
    q_gorenstein: bool
    certificate: Vector | None
    rational_certificate: tuple[Fraction, ...] | None

    def __bool__(self) -> bool:
        return self.gorenstein

    def to_dict(self) -> dict:
        return {
            "gorenstein": self.gorenstein,
            "qGorenstein": self.q_gorenstein,
            "certificate": None if self.certificate is None else list(self.certificate),
            "rationalCertificate": None
            if self.rational_certificate is None
            else [str(x) for x in self.rational_certificate],
        }


def gorenstein_test(rays: Sequence[Sequence[int]]) -> GorensteinResult:
    """Look for a covector that is 1 on every ray, first over Q then over Z.

    A constant value ``a > 0`` on all rays can always be rescaled to 1, so the
    rational solve is exactly the Q-Gorenstein test.
    """
    rays = [list(r) for r in rays]
    if not rays:
        raise ValueError("need at least one ray")
    ones = [1] * len(rays)
    lam_q = linalg.solve(rays, ones)
    if lam_q is None:
        return GorensteinResult(False, False, None, None)
    lam_z = linalg.solve_integer(rays, ones)
    if lam_z is not None and any(_dot(lam_z, r) != 1 for r in rays):
        raise AssertionError("integer certificate does not evaluate to 1 on every ray")
    return GorensteinResult(
        lam_z is not None,
        True,
        None if lam_z is None else tuple(lam_z),
        tuple(lam_q),
    )


def terminal_witnesses(
    rays: Sequence[Sequence[int]],
    inequalities: Sequence[Sequence[int]] | None = None,
) -> list[Vector]:
    """Lattice points of ``conv(0, rays)`` other than 0 and the rays.

    ``inequalities`` are covectors ``w`` with ``<w, x> >= 0`` cutting out the
    cone over the rays (for a dual cone these are the original generators).
    They are computed by brute force when omitted. The cone must be
    Gorenstein: with ``lambda`` the certificate, ``conv(0, rays)`` is the part
    of the cone with ``lambda <= 1``, and the only lattice point with
    ``lambda = 0`` is the origin.
    """
    rays = [tuple(r) for r in rays]
    cert = gorenstein_test(rays)
    if not cert.gorenstein:
        raise ValueError("terminal test needs a Gorenstein cone")
    lam = list(cert.certificate)
    if inequalities is None:
        inequalities = cone_facet_normals(rays)
    ineqs = [list(w) for w in dict.fromkeys(tuple(w) for w in inequalities)]
    dim = len(rays[0])
    # everything at height one lies in conv(rays), so the rays bound the box
    lo = [min(r[i] for r in rays) for i in range(dim)]
    hi = [max(r[i] for r in rays) for i in range(dim)]
    A = ineqs + [lam, [-x for x in lam]]
    b = [0] * len(ineqs) + [1, -1]
    found = _kernels.box_points(A, b, lo, hi)
    ray_set = set(rays)
    return sorted(tuple(p) for p in found if tuple(p) not in ray_set)


def terminal_test(
    rays: Sequence[Sequence[int]],
    inequalities: Sequence[Sequence[int]] | None = None,
) -> bool:
    """True when ``conv(0, rays)`` holds no lattice points besides 0 and the rays."""
    return not terminal_witnesses(rays, inequalities)


# Secant ---------------------------------------------------------------------------


def secant_generators(shape) -> list[Vector]:
    """Points ``(1, q)`` for ``q`` in ``Q``."""
    return [(1, *q) for q in q_points(shape)]


def secant_candidates(shape) -> list[Inequality]:
    """The facet inequalities of ``Q`` made homogeneous in the extra coordinate."""
    return [Inequality((-h.offset, *h.normal), 0, h.label) for h in q_inequalities(shape)]


def secant_dual_cone(shape) -> DualCone:
    shape = _as_shape(shape)
    return dual_cone(secant_generators(shape), secant_candidates(shape))


def secant_dual_rays(shape) -> list[Vector]:
    """Rays of the dual of the cone over ``Q``.

    Written in the standard dual basis when the homogenized points span the
    whole lattice (all shapes with at least three factors). For two factors
    they are written in the dual of the lattice basis the points span.
    """
    return secant_dual_cone(shape).rays


def secant_dimension(shape) -> int:
    """Projective dimension of the secant variety of the Segre product."""
    shape = _as_shape(shape)
    return sum(shape.dims) + _linear_rank(secant_generators(shape))


def tangential_dimension(shape) -> int:
    shape = _as_shape(shape)
    if shape.n == 2:
        return secant_dimension(shape)
    return sum(shape.dims) + _linear_rank(q_points(shape))


@dataclass(frozen=True)
class Component:
    """Irreducible component of the singular locus, indexed by two factors."""

    pair: tuple[int, int]
    codim: int

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "codim": self.codim}


@dataclass
class ClassificationReport:
    shape: tuple[int, ...]
    variety: str
    smooth: bool
    simplicial: bool
    q_factorial: bool
    q_gorenstein: bool
    gorenstein: bool
    terminal: bool | None
    components: list[Component]
    dimension: int
    rays: list[Vector] = field(default_factory=list)
    certificate: Vector | None = None
    intersection: str | None = None

    def __post_init__(self):
        if self.gorenstein and not self.q_gorenstein:
            raise AssertionError("Gorenstein cone reported as not Q-Gorenstein")
        if self.smooth and not self.q_factorial:
            raise AssertionError("smooth cone reported as not Q-factorial")

    def to_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "variety": self.variety,
            "smooth": self.smooth,
            "simplicial": self.simplicial,
            "qFactorial": self.q_factorial,
            "qGorenstein": self.q_gorenstein,
            "gorenstein": self.gorenstein,
            "terminal": self.terminal,
            "components": [c.to_dict() for c in self.components],
            "intersection": self.intersection,
            "dimension": self.dimension,
            "rays": [list(r) for r in self.rays],
            "certificate": None if self.certificate is None else list(self.certificate),
        }


def _classify_cone(dual: DualCone) -> dict:
    tests = cone_tests(dual.cone())
    g = gorenstein_test(dual.rays)
    terminal = None
    if g.gorenstein:
        terminal = terminal_test(dual.rays, dual.coords)
    return {
        "smooth": tests["smooth"],
        "simplicial": tests["simplicial"],
        "q_factorial": tests["simplicial"],
        "q_gorenstein": g.q_gorenstein,
        "gorenstein": g.gorenstein,
        "terminal": terminal,
        "rays": list(dual.rays),
        "certificate": g.certificate,
    }


def secant_components(shape) -> list[Component]:
    """Components of the singular locus of a singular secant, with codimensions.

    With three or more factors there is one component for every pair of
    factors: the product of the other factors with the secant of the pair.
    With two factors the singular locus is the Segre variety itself.
    """
    shape = _as_shape(shape)
    dims = shape.dims
    total = secant_dimension(shape)
    if shape.n == 2:
        return [Component((0, 1), total - sum(dims))]
    out = []
    for i, j in combinations(range(shape.n), 2):
        rest = sum(k for pos, k in enumerate(dims) if pos not in (i, j))
        out.append(Component((i, j), total - rest - secant_dimension((dims[i], dims[j]))))
    return out


def classify_secant(shape) -> ClassificationReport:
    shape = _as_shape(shape)
    if shape.n < 2:
        raise ValueError("the secant needs at least two factors")
    facts = _classify_cone(secant_dual_cone(shape))
    components = [] if facts["smooth"] else secant_components(shape)
    intersection = "pairwise intersection = Segre" if components and shape.n >= 3 else None
    return ClassificationReport(
        shape=shape.dims,
        variety="secant",
        components=components,
        dimension=secant_dimension(shape),
        intersection=intersection,
        **facts,
    )


# Tangential -----------------------------------------------------------------------


def tangential_candidates(shape) -> list[Inequality]:
    """``q^i_j >= 0`` (forcing zero) and ``sum_{l != i} q^l >= sum q^i`` (forcing one)."""
    shape = _as_shape(shape)
    dim = sum(shape.dims)
    out = []
    blocks = []
    pos = 0
    for i, k in enumerate(shape.dims):
        blocks.append(range(pos, pos + k))
        for j in range(k):
            u = [0] * dim
            u[pos + j] = 1
            out.append(Inequality(tuple(u), 0, f"zero[{i}][{j + 1}]"))
        pos += k
    for i, blk in enumerate(blocks):
        u = [1] * dim
        for c in blk:
            u[c] = -1
        out.append(Inequality(tuple(u), 0, f"one[{i}]"))
    return out


def tangential_ray_generators(shape) -> list[Vector]:
    """Points of ``Q`` with exactly two nonzero coordinates."""
    return [q for q in q_points(shape) if sum(q) == 2]


@dataclass
class TangentialCone:
    shape: Shape
    hrep: HRep
    rays: list[Vector]
    dual: DualCone


def tangential_cone(shape) -> TangentialCone:
    """The cone spanned by ``Q`` with flagged inequalities and its ray generators."""
    shape = _as_shape(shape)
    dual = dual_cone(q_points(shape), tangential_candidates(shape))
    hrep = HRep(sum(shape.dims), dual.inequalities, shape)
    return TangentialCone(shape, hrep, tangential_ray_generators(shape), dual)


def tangential_saturation_check(shape, height: int) -> list[Vector]:
    """Integer points of the cone with coordinate sum ``<= height`` that are not sums of ``Q`` points.

    An empty list means the monoid generated by ``Q`` is saturated up to that height.
    """
    shape = _as_shape(shape)
    dim = sum(shape.dims)
    gens = q_points(shape)
    rows = [list(h.normal) for h in tangential_candidates(shape)] + [[-1] * dim]
    bounds = [0] * (len(rows) - 1) + [-height]
    in_cone = _kernels.box_points(rows, bounds, [0] * dim, [height] * dim)
    reached = {tuple([0] * dim)}
    frontier = list(reached)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                s = tuple(a + b for a, b in zip(p, g))
                if sum(s) <= height and s not in reached:
                    reached.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(tuple(p) for p in in_cone if tuple(p) not in reached)


def tangential_components(shape) -> list[Component]:
    shape = _as_shape(shape)
    dims = shape.dims
    return [
        Component((i, j), 1 + sum(k for pos, k in enumerate(dims) if pos not in (i, j)))
        for i, j in combinations(range(shape.n), 2)
    ]


def classify_tangential(shape) -> ClassificationReport:
    shape = _as_shape(shape)
    if shape.n < 2:
        raise ValueError("the tangential variety needs at least two factors")
    if shape.n == 2:
        # with two factors the tangential variety is the secant
        report = classify_secant(shape)
        report.variety = "tangential"
        return report
    facts = _classify_cone(tangential_cone(shape).dual)
    components = tangential_components(shape)
    return ClassificationReport(
        shape=shape.dims,
        variety="tangential",
        components=components,
        dimension=tangential_dimension(shape),
        **facts,
    )


@dataclass(frozen=True)
class SubconeViolation:
    facets: tuple[str, ...]
    reason: str


def tangential_subcone_check(shape) -> tuple[int, list[SubconeViolation]]:
    """Check the smoothness pattern of the faces of the tangential dual cone.

    Every proper face of the dual cone is spanned by the dual rays of the
    facets through some face of the cone over ``Q``. The expected pattern:
    a face holding two forcing-one rays also holds every forcing-zero ray of
    the remaining factors and is singular, and every other proper face is
    smooth. Returns the number of faces looked at and the violations found.
    """
    shape = _as_shape(shape)
    tc = tangential_cone(shape)
    dual = tc.dual
    facets = [h for h in dual.inequalities if h.facet]
    labels = [h.label for h in facets]
    ray_of = dict(zip(dual.ray_labels, dual.rays))

    def through(gen) -> frozenset:
        return frozenset(i for i, h in enumerate(facets) if h.tight(gen))

    faces = {through(g) for g in tc.rays}
    frontier = set(faces)
    while frontier:
        new = set()
        for a in frontier:
            for b in faces | frontier:
                c = a & b
                if c and c not in faces:
                    new.add(c)
        faces |= new
        frontier = new

    violations = []
    for face in sorted(faces, key=lambda f: (len(f), sorted(f))):
        names = tuple(labels[i] for i in sorted(face))
        ones = {int(lbl[4:-1]) for lbl in names if lbl.startswith("one[")}
        cone = Cone.from_vectors([ray_of[lbl] for lbl in names])
        smooth = cone_tests(cone)["smooth"]
        if len(ones) >= 2:
            needed = {
                lbl for lbl in labels if lbl.startswith("zero[") and int(lbl[5:].split("]")[0]) not in ones
            }
            if len(ones) == 2 and not needed <= set(names):
                violations.append(SubconeViolation(names, "missing forcing-zero rays"))
            if smooth:
                violations.append(SubconeViolation(names, "smooth with two forcing-one rays"))
        elif not smooth:
            violations.append(SubconeViolation(names, "singular without two forcing-one rays"))
    return len(faces), violations


# Toric divisors of the binary secant polytope ---------------------------------------


@dataclass(frozen=True)
class DivisorType:
    facet: Inequality
    label: str
    points: int
    verified: bool

    def to_dict(self) -> dict:
        return {"facet": self.facet.to_dict(), "label": self.label, "points": self.points, "verified": self.verified}


def toric_divisor_types(n: int) -> list[DivisorType]:
    """Identify the toric divisor of each facet of the binary polytope ``J_{2,n}``.

    The facet's lattice points are mapped to a target point set by a lattice
    isomorphism of the facet's hyperplane (dropping the fixed coordinate) and
    compared as sets.
    """
    if n < 4:
        raise ValueError("facet description not minimal")
    shape = Shape((1,) * n)
    points = q_points(shape)
    facets = [h for h in flag_facets(points, q_inequalities(shape)) if h.facet]
    out = []
    for h in facets:
        on = [p for p in points if h.tight(p)]
        coords = [i for i, u in enumerate(h.normal) if u]
        if len(coords) == 1:
            i = coords[0]
            value = 0 if h.offset == 0 else 1
            image = {p[:i] + p[i + 1 :] for p in on}
            lo = 2 if value == 0 else 1
            target = {p[1:] for p in j_ab(n - 1, lo, n - 1)}
            label = f"T_{{{lo},{n - 1}}}"
        else:
            image = set(on)
            target = {p[1:] for p in j_ab(n, 2, 2)}
            label = "T_{2,2}"
        out.append(DivisorType(h, label, len(on), image == target))
    return out


# Sweep ----------------------------------------------------------------------------


def sweep_shapes(max_n: int, max_k: int) -> list[tuple[int, ...]]:
    """Sorted shapes with 2 to ``max_n`` factors of size at most ``max_k``."""
    out = []
    for n in range(2, max_n + 1):
        out.extend(combinations_with_replacement(range(1, max_k + 1), n))
    return out


def sweep(max_n: int, max_k: int, variety: str = "secant", workers: int = 1) -> list[ClassificationReport]:
    """Classify every sorted shape of the sweep, optionally in worker processes."""
    if variety not in ("secant", "tangential"):
        raise ValueError(f"unknown variety {variety!r}")
    shapes = sweep_shapes(max_n, max_k)
    if variety == "tangential":
        shapes = [s for s in shapes if len(s) >= 3]
    fn = classify_secant if variety == "secant" else classify_tangential
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, shapes))
    return [fn(s) for s in shapes]
