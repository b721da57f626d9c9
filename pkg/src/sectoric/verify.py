"""Regression suite of worked examples, run by ``sectoric verify``.

Each check is a small function returning ``(passed, detail)``. A check may
be registered as a known discrepancy: it still runs and its outcome is
reported, but it does not change the exit status. This is used for a
published claim that the computation contradicts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import comb
from typing import Callable

from . import fans, ideals, polytopes, segre, tensor

CheckFn = Callable[[], tuple[bool, str]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    status: str
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "status": self.status,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


_CHECKS: list[tuple[str, CheckFn, bool]] = []


def check(name: str, discrepancy: bool = False):
    def register(fn: CheckFn) -> CheckFn:
        _CHECKS.append((name, fn, discrepancy))
        return fn

    return register


def check_names() -> list[str]:
    return [name for name, _, _ in _CHECKS]


BINARY4_SIMPLICES = [
    (0, 1, 2, 5, 8), (0, 1, 3, 5, 9), (0, 3, 4, 5, 9), (0, 2, 4, 5, 9), (0, 1, 5, 9, 10), (0, 1, 5, 8, 10),
    (0, 2, 5, 9, 10), (0, 2, 5, 8, 10), (0, 2, 4, 9, 10), (0, 2, 4, 7, 10), (0, 1, 3, 9, 10), (0, 1, 3, 6, 10),
]  # fmt: skip


def z1234_expansion(x: Callable[[str], Fraction]) -> Fraction:
    """The thirteen-term polynomial for the top cumulant of a binary 4-tensor."""
    return (
        x("1234")
        - x("12") * x("34")
        - x("1") * x("234")
        - x("2") * x("134")
        - x("3") * x("124")
        - x("4") * x("123")
        + 2 * x("12") * x("3") * x("4")
        + x("13") * x("2") * x("4")
        + x("14") * x("2") * x("3")
        + x("1") * x("23") * x("4")
        + x("1") * x("24") * x("3")
        + 2 * x("1") * x("2") * x("34")
        - 4 * x("1") * x("2") * x("3") * x("4")
    )


def _binary_entry(t: tensor.Tensor, label: str) -> Fraction:
    idx = [0] * t.shape.n
    for ch in label:
        idx[int(ch) - 1] = 1
    return t[tuple(idx)]


# Polytopes -----------------------------------------------------------------------


@check("polytope.simplex_J23")
def _simplex():
    pts = set(polytopes.j_ab(3, 2, 3))
    want = {(1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1), (1, 1, 1, 1)}
    return pts == want, f"{len(pts)} points"


@check("polytope.octahedron_J12")
def _octahedron():
    pts = set(polytopes.j_ab(3, 1, 2))
    want = {(1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1), (1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1)}
    return pts == want, f"{len(pts)} points"


@check("polytope.octahedron_volume")
def _octahedron_volume():
    pts = polytopes.j_ab(3, 1, 2)
    tri = polytopes.pulling_triangulation([p[1:] for p in pts])
    m = polytopes.triangulation_metrics(tri)
    ok = m.normalized_volume == 4 and m.euclidean_volume == Fraction(2, 3)
    return ok, f"normalized {m.normalized_volume}, euclidean {m.euclidean_volume}"


@check("polytope.binary4_points")
def _binary4_points():
    pts = polytopes.j_ab(4, 2, 4)
    return len(pts) == 11 and len(set(pts)) == 11, f"{len(pts)} points"


@check("polytope.binary4_triangulation")
def _binary4_triangulation():
    tri = polytopes.secant_triangulation((1, 1, 1, 1))
    got = sorted(tuple(sorted(s)) for s in tri.simplices)
    return got == sorted(BINARY4_SIMPLICES), f"{len(got)} simplices"


@check("polytope.binary4_metrics")
def _binary4_metrics():
    m = polytopes.triangulation_metrics(polytopes.secant_triangulation((1, 1, 1, 1)))
    ok = m.unimodular and m.normalized_volume == 12 and m.euclidean_volume == Fraction(1, 2)
    return ok, f"unimodular {m.unimodular}, euclidean {m.euclidean_volume}"


@check("polytope.normality_d3")
def _normality():
    shapes = [(1, 1, 1), (1, 1, 1, 1), (2, 2, 2), (1, 2, 3), (1, 1, 1, 1, 1)]
    bad = [s for s in shapes if not polytopes.normality_certificate(s, 3)]
    return not bad, f"failing: {bad}" if bad else f"{len(shapes)} shapes normal up to d=3"


# Coordinates and samplers ---------------------------------------------------------


@check("tensor.z1234_expansion")
def _z1234():
    for seed in range(20):
        t = segre.RationalSampler(seed).tensor((1, 1, 1, 1))
        z = tensor.to_system(t, "z")
        if z[(1, 1, 1, 1)] != z1234_expansion(lambda s: _binary_entry(t, s)):
            return False, f"mismatch at seed {seed}"
    return True, "20 seeded tensors"


@check("tensor.interval_partition_count")
def _interval_count():
    ok = all(len(tensor.interval_partitions(range(m))) == 2 ** (m - 1) for m in range(1, 9))
    return ok, "m = 1..8"


@check("tensor.round_trip")
def _round_trip():
    for seed in range(10):
        t = segre.RationalSampler(seed).tensor((1, 2, 1))
        back = tensor.to_system(tensor.to_system(t, "z"), "x")
        if back != t:
            return False, f"seed {seed}"
    return True, "10 seeded tensors of shape (1,2,1)"


@check("segre.rank_one_cumulants_vanish")
def _rank_one():
    s = segre.RationalSampler(3)
    for shape in [(1, 1, 1), (2, 1, 2)]:
        z = tensor.to_system(segre.segre_point(shape, s.factor_params(shape)), "z")
        if any(v != 0 for idx, v in z.items() if tensor.support_size(idx) >= 2):
            return False, f"nonzero cumulant for shape {shape}"
    return True, "all z_I with |I| >= 2 vanish"


@check("segre.secant_closed_form")
def _closed_form():
    for shape in [(1, 1), (1, 1, 1), (1, 1, 1, 1), (2, 2), (2, 2, 2)]:
        s = segre.RationalSampler(17)
        for _ in range(5):
            p = s.secant_params(shape)
            if segre.secant_cumulants_via_transforms(p) != segre.secant_cumulant_closed_form(p):
                return False, f"shape {shape}"
    return True, "5 samples on 5 shapes"


@check("segre.membership_secant")
def _membership():
    s = segre.RationalSampler(5)
    for shape in [(1, 1, 1, 1), (2, 1, 2)]:
        for _ in range(5):
            if not segre.membership_secant(segre.secant_point(s.secant_params(shape))):
                return False, f"secant sample of {shape} rejected"
    return True, "10 secant samples accepted"


@check("segre.rank_three_rejected")
def _rank_three():
    s = segre.RationalSampler(9)
    for _ in range(5):
        res = segre.membership_secant(s.rank_one_sum((1, 1, 1, 1), 3))
        if res.member or res.witness is None or res.witness.value == 0:
            return False, "sum of three rank-one tensors accepted"
    return True, "5 rank-three sums rejected with a nonzero minor"


@check("segre.flattening_similarity")
def _similarity():
    t = segre.RationalSampler(11).tensor((1, 1, 1, 1))
    cases = [((0, 1), None), ((0, 2), (0, 2, 1, 3)), ((0,), None)]
    ok = all(segre.flattening_similarity_check(t, left, order) for left, order in cases)
    return ok, "12|34, 13|24 reordered, 1|234"


# Ideals -------------------------------------------------------------------------


@check("ideals.bumping_swapping_n4")
def _oracle4():
    res = ideals.fiber_connectivity_oracle(
        ideals.jab_point_map(4, 2, 4), ideals.bumping_swapping_generators(4, 2, 4), 3
    )
    return res.connected, f"{res.fibers_checked} fibers"


@check("ideals.bumping_swapping_n5")
def _oracle5():
    res = ideals.fiber_connectivity_oracle(
        ideals.jab_point_map(5, 2, 5), ideals.bumping_swapping_generators(5, 2, 5), 3
    )
    return res.connected, f"{res.fibers_checked} fibers"


@check("ideals.mutation_disconnects")
def _mutation():
    moves = ideals.bumping_swapping_generators(4, 2, 4, family="reduced")
    full = ideals.fiber_connectivity_oracle(ideals.jab_point_map(4, 2, 4), moves, 3)
    swaps = [i for i, m in enumerate(moves) if m.family == "swap2"]
    cut = moves[: swaps[0]] + moves[swaps[0] + 1 :]
    res = ideals.fiber_connectivity_oracle(ideals.jab_point_map(4, 2, 4), cut, 3)
    ok = full.connected and not res.connected and res.witness is not None
    return ok, f"witness at degree {res.degree}" if res.witness else "no witness"


def _fiber_reduction(shape, basis) -> tuple[bool, str]:
    reducer = ideals.Reducer(basis)
    points = ideals.gb_point_map(shape)
    for d in (2, 3):
        for fiber in ideals.fibers(points, d).values():
            if len({reducer.normal_form(m) for m in fiber}) > 1:
                return False, f"fiber of degree {d} has two normal forms"
    if not all(ideals.is_square_free(b.lhs) for b in basis):
        return False, "leading term with a square"
    return True, f"{len(basis)} binomials"


@check("ideals.gb_families_1111")
def _gb1111():
    return _fiber_reduction((1, 1, 1, 1), ideals.gb_families((1, 1, 1, 1)))


@check("ideals.gb_families_222")
def _gb222():
    return _fiber_reduction((2, 2, 2), ideals.gb_families((2, 2, 2)))


@check("ideals.basis_binomials_inversions")
def _basis_inversions():
    shape = (1, 1, 1, 1)
    basis = ideals.basis_binomials(shape)
    ok, detail = _fiber_reduction(shape, basis)
    if not ok:
        return ok, detail
    drops = []

    def on_step(old, new, rule):
        drops.append(ideals.inversion_measure(new) < ideals.inversion_measure(old))

    reducer = ideals.Reducer(basis)
    for fiber in ideals.fibers(ideals.gb_point_map(shape), 3).values():
        for m in fiber:
            reducer.normal_form(m, on_step=on_step)
    return all(drops), f"{len(drops)} reduction steps"


# Classification ---------------------------------------------------------------------


def _expected_gorenstein(shape) -> bool:
    s = tuple(sorted(shape))
    if s in {(1, 1, 1, 1, 1), (1, 1, 1), (1, 1, 3), (1, 3, 3), (3, 3, 3)}:
        return True
    return len(s) == 2 and (s[0] == s[1] or s[0] == 1)


@lru_cache(maxsize=None)
def _sweep(max_n: int, max_k: int, variety: str = "secant"):
    return tuple(fans.sweep(max_n, max_k, variety))


@check("fans.secant_table")
def _secant_table():
    bad = []
    for r in _sweep(5, 4):
        if r.gorenstein != _expected_gorenstein(r.shape):
            bad.append(r.shape)
        elif r.gorenstein and not r.terminal:
            bad.append(r.shape)
        elif not r.smooth and not r.gorenstein and r.q_gorenstein:
            bad.append(r.shape)
    return not bad, f"disagreements: {bad}" if bad else "121 shapes agree"


@check("fans.secant_smooth_cases")
def _smooth():
    smooth = [r.shape for r in _sweep(5, 4) if r.smooth]
    want = [(1, 1), (1, 2), (1, 3), (1, 4), (1, 1, 1)]
    return smooth == want, f"smooth: {smooth}"


@check("fans.binary5_gorenstein_terminal")
def _binary5():
    r = fans.classify_secant((1, 1, 1, 1, 1))
    ok = r.gorenstein and r.terminal and not r.smooth and r.certificate == (2, 1, 1, 1, 1, 1)
    return ok, f"certificate {r.certificate}"


@check("fans.binary4_components")
def _binary4():
    r = fans.classify_secant((1, 1, 1, 1))
    ok = not r.q_gorenstein and len(r.components) == 6 and all(c.codim == 4 for c in r.components)
    return ok, f"{len(r.components)} components"


@check("fans.binary_normal_fans")
def _normal_fans():
    out = []
    for n in (4, 5, 6):
        shape = (1,) * n
        cones = fans.normal_fan_max_cones(polytopes.q_points(shape), polytopes.facets_Q(shape))
        bad = sum(not fans.cone_tests(c)["simplicial"] for _, c in cones)
        codims = {c.codim for c in fans.classify_secant(shape).components}
        out.append(bad == comb(n, 2) and codims == {n})
    return all(out), "n = 4, 5, 6"


@check("fans.tangential_only_111_q_gorenstein")
def _tangential_table():
    tangential = _sweep(5, 4, "tangential")
    qg = [r.shape for r in tangential if r.q_gorenstein]
    singular = all(not r.smooth for r in tangential)
    return qg == [(1, 1, 1)] and singular, f"Q-Gorenstein: {qg}"


@check("fans.tangential_111_gorenstein")
def _tangential_111():
    r = fans.classify_tangential((1, 1, 1))
    return r.gorenstein and r.q_factorial and not r.smooth, f"certificate {r.certificate}"


@check("fans.tangential_111_terminal", discrepancy=True)
def _tangential_111_terminal():
    r = fans.classify_tangential((1, 1, 1))
    extra = fans.terminal_witnesses(r.rays)
    return bool(r.terminal), f"lattice points besides the rays at height one: {extra}"


@check("fans.tangential_saturation")
def _saturation():
    bad = {s: fans.tangential_saturation_check(s, 6) for s in [(1, 1, 1), (1, 1, 2)]}
    return not any(bad.values()), "saturated up to coordinate sum 6"


@check("fans.binary_divisors")
def _divisors():
    ok = all(d.verified for n in (4, 5) for d in fans.toric_divisor_types(n))
    return ok, "facets of J_{2,4} and J_{2,5}"


# Runner -----------------------------------------------------------------------------


def verify_suite(only: list[str] | None = None) -> list[CheckResult]:
    results = []
    for name, fn, discrepancy in _CHECKS:
        if only and not any(name.startswith(o) for o in only):
            continue
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # report the crash as a failure of this check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        if passed:
            status = "pass"
        else:
            status = "discrepancy" if discrepancy else "fail"
        results.append(CheckResult(name, passed, status, detail, elapsed))
    return results


def suite_ok(results: list[CheckResult]) -> bool:
    return all(r.status != "fail" for r in results)


__all__ = ["CheckResult", "check_names", "suite_ok", "verify_suite", "z1234_expansion", "BINARY4_SIMPLICES"]
