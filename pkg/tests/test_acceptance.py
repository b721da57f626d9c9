"""Acceptance criteria, one test per criterion.

Every criterion is a function returning ``(ok, detail)``. It is timed, and
its runtime bound (if any) is part of the verdict. Under pytest each test
prints one ``PASS``/``FAIL`` line through the terminal reporter; running
this file directly prints the same lines and exits nonzero on any failure.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from itertools import product
from math import comb

import pytest

from sectoric import fans, ideals, polytopes, segre
from sectoric.segre import RationalSampler
from sectoric.tensor import central_to_cumulants, moments_to_central

LISTED_SIMPLICES = {
    (0, 1, 2, 5, 8), (0, 1, 3, 5, 9), (0, 3, 4, 5, 9), (0, 2, 4, 5, 9), (0, 1, 5, 9, 10), (0, 1, 5, 8, 10),
    (0, 2, 5, 9, 10), (0, 2, 5, 8, 10), (0, 2, 4, 9, 10), (0, 2, 4, 7, 10), (0, 1, 3, 9, 10), (0, 1, 3, 6, 10),
}  # fmt: skip

GORENSTEIN_TRIPLES_AND_QUINTUPLE = {(1, 1, 1, 1, 1), (1, 1, 1), (1, 1, 3), (1, 3, 3), (3, 3, 3)}


def expected_gorenstein(shape) -> bool:
    s = tuple(sorted(shape))
    if s in GORENSTEIN_TRIPLES_AND_QUINTUPLE:
        return True
    return len(s) == 2 and (s[0] == s[1] or s[0] == 1)


# 1 --------------------------------------------------------------------------------


def cumulant_pipeline():
    shapes = [(1, 1), (1, 1, 1), (1, 1, 1, 1), (2, 2), (2, 2, 2)]
    checked = 0
    for i, shape in enumerate(shapes):
        sampler = RationalSampler(1000 + i)
        for _ in range(30):
            p = sampler.secant_params(shape)
            via = central_to_cumulants(moments_to_central(segre.secant_point(p)))
            if via != segre.secant_cumulant_closed_form(p):
                return False, f"mismatch on shape {shape}"
            checked += 1
    return True, f"{checked} samples agree exactly"


# 2 --------------------------------------------------------------------------------


def four_factor_expansion(x) -> Fraction:
    """The 13-term polynomial for the top cumulant of four binary factors."""
    return (
        x("1234") - x("12") * x("34") - x("1") * x("234") - x("2") * x("134") - x("3") * x("124")
        - x("4") * x("123") + 2 * x("12") * x("3") * x("4") + x("13") * x("2") * x("4")
        + x("14") * x("2") * x("3") + x("1") * x("23") * x("4") + x("1") * x("24") * x("3")
        + 2 * x("1") * x("2") * x("34") - 4 * x("1") * x("2") * x("3") * x("4")
    )  # fmt: skip


def top_cumulant_expansion():
    for seed in range(20):
        t = RationalSampler(seed).tensor((1, 1, 1, 1))

        def x(label):
            return t[tuple(1 if str(j + 1) in label else 0 for j in range(4))]

        z = central_to_cumulants(moments_to_central(t))
        if z[(1, 1, 1, 1)] != four_factor_expansion(x):
            return False, f"seed {seed} disagrees"
    return True, "20 random tensors match the 13-term expansion"


# 3 --------------------------------------------------------------------------------


def polytope_examples():
    simplex = {(1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1), (1, 1, 1, 1)}
    octahedron = {(1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1), (1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1)}
    eleven = {tuple(p) for p in product((0, 1), repeat=4) if sum(p) >= 2}
    got = (
        set(polytopes.j_ab(3, 2, 3)),
        {(1, *p[1:]) for p in polytopes.j_ab(3, 1, 2)},
        set(polytopes.q_points((1, 1, 1, 1))),
    )
    ok = got == (simplex, octahedron, eleven) and len(polytopes.j_general((1, 1, 1, 1))) == 11
    return ok, f"sizes {[len(g) for g in got]}"


# 4 --------------------------------------------------------------------------------


def triangulation_regression():
    tri = polytopes.secant_triangulation((1, 1, 1, 1))
    m = polytopes.triangulation_metrics(tri)
    ok = set(tri.simplices) == LISTED_SIMPLICES and len(tri.simplices) == 12
    ok = ok and m.unimodular and m.euclidean_volume == Fraction(1, 2)
    return ok, f"{len(tri.simplices)} simplices, unimodular={m.unimodular}, volume={m.euclidean_volume}"


# 5 --------------------------------------------------------------------------------


def generation_oracle():
    for n in (4, 5):
        res = ideals.fiber_connectivity_oracle(
            ideals.jab_point_map(n, 2, n), ideals.bumping_swapping_generators(n, 2, n), 3
        )
        if not res.connected:
            return False, f"n={n}: disconnected fiber {res.witness}"
    moves = ideals.bumping_swapping_generators(4, 2, 4, family="reduced")
    points = ideals.jab_point_map(4, 2, 4)
    if not ideals.fiber_connectivity_oracle(points, moves, 3):
        return False, "reduced generators do not connect the fibers"
    drop = next(i for i, m in enumerate(moves) if m.family == "swap2")
    res = ideals.fiber_connectivity_oracle(points, moves[:drop] + moves[drop + 1 :], 3)
    if res.connected or res.witness is None:
        return False, "removing a 2-set swap left every fiber connected"
    return True, f"n=4,5 connected to degree 3; mutation witness at degree {res.degree}"


# 6 --------------------------------------------------------------------------------


def groebner_properties():
    steps = 0
    for shape in [(1, 1, 1, 1), (2, 2, 2)]:
        points = ideals.gb_point_map(shape)
        for name, basis in (("gb", ideals.gb_families(shape)), ("sorted", ideals.basis_binomials(shape))):
            if not all(ideals.is_square_free(b.lhs) for b in basis):
                return False, f"{name} basis of {shape} has a square leading term"
            reducer = ideals.Reducer(basis)
            drops = []

            def on_step(old, new, rule, drops=drops):
                drops.append(ideals.inversion_measure(new) < ideals.inversion_measure(old))

            hook = on_step if name == "sorted" else None
            for d in (1, 2, 3):
                for fiber in ideals.fibers(points, d).values():
                    # every binomial inside a fiber reduces to 0 iff the fiber has one normal form
                    if len({reducer.normal_form(m, on_step=hook) for m in fiber}) != 1:
                        return False, f"{name} basis of {shape}: fiber of degree {d} has two normal forms"
            if not all(drops):
                return False, f"inversion count failed to drop for {shape}"
            steps += len(drops)
    return True, f"unique normal forms; {steps} sorted-basis steps all lower the inversion count"


# 7 --------------------------------------------------------------------------------


def secant_table():
    bad = []
    reports = fans.sweep(5, 4)
    for r in reports:
        if r.gorenstein != expected_gorenstein(r.shape):
            bad.append((r.shape, "gorenstein"))
        elif r.gorenstein and not r.smooth and not r.terminal:
            bad.append((r.shape, "terminal"))
        elif not r.smooth and not r.gorenstein and r.q_gorenstein:
            bad.append((r.shape, "q-gorenstein"))
    return not bad, f"{len(reports)} shapes, disagreements: {bad}"


# 8 --------------------------------------------------------------------------------


def tangential_table():
    problems = []
    r = fans.classify_tangential((1, 1, 1))
    for flag in ("gorenstein", "terminal", "q_factorial"):
        if getattr(r, flag) is not True:
            problems.append(f"(1,1,1) {flag}={getattr(r, flag)}")
    for shape in [(1, 1, 2), (1, 2, 2), (1, 1, 1, 1)]:
        if fans.classify_tangential(shape).q_gorenstein:
            problems.append(f"{shape} is Q-Gorenstein")
    for rep in fans.sweep(5, 4, variety="tangential"):
        if rep.smooth:
            problems.append(f"{rep.shape} smooth")
        elif rep.gorenstein != (rep.shape == (1, 1, 1)):
            problems.append(f"{rep.shape} gorenstein={rep.gorenstein}")
    if problems:
        witnesses = fans.terminal_witnesses(r.rays)
        return False, "; ".join(problems) + f"; lattice points at height one: {witnesses}"
    return True, "(1,1,1) Gorenstein, terminal, Q-factorial; others as stated; all singular"


# 9 --------------------------------------------------------------------------------


def singular_locus_counts():
    found = {}
    for n in (4, 5, 6):
        shape = (1,) * n
        cones = polytopes_normal_fan(shape)
        nonsimplicial = sum(not fans.cone_tests(c)["simplicial"] for _, c in cones)
        report = fans.classify_secant(shape)
        codims = {c.codim for c in report.components}
        found[n] = (nonsimplicial, len(report.components), codims)
        if nonsimplicial != comb(n, 2) or len(report.components) != comb(n, 2) or codims != {n}:
            return False, f"n={n}: {found[n]}"
    return True, f"(non-simplicial cones, components, codims): {found}"


def polytopes_normal_fan(shape):
    return fans.normal_fan_max_cones(polytopes.q_points(shape), polytopes.facets_Q(shape))


# 10 -------------------------------------------------------------------------------


def membership():
    shapes = [(1, 1), (1, 1, 1), (1, 1, 1, 1), (1, 1, 1, 1, 1), (1, 2), (1, 1, 2), (2, 2, 2)]
    for i, shape in enumerate(shapes):
        sampler = RationalSampler(2000 + i)
        for k in range(100):
            x = segre.secant_point(sampler.secant_params(shape))
            full = segre.membership_secant(x)
            bounded = segre.membership_secant(x, max_left=3)
            if not (full.member and bounded.member):
                return False, f"secant sample {k} of {shape} rejected"
    for seed in range(20):
        t = RationalSampler(seed).rank_one_sum((1, 1, 1, 1), 3)
        res = segre.membership_secant(t)
        if res.member or res.witness is None or res.witness.value == 0:
            return False, f"rank-three sum with seed {seed} accepted"
    return True, f"{100 * len(shapes)} secant samples accepted; 20 rank-three sums rejected with witnesses"


# 11 -------------------------------------------------------------------------------


def normality():
    shapes = fans.sweep_shapes(5, 4)
    bad = [s for s in shapes if not polytopes.normality_certificate(s, 3)]
    return not bad, f"{len(shapes)} shapes normal up to dilation 3" if not bad else f"not normal: {bad}"


CRITERIA = {
    1: ("cumulant pipeline equals closed form", cumulant_pipeline, 5.0),
    2: ("top cumulant 13-term expansion", top_cumulant_expansion, None),
    3: ("polytope point sets", polytope_examples, None),
    4: ("12-simplex pulling triangulation", triangulation_regression, 1.0),
    5: ("fiber connectivity and mutation witness", generation_oracle, 60.0),
    6: ("Groebner reduction properties", groebner_properties, 120.0),
    7: ("secant classification table", secant_table, 30.0),
    8: ("tangential classification", tangential_table, None),
    9: ("binary singular-locus counts", singular_locus_counts, None),
    10: ("border-rank-two membership", membership, 60.0),
    11: ("normality up to dilation 3", normality, 120.0),
}


def evaluate(number: int) -> tuple[bool, str]:
    title, fn, bound = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if bound is not None and elapsed >= bound:
        ok = False
        detail += f" (took {elapsed:.2f}s, bound {bound:.0f}s)"
    verdict = "PASS" if ok else "FAIL"
    limit = f" < {bound:.0f}s" if bound is not None else ""
    return ok, f"[{verdict}] criterion {number:2d}: {title} ({elapsed:.2f}s{limit}) {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, request):
    ok, line = evaluate(number)
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line("")
        reporter.write_line(line)
    else:
        print(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
