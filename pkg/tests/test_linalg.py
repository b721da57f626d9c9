from fractions import Fraction
from itertools import combinations, permutations, product
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectoric import linalg

small = st.integers(min_value=-6, max_value=6)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def gauss_rank(rows):
    """Plain Fraction elimination, kept deliberately naive."""
    m = [[Fraction(v) for v in row] for row in rows]
    r = 0
    for c in range(len(m[0]) if m else 0):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i, j in combinations(range(n), 2) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term *= rows[i][perm[i]]
        total += (-1) ** inv * term
    return total


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_naive_elimination(rows):
    assert linalg.rank(rows) == gauss_rank(rows)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_leibniz(rows):
    assert linalg.det(rows) == leibniz_det(rows)


def test_rank_with_fractions():
    rows = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]]
    assert linalg.rank(rows) == 1
    assert linalg.det(rows) == 0


@settings(max_examples=100, deadline=None)
@given(matrices(4, 4), st.lists(small, min_size=4, max_size=4))
def test_solve_returns_exact_solution_when_consistent(rows, x):
    x = x[: len(rows[0])]
    rhs = [sum(a * b for a, b in zip(row, x)) for row in rows]
    sol = linalg.solve(rows, rhs)
    assert sol is not None
    assert [sum(a * b for a, b in zip(row, sol)) for row in rows] == rhs


def test_solve_detects_inconsistency():
    assert linalg.solve([[1, 1], [2, 2]], [1, 3]) is None


@settings(max_examples=100, deadline=None)
@given(matrices(4, 5))
def test_nullspace_is_annihilated_and_complementary(rows):
    basis = linalg.nullspace(rows)
    ncols = len(rows[0])
    assert len(basis) == ncols - linalg.rank(rows)
    for v in basis:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in rows)


def test_primitive():
    assert linalg.primitive([4, -6, 0]) == (2, -3, 0)
    assert linalg.primitive([Fraction(1, 2), Fraction(1, 3)]) == (3, 2)


def test_maximal_minor_gcd_against_enumeration():
    rows = [[1, 0, 2], [0, 2, 2]]
    minors = [leibniz_det([[r[c] for c in cols] for r in rows]) for cols in combinations(range(3), 2)]
    g = 0
    for m in minors:
        g = gcd(g, m)
    assert linalg.maximal_minor_gcd(rows) == g == 2


@settings(max_examples=100, deadline=None)
@given(matrices(4, 3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_solve_integer_finds_integer_solutions(rows, lam):
    """Rows as vectors r, unknown covector l with <l, r> = rhs."""
    lam = lam[: len(rows[0])]
    rhs = [sum(a * b for a, b in zip(row, lam)) for row in rows]
    sol = linalg.solve_integer(rows, rhs)
    assert sol is not None
    assert all(isinstance(v, int) for v in sol)
    assert [sum(a * b for a, b in zip(row, sol)) for row in rows] == rhs


def test_solve_integer_rejects_rational_only_solutions():
    # 2x = 1 has a rational solution but no integer one
    assert linalg.solve_integer([[2]], [1]) is None
    assert linalg.solve([[2]], [1]) == [Fraction(1, 2)]


def brute_lattice_contains(basis, vec, bound=6):
    k = len(basis)
    for coeffs in product(range(-bound, bound + 1), repeat=k):
        if all(sum(c * b[i] for c, b in zip(coeffs, basis)) == vec[i] for i in range(len(vec))):
            return True
    return False


def test_lattice_basis_generates_same_lattice():
    vectors = [[2, 0, 2], [0, 2, 2], [1, 1, 2]]
    basis = linalg.lattice_basis(vectors)
    assert len(basis) == linalg.rank(vectors) == 2
    for v in vectors:
        coords = linalg.coordinates_in_basis(basis, v)
        assert [sum(c * b[i] for c, b in zip(coords, basis)) for i in range(3)] == v
    # (1,1,2) is in the lattice but (1,0,1) is not, though both lie in the span
    assert not brute_lattice_contains(basis, [1, 0, 1])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4))
def test_lattice_basis_spans_input(vectors):
    basis = linalg.lattice_basis(vectors)
    assert len(basis) == linalg.rank(vectors)
    for v in vectors:
        coords = linalg.coordinates_in_basis(basis, v)
        assert [sum(c * b[i] for c, b in zip(coords, basis)) for i in range(3)] == list(v)


def test_affine_rank_of_simplex_and_segment():
    assert linalg.affine_rank([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert linalg.affine_rank([[1, 1], [2, 2], [3, 3]]) == 1


def test_incremental_span():
    span = linalg.IncrementalSpan(3)
    assert span.add([1, 2, 3])
    assert not span.add([2, 4, 6])
    assert span.add([0, 1, 0])
    assert span.rank == 2


@pytest.mark.parametrize("rows", [[], [[0, 0]]])
def test_rank_degenerate(rows):
    assert linalg.rank(rows) == 0
