from fractions import Fraction
from itertools import combinations

import pytest

from sectoric import ideals, linalg
from sectoric.segre import (
    RationalSampler,
    SecantParams,
    fit_tangent_gamma,
    flattening,
    flattening_partitions,
    flattening_similarity_check,
    membership_secant,
    secant_cumulant_closed_form,
    secant_point,
    segre_point,
    tangent_gamma,
    tangent_point,
)
from sectoric.tensor import (
    ChartError,
    Shape,
    Tensor,
    central_to_cumulants,
    moments_to_central,
    support,
    support_size,
)


def all_minors_vanish(matrix, size):
    rows, cols = len(matrix), len(matrix[0])
    for rs in combinations(range(rows), size):
        for cs in combinations(range(cols), size):
            if linalg.det([[matrix[r][c] for c in cs] for r in rs]) != 0:
                return False
    return True


def test_segre_point_basics():
    x = segre_point((1, 1, 1), [[0], [0], [0]])
    assert x[(0, 0, 0)] == 1
    assert all(v == 0 for idx, v in x.items() if idx != (0, 0, 0))
    x = segre_point((1, 1), [[Fraction(2)], [Fraction(-3, 4)]])
    assert x[(1, 1)] == Fraction(-3, 2) and x[(1, 0)] == 2 and x[(0, 1)] == Fraction(-3, 4)
    with pytest.raises(ValueError):
        segre_point((1, 1), [[1]])


def test_segre_samples_have_rank_one_flattenings():
    sampler = RationalSampler(1)
    for _ in range(20):
        shape = (1, 2, 1)
        x = segre_point(shape, sampler.factor_params(shape))
        for left in flattening_partitions(3):
            assert all_minors_vanish(flattening(x, left).matrix, 2)


def test_secant_endpoints():
    sampler = RationalSampler(2)
    shape = Shape((2, 1, 1))
    a, b = sampler.factor_params(shape), sampler.factor_params(shape)
    assert secant_point(SecantParams(shape, a, b, Fraction(0))) == segre_point(shape, a)
    assert secant_point(SecantParams(shape, a, b, Fraction(1))) == segre_point(shape, b)


def test_secant_minors_vanish_exhaustively():
    sampler = RationalSampler(3)
    for _ in range(5):
        x = secant_point(sampler.secant_params((1, 1, 1, 1)))
        for left in flattening_partitions(4):
            m = flattening(x, left).matrix
            if len(m) >= 3 and len(m[0]) >= 3:
                assert all_minors_vanish(m, 3)


@pytest.mark.parametrize("shape", [(1, 1), (1, 1, 1), (1, 2), (1, 1, 1, 1), (2, 2), (1, 2, 2), (2, 2, 2)])
def test_closed_form_equals_transform_pipeline(shape):
    sampler = RationalSampler(hash(shape) % 1000)
    for _ in range(30):
        p = sampler.secant_params(shape)
        assert central_to_cumulants(moments_to_central(secant_point(p))) == secant_cumulant_closed_form(p)


def test_closed_form_special_values():
    sampler = RationalSampler(4)
    shape = Shape((1, 1, 1, 1))
    a, b = sampler.factor_params(shape), sampler.factor_params(shape)
    z = secant_cumulant_closed_form(SecantParams(shape, a, b, Fraction(1, 2)))
    assert all(v == 0 for idx, v in z.items() if support_size(idx) >= 3)
    t = Fraction(2, 7)
    z = secant_cumulant_closed_form(SecantParams(shape, a, b, t))
    assert z[(1, 1, 0, 0)] == t * (1 - t) * (b[0][0] - a[0][0]) * (b[1][0] - a[1][0])


def test_flattening_layout_matches_four_factor_display():
    labels = {}
    for idx in Shape((1, 1, 1, 1)).indices():
        labels[idx] = Fraction(int("".join(map(str, idx)), 2) + 2)
    labels[(0, 0, 0, 0)] = Fraction(1)
    f = flattening(Tensor((1, 1, 1, 1), labels), (0, 1))

    def x(*s):
        return labels[tuple(1 if j in s else 0 for j in range(4))]

    assert f.matrix == [
        [x(), x(2), x(3), x(2, 3)],
        [x(0), x(0, 2), x(0, 3), x(0, 2, 3)],
        [x(1), x(1, 2), x(1, 3), x(1, 2, 3)],
        [x(0, 1), x(0, 1, 2), x(0, 1, 3), x(0, 1, 2, 3)],
    ]
    with pytest.raises(ValueError):
        flattening(Tensor((1, 1), {(0, 0): 1}), (0, 1))


def test_flattening_ranks():
    sampler = RationalSampler(5)
    x = segre_point((2, 1, 2), sampler.factor_params((2, 1, 2)))
    assert linalg.rank(flattening(x, (0,)).matrix) == 1
    x = secant_point(sampler.secant_params((2, 2, 2)))
    assert all(linalg.rank(flattening(x, left).matrix) <= 2 for left in flattening_partitions(3))


def test_membership_for_secant_and_small_cases():
    sampler = RationalSampler(6)
    for shape in [(1, 1, 1, 1), (2, 2, 2), (1, 1, 1, 1, 1)]:
        for _ in range(5):
            x = secant_point(sampler.secant_params(shape))
            assert membership_secant(x)
            assert membership_secant(x, max_left=3)
    # the secant of three binary factors fills the space
    for _ in range(10):
        assert membership_secant(sampler.tensor((1, 1, 1)))


def test_membership_witness_is_a_real_minor():
    sampler = RationalSampler(8)
    t = sampler.rank_one_sum((1, 1, 1, 1), 3)
    res = membership_secant(t)
    assert not res
    w = res.witness
    f = flattening(t, w.left)
    rows = [f.rows.index(r) for r in w.rows]
    cols = [f.cols.index(c) for c in w.cols]
    value = linalg.det([[f.matrix[r][c] for c in cols] for r in rows])
    assert value == w.value != 0


def test_membership_needs_x_coordinates():
    with pytest.raises(ValueError):
        membership_secant(Tensor((1, 1, 1), {(0, 0, 0): 1}, "z"))


def test_tangent_point_properties():
    sampler = RationalSampler(9)
    shape = (1, 2, 1)
    a = sampler.factor_params(shape)
    assert tangent_point(shape, a, a) == segre_point(shape, a)
    b = sampler.factor_params(shape)
    b[1][0] = a[1][0]
    y = moments_to_central(tangent_point(shape, a, b))
    for idx, v in y.items():
        if support_size(idx) >= 2 and idx[1] == 1:
            assert v == 0


def test_tangent_without_normalization_leaves_the_chart():
    a = [[Fraction(1)], [Fraction(2)]]
    t = tangent_point((1, 1), a, a, normalize=False)
    assert t[(0, 0)] == 2
    with pytest.raises(ChartError):
        moments_to_central(t)


@pytest.mark.parametrize("shape", [(1, 1, 1), (1, 1, 1, 1), (2, 1, 2), (1, 1, 1, 1, 1)])
def test_tangent_constant_is_monomial_and_matches_unit_evaluation(shape):
    fitted = fit_tangent_gamma(shape, seed=10, samples=20)
    n = len(shape)
    for m, value in fitted.items():
        assert value == tangent_gamma(n, m)


def test_tangent_cumulants_satisfy_toric_binomials():
    sampler = RationalSampler(12)
    for shape in [(1, 1, 1, 1), (1, 1, 2), (2, 2, 2)]:
        basis = ideals.gb_families(shape)
        for _ in range(10):
            a, b = sampler.factor_params(shape), sampler.factor_params(shape)
            z = central_to_cumulants(moments_to_central(tangent_point(shape, a, b)))

            def value(m):
                out = Fraction(1)
                for v in m:
                    out *= z[v]
                return out

            assert all(value(g.lhs) == value(g.rhs) for g in basis)


def test_similarity_on_interval_partitions():
    sampler = RationalSampler(13)
    for _ in range(10):
        x = sampler.tensor((1, 1, 1, 1))
        assert flattening_similarity_check(x, (0, 1))
        assert flattening_similarity_check(x, (0,))
        assert flattening_similarity_check(x, (0, 2), order=(0, 2, 1, 3))
    assert flattening_similarity_check(sampler.tensor((1, 1)), (0,))
    with pytest.raises(ValueError, match="interval partitions"):
        flattening_similarity_check(sampler.tensor((1, 1, 1, 1)), (0, 2))


def test_sampler_is_deterministic():
    assert RationalSampler(42).tensor((1, 2)) == RationalSampler(42).tensor((1, 2))
    values = [RationalSampler(0).rational() for _ in range(3)]
    assert all(abs(v.numerator) <= 9 and 1 <= v.denominator <= 9 for v in values)
