import json
from fractions import Fraction
from itertools import combinations

import pytest

from sectoric.segre import RationalSampler, segre_point
from sectoric.tensor import (
    ChartError,
    Shape,
    Tensor,
    TensorFormatError,
    central_to_cumulants,
    central_to_moments,
    cumulants_to_central,
    interval_partitions,
    moments_to_central,
    reordered_cumulants,
    relabel_chart,
    support,
    to_system,
    variable_key,
)

SHAPES = [(1,), (1, 1), (2,), (1, 1, 1), (1, 2), (2, 2), (1, 1, 1, 1), (2, 2, 2), (1, 1, 1, 1, 1)]


def restricted(idx, positions):
    return tuple(idx[j] if j in positions else 0 for j in range(len(idx)))


def direct_central(x: Tensor) -> Tensor:
    """Expand prod_j (X_j - mu_j) over subsets of the support."""
    out = {}
    for idx in x.shape.indices():
        s = support(idx)
        if len(s) < 2:
            out[idx] = x[idx]
            continue
        total = Fraction(0)
        for r in range(len(s) + 1):
            for kept in combinations(s, r):
                term = x[restricted(idx, kept)]
                for j in s:
                    if j not in kept:
                        term *= -x[restricted(idx, (j,))]
                total += term
        out[idx] = total
    return Tensor(x.shape, out, "y")


def cuts(seq):
    """Blocks of consecutive elements, each of length at least two."""
    if not seq:
        yield ()
        return
    for k in range(2, len(seq) + 1):
        for rest in cuts(seq[k:]):
            yield (seq[:k],) + rest


def direct_cumulants(y: Tensor, order=None) -> Tensor:
    n = y.shape.n
    order = list(range(n)) if order is None else list(order)
    out = {}
    for idx in y.shape.indices():
        s = [j for j in order if idx[j]]
        if len(s) < 2:
            out[idx] = y[idx]
            continue
        total = Fraction(0)
        for blocks in cuts(s):
            term = Fraction((-1) ** (len(blocks) - 1))
            for b in blocks:
                term *= y[restricted(idx, b)]
            total += term
        out[idx] = total
    return Tensor(y.shape, out, "z")


def test_shape_counts():
    s = Shape((1, 2, 3))
    assert s.size == 2 * 3 * 4
    assert len(list(s.indices())) == s.size
    assert s.zero == (0, 0, 0)
    with pytest.raises(ValueError):
        Shape(())
    with pytest.raises(ValueError):
        Shape((1, 0))


def test_interval_partitions_of_three():
    parts = interval_partitions((1, 2, 3))
    assert parts == [((1, 2, 3),), ((1,), (2, 3)), ((1, 2), (3,)), ((1,), (2,), (3,))]
    assert interval_partitions((1,)) == [((1,),)]
    assert interval_partitions((1, 2, 3), no_singletons=True) == [((1, 2, 3),)]


@pytest.mark.parametrize("m", range(1, 8))
def test_interval_partition_count(m):
    parts = interval_partitions(range(m))
    assert len(parts) == 2 ** (m - 1)
    assert len(set(parts)) == len(parts)
    for p in parts:
        assert [v for b in p for v in b] == list(range(m))


def test_interval_partitions_rejects_empty():
    with pytest.raises(ValueError, match="empty index set"):
        interval_partitions(())


def test_binary_pair_centering():
    t = Tensor((1, 1), {(0, 0): 1, (1, 0): 2, (0, 1): 3, (1, 1): 11})
    y = moments_to_central(t)
    assert y[(1, 1)] == 11 - 6
    assert y[(1, 0)] == 2 and y[(0, 0)] == 1


def test_inverse_on_pair():
    y = Tensor((1, 1), {(0, 0): 1, (1, 0): 2, (0, 1): 3, (1, 1): 5}, "y")
    assert central_to_moments(y)[(1, 1)] == 5 + 6


def test_three_factor_moment_expansion():
    sampler = RationalSampler(7)
    y = sampler.tensor((1, 1, 1)).with_system("y")
    x = central_to_moments(y)

    def v(*s):
        return y[tuple(1 if j in s else 0 for j in range(3))]

    expected = v(0, 1, 2) + v(0) * v(1, 2) + v(1) * v(0, 2) + v(2) * v(0, 1) + v(0) * v(1) * v(2)
    assert x[(1, 1, 1)] == expected


def test_four_factor_cumulant():
    y = RationalSampler(3).tensor((1, 1, 1, 1)).with_system("y")
    z = central_to_cumulants(y)
    assert z[(1, 1, 1, 1)] == y[(1, 1, 1, 1)] - y[(1, 1, 0, 0)] * y[(0, 0, 1, 1)]
    assert z[(1, 1, 1, 0)] == y[(1, 1, 1, 0)]


@pytest.mark.parametrize("shape", SHAPES)
def test_forward_maps_match_direct_expansion(shape):
    sampler = RationalSampler(sum(shape) * 31 + len(shape))
    for _ in range(5):
        x = sampler.tensor(shape)
        y = moments_to_central(x)
        assert y == direct_central(x)
        assert central_to_cumulants(y) == direct_cumulants(y)


@pytest.mark.parametrize("shape", [(1, 1), (1, 1, 1), (2, 2), (1, 2, 2), (2, 2, 2)])
def test_round_trips(shape):
    sampler = RationalSampler(11)
    for _ in range(10):
        x = sampler.tensor(shape)
        assert central_to_moments(moments_to_central(x)) == x
        y = moments_to_central(x)
        assert cumulants_to_central(central_to_cumulants(y)) == y
        assert to_system(to_system(x, "z"), "x") == x


def test_rank_one_has_no_central_moments():
    sampler = RationalSampler(5)
    for shape in [(1, 1, 1), (2, 1, 2), (1, 1, 1, 1)]:
        y = moments_to_central(segre_point(shape, sampler.factor_params(shape)))
        assert all(v == 0 for idx, v in y.items() if len(support(idx)) >= 2)


def test_zero_means_leave_moments_unchanged():
    sampler = RationalSampler(9)
    x = sampler.tensor((1, 2, 1))
    entries = {idx: (0 if len(support(idx)) == 1 else v) for idx, v in x.items()}
    x = Tensor(x.shape, entries)
    assert moments_to_central(x).entries() == x.entries()


def test_chart_violation():
    t = Tensor((1, 1), {(0, 0): 2, (1, 1): 1})
    with pytest.raises(ChartError, match="not in affine chart"):
        moments_to_central(t)
    with pytest.raises(ChartError):
        central_to_cumulants(t.with_system("y"))


def test_reordering():
    sampler = RationalSampler(2)
    x = sampler.tensor((1, 1, 1))
    standard = central_to_cumulants(moments_to_central(x))
    assert reordered_cumulants(x, (0, 1, 2)) == standard
    for order in [(2, 0, 1), (1, 2, 0), (2, 1, 0)]:
        assert reordered_cumulants(x, order) == standard
    x4 = sampler.tensor((1, 1, 1, 1))
    z = reordered_cumulants(x4, (0, 1, 2, 3))
    z2 = reordered_cumulants(x4, (2, 0, 1, 3))
    assert z2 == direct_cumulants(moments_to_central(x4), (2, 0, 1, 3))
    assert z2[(1, 1, 1, 1)] != z[(1, 1, 1, 1)]
    with pytest.raises(ValueError):
        reordered_cumulants(x4, (0, 0, 1, 2))


def test_json_round_trip_and_errors():
    x = RationalSampler(4).tensor((2, 1))
    assert Tensor.from_json(x.to_json()) == x
    assert json.loads(x.to_json())["entries"]["0,0"] == "1/1"
    with pytest.raises(TensorFormatError, match="line 1, column"):
        Tensor.from_json('{"shape": [1,1], "entries": ')
    with pytest.raises(TensorFormatError):
        Tensor.from_json('{"shape": [1,1], "entries": {"0,0": 0.5}}')
    with pytest.raises(TensorFormatError):
        Tensor.from_json('{"shape": [1,1], "entries": {"0,2": "1"}}')
    with pytest.raises(TensorFormatError):
        Tensor.from_json('{"shape": [1,1], "entries": {"1,1": "1"}}')


def test_relabel_chart_moves_onto_standard_chart():
    t = Tensor((1, 1), {(0, 0): 0, (1, 0): 2, (0, 1): 0, (1, 1): 4})
    moved = relabel_chart(t, (1, 0))
    assert moved[(0, 0)] == 1 and moved[(1, 1)] == 0 and moved[(0, 1)] == 2


def test_variable_key_orders_by_support_size_first():
    assert variable_key((1, 1, 0)) < variable_key((1, 1, 1))
    assert variable_key((1, 0, 1)) < variable_key((0, 1, 1))
    assert variable_key((1, 1)) < variable_key((1, 2))
