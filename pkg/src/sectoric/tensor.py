"""Tensors on a product of projective spaces and the moment/central/cumulant charts.

A tensor of shape ``(k_1, ..., k_n)`` has one entry per multi-index
``(i_1, ..., i_n)`` with ``0 <= i_j <= k_j``. The support of a multi-index is
the set of positions with a nonzero entry. Everything works on the affine
chart where the all-zero entry equals 1.

Three coordinate systems are supported:

* ``x``: raw (moment) coordinates,
* ``y``: central coordinates, obtained by centring each factor,
* ``z``: cumulant coordinates, obtained from ``y`` by a sum over interval
  partitions of the support without singleton blocks.

All maps are triangular in the support size, so the inverses are computed by
back-substitution in increasing ``|I|``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence

MultiIndex = tuple[int, ...]

SYSTEMS = ("x", "y", "z")


class ChartError(ValueError):
    """The tensor is not on the affine chart (all-zero entry is not 1)."""


class TensorFormatError(ValueError):
    """Malformed tensor JSON."""


@dataclass(frozen=True)
class Shape:
    """Factor dimensions ``(k_1, ..., k_n)``; factor ``j`` is ``P^{k_j}``."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(k) for k in dims)
        if not dims:
            raise ValueError("a shape needs at least one factor")
        if any(k < 1 for k in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        """Number of coordinates, the product of ``k_j + 1``."""
        out = 1
        for k in self.dims:
            out *= k + 1
        return out

    @property
    def zero(self) -> MultiIndex:
        return (0,) * len(self.dims)

    def indices(self) -> Iterator[MultiIndex]:
        """All multi-indices in lexicographic order."""
        return product(*(range(k + 1) for k in self.dims))

    def indices_by_support(self) -> list[MultiIndex]:
        """All multi-indices sorted by support size (then lexicographically)."""
        return sorted(self.indices(), key=lambda idx: (support_size(idx), idx))

    def check_index(self, idx: Sequence[int]) -> MultiIndex:
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.n or any(not 0 <= i <= k for i, k in zip(idx, self.dims)):
            raise ValueError(f"multi-index {idx} does not fit shape {self.dims}")
        return idx

    def is_binary(self) -> bool:
        return all(k == 1 for k in self.dims)

    def __str__(self) -> str:
        return ",".join(map(str, self.dims))


def support(idx: Sequence[int]) -> tuple[int, ...]:
    """Positions of the nonzero entries."""
    return tuple(j for j, i in enumerate(idx) if i)


def support_size(idx: Sequence[int]) -> int:
    return sum(1 for i in idx if i)


def restrict(idx: Sequence[int], positions: Iterable[int]) -> MultiIndex:
    """Keep the entries at ``positions`` and zero out the rest."""
    keep = set(positions)
    return tuple(i if j in keep else 0 for j, i in enumerate(idx))


class Tensor:
    """A dense map from the multi-indices of a shape to rationals."""

    __slots__ = ("shape", "system", "_entries")

    def __init__(self, shape: Shape | Sequence[int], entries: Mapping, system: str = "x"):
        if not isinstance(shape, Shape):
            shape = Shape(shape)
        if system not in SYSTEMS:
            raise ValueError(f"unknown coordinate system {system!r}")
        self.shape = shape
        self.system = system
        full = {idx: Fraction(0) for idx in shape.indices()}
        for idx, value in entries.items():
            full[shape.check_index(idx)] = Fraction(value)
        self._entries = full

    def __getitem__(self, idx: Sequence[int]) -> Fraction:
        return self._entries[tuple(idx)]

    def items(self):
        return self._entries.items()

    def entries(self) -> dict[MultiIndex, Fraction]:
        return dict(self._entries)

    def in_chart(self) -> bool:
        return self._entries[self.shape.zero] == 1

    def with_system(self, system: str) -> "Tensor":
        return Tensor(self.shape, self._entries, system)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.system == other.system
            and self._entries == other._entries
        )

    def __repr__(self) -> str:
        nz = sum(1 for v in self._entries.values() if v)
        return f"Tensor(shape={self.shape.dims}, system={self.system!r}, nonzero={nz})"

    # JSON I/O ---------------------------------------------------------------

    def to_dict(self) -> dict:
        entries = {}
        for idx in sorted(self._entries):
            value = self._entries[idx]
            if value or idx == self.shape.zero:
                entries[",".join(map(str, idx))] = format_rational(value)
        return {"shape": list(self.shape.dims), "system": self.system, "entries": entries}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Tensor":
        if not isinstance(data, Mapping):
            raise TensorFormatError("tensor JSON must be an object")
        for key in ("shape", "entries"):
            if key not in data:
                raise TensorFormatError(f"tensor JSON is missing the {key!r} field")
        try:
            shape = Shape(data["shape"])
        except (TypeError, ValueError) as exc:
            raise TensorFormatError(f"bad shape: {exc}") from None
        system = data.get("system", "x")
        if system not in SYSTEMS:
            raise TensorFormatError(f"bad coordinate system {system!r}")
        raw = data["entries"]
        if not isinstance(raw, Mapping):
            raise TensorFormatError("'entries' must be an object")
        entries = {}
        for key, value in raw.items():
            try:
                idx = shape.check_index(int(part) for part in str(key).split(","))
            except ValueError as exc:
                raise TensorFormatError(f"bad entry key {key!r}: {exc}") from None
            try:
                entries[idx] = parse_rational(value)
            except (ValueError, ZeroDivisionError, TypeError):
                raise TensorFormatError(f"bad rational {value!r} at entry {key!r}") from None
        if shape.zero not in entries:
            raise TensorFormatError("the all-zero entry must be present")
        return cls(shape, entries, system)

    @classmethod
    def from_json(cls, text: str) -> "Tensor":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TensorFormatError(
                f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
        return cls.from_dict(data)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError("rationals must be given as integers or 'p/q' strings")
    return Fraction(value)


# Interval partitions --------------------------------------------------------


def interval_partitions(items: Sequence, no_singletons: bool = False) -> list[tuple[tuple, ...]]:
    """All ways to cut the ordered sequence ``items`` into consecutive blocks.

    >>> interval_partitions((1, 2, 3))
    [((1, 2, 3),), ((1,), (2, 3)), ((1, 2), (3,)), ((1,), (2,), (3,))]
    """
    items = tuple(items)
    m = len(items)
    if m == 0:
        raise ValueError("empty index set")
    out = []
    for ncuts in range(m):
        for cuts in combinations(range(1, m), ncuts):
            bounds = (0, *cuts, m)
            blocks = tuple(items[bounds[t] : bounds[t + 1]] for t in range(len(bounds) - 1))
            if no_singletons and any(len(b) < 2 for b in blocks):
                continue
            out.append(blocks)
    return out


# Coordinate changes ---------------------------------------------------------


def _require_chart(t: Tensor, system: str) -> None:
    if t.system != system:
        raise ValueError(f"expected a tensor in {system}-coordinates, got {t.system}")
    if not t.in_chart():
        raise ChartError("not in affine chart")


def _centring_correction(idx: MultiIndex, values: Mapping[MultiIndex, Fraction]) -> Fraction:
    """``sum over proper A of (-1)^{|S\\A|} v_{I|A} prod_{j in S\\A} v_{I|j}``."""
    s = support(idx)
    single = {j: values[restrict(idx, (j,))] for j in s}
    total = Fraction(0)
    for size in range(len(s)):
        sign = -1 if (len(s) - size) % 2 else 1
        for keep in combinations(s, size):
            rest = 1
            for j in s:
                if j not in keep:
                    rest *= single[j]
            total += sign * values[restrict(idx, keep)] * rest
    return total


def moments_to_central(t: Tensor) -> Tensor:
    """x -> y: centre every factor at its first-order moment."""
    _require_chart(t, "x")
    x = t.entries()
    y = dict(x)
    for idx in t.shape.indices():
        if support_size(idx) >= 2:
            y[idx] = x[idx] + _centring_correction(idx, x)
    return Tensor(t.shape, y, "y")


def central_to_moments(t: Tensor) -> Tensor:
    """y -> x, the inverse of :func:`moments_to_central`."""
    _require_chart(t, "y")
    y = t.entries()
    x = dict(y)
    for idx in t.shape.indices_by_support():
        if support_size(idx) >= 2:
            # the correction only reads x on proper sub-indices, already solved
            x[idx] = y[idx] - _centring_correction(idx, x)
    return Tensor(t.shape, x, "x")


def _positions_in_order(order: Sequence[int] | None, n: int) -> dict[int, int]:
    if order is None:
        return {j: j for j in range(n)}
    order = tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")
    return {factor: pos for pos, factor in enumerate(order)}


def _cumulant_correction(
    idx: MultiIndex, y: Mapping[MultiIndex, Fraction], rank: Mapping[int, int]
) -> Fraction:
    """Sum over no-singleton interval partitions with two or more blocks."""
    s = sorted(support(idx), key=rank.__getitem__)
    total = Fraction(0)
    for blocks in interval_partitions(s, no_singletons=True):
        if len(blocks) < 2:
            continue
        term = Fraction(-1 if len(blocks) % 2 == 0 else 1)
        for block in blocks:
            term *= y[restrict(idx, block)]
        total += term
    return total


def central_to_cumulants(t: Tensor, order: Sequence[int] | None = None) -> Tensor:
    """y -> z. ``order`` lists factor positions in the order used for intervals."""
    _require_chart(t, "y")
    rank = _positions_in_order(order, t.shape.n)
    y = t.entries()
    z = dict(y)
    for idx in t.shape.indices():
        if support_size(idx) >= 4:
            z[idx] = y[idx] + _cumulant_correction(idx, y, rank)
    return Tensor(t.shape, z, "z")


def cumulants_to_central(t: Tensor, order: Sequence[int] | None = None) -> Tensor:
    """z -> y, the inverse of :func:`central_to_cumulants`."""
    _require_chart(t, "z")
    rank = _positions_in_order(order, t.shape.n)
    z = t.entries()
    y = dict(z)
    for idx in t.shape.indices_by_support():
        if support_size(idx) >= 4:
            y[idx] = z[idx] - _cumulant_correction(idx, y, rank)
    return Tensor(t.shape, y, "y")


def reordered_cumulants(t: Tensor, order: Sequence[int]) -> Tensor:
    """x -> z with interval partitions taken in the factor order ``order``."""
    return central_to_cumulants(moments_to_central(t), order)


def to_system(t: Tensor, system: str) -> Tensor:
    """Move a tensor between the x, y and z charts."""
    if system not in SYSTEMS:
        raise ValueError(f"unknown coordinate system {system!r}")
    steps = {
        ("x", "y"): moments_to_central,
        ("y", "z"): central_to_cumulants,
        ("z", "y"): cumulants_to_central,
        ("y", "x"): central_to_moments,
    }
    path = {"x": 0, "y": 1, "z": 2}
    while t.system != system:
        here = t.system
        nxt = SYSTEMS[path[here] + (1 if path[system] > path[here] else -1)]
        t = steps[(here, nxt)](t)
    return t


def relabel_chart(t: Tensor, pivots: Sequence[int]) -> Tensor:
    """Swap basis vector 0 of factor ``j`` with basis vector ``pivots[j]``.

    Dividing the result by its new all-zero entry moves a tensor from another
    affine chart (some ``x_I != 0``) onto the standard one.
    """
    shape = t.shape
    pivots = shape.check_index(pivots)

    def swap(idx: MultiIndex) -> MultiIndex:
        out = []
        for i, p in zip(idx, pivots):
            out.append(p if i == 0 else 0 if i == p else i)
        return tuple(out)

    moved = {swap(idx): v for idx, v in t.items()}
    scale = moved[shape.zero]
    if scale == 0:
        raise ChartError("not in affine chart")
    return Tensor(shape, {idx: v / scale for idx, v in moved.items()}, t.system)


def variable_key(idx: Sequence[int]) -> tuple:
    """Sort key for cumulant variables.

    Smaller support first; equal-size supports compare by their sorted
    positions, which is the same as asking which of the two symmetric
    differences has the smaller minimum; equal supports fall back to the
    multi-index itself.
    """
    s = support(idx)
    return (len(s), s, tuple(idx))
