"""Binomial generators of the toric ideals of the secant and their reduction.

Variables are multi-indices (tuples). For the binary point sets ``J_{a,b}``
a variable is the 0/1 indicator of a subset of the factors. A monomial is a
tuple of variables sorted by the variable order, with repeats for powers.
"""

from __future__ import annotations

import random
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cmp_to_key
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Callable, Iterable, Mapping, Sequence

from . import _kernels
from .polytopes import embed_index, general_indices
from .tensor import Shape, support, support_size, variable_key

Variable = tuple[int, ...]
Monomial = tuple[Variable, ...]


def _as_shape(shape) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(shape)


def monomial(variables: Iterable[Sequence[int]]) -> Monomial:
    return tuple(sorted((tuple(v) for v in variables), key=variable_key))


def divides(small: Monomial, big: Monomial) -> bool:
    counts: dict[Variable, int] = defaultdict(int)
    for v in big:
        counts[v] += 1
    for v in small:
        counts[v] -= 1
        if counts[v] < 0:
            return False
    return True


def replace(m: Monomial, old: Monomial, new: Monomial) -> Monomial:
    """``m / old * new`` (``old`` must divide ``m``)."""
    rest = list(m)
    for v in old:
        rest.remove(v)
    return monomial(rest + list(new))


def is_square_free(m: Monomial) -> bool:
    return len(set(m)) == len(m)


# Variable and term order ------------------------------------------------------


def compare_variables(i: Sequence[int], j: Sequence[int]) -> int:
    """-1, 0 or 1 as ``z_i`` is smaller than, equal to or larger than ``z_j``."""
    ki, kj = variable_key(i), variable_key(j)
    return (ki > kj) - (ki < kj)


@dataclass(frozen=True)
class VariableOrder:
    """The cumulant variables of a shape, smallest first."""

    shape: Shape
    variables: tuple[Variable, ...]

    def __call__(self, i: Sequence[int], j: Sequence[int]) -> int:
        return compare_variables(i, j)

    def position(self, v: Sequence[int]) -> int:
        return self.variables.index(tuple(v))


def variable_order(shape) -> VariableOrder:
    shape = _as_shape(shape)
    return VariableOrder(shape, tuple(general_indices(shape)))


def compare_degrevlex(m1: Monomial, m2: Monomial) -> int:
    """Degree first; then the smallest variable with different exponents decides,
    the monomial with the smaller exponent there being the larger one."""
    if len(m1) != len(m2):
        return (len(m1) > len(m2)) - (len(m1) < len(m2))
    c1: dict[Variable, int] = defaultdict(int)
    c2: dict[Variable, int] = defaultdict(int)
    for v in m1:
        c1[v] += 1
    for v in m2:
        c2[v] += 1
    for v in sorted(set(c1) | set(c2), key=variable_key):
        if c1[v] != c2[v]:
            return 1 if c1[v] < c2[v] else -1
    return 0


degrevlex_key = cmp_to_key(compare_degrevlex)


# Binomials ----------------------------------------------------------------------


@dataclass(frozen=True)
class Binomial:
    """``lhs - rhs``; when ``marked`` the left side is the leading term."""

    lhs: Monomial
    rhs: Monomial
    marked: bool = True
    family: str = ""

    def degree(self) -> int:
        return len(self.lhs)

    def key(self) -> tuple:
        """Structural key that ignores orientation."""
        a, b = sorted((self.lhs, self.rhs), key=lambda m: [variable_key(v) for v in m])
        return (a, b)

    def lattice_degrees(self, point: Callable[[Variable], Sequence[int]]):
        return lattice_degree(self.lhs, point), lattice_degree(self.rhs, point)

    def to_dict(self) -> dict:
        return {
            "lhs": [list(v) for v in self.lhs],
            "rhs": [list(v) for v in self.rhs],
            "marked": self.marked,
            "family": self.family,
        }


def lattice_degree(m: Monomial, point: Callable[[Variable], Sequence[int]]) -> tuple[int, ...]:
    total: list[int] | None = None
    for v in m:
        p = point(v)
        total = list(p) if total is None else [a + b for a, b in zip(total, p)]
    return tuple(total or ())


def binary_point(v: Sequence[int]) -> tuple[int, ...]:
    """Lattice point ``(1, v)`` of a 0/1 variable."""
    return (1, *v)


def _binomial(lhs: Iterable, rhs: Iterable, family: str, order_by_term: bool) -> Binomial | None:
    left, right = monomial(lhs), monomial(rhs)
    if left == right:
        return None
    if order_by_term and compare_degrevlex(left, right) < 0:
        left, right = right, left
    return Binomial(left, right, True, family)


def _dedupe(binomials: Iterable[Binomial | None]) -> list[Binomial]:
    seen = {}
    for b in binomials:
        if b is not None and b.key() not in seen:
            seen[b.key()] = b
    return sorted(seen.values(), key=lambda b: (degrevlex_key(b.lhs), degrevlex_key(b.rhs)))


# Bumping and swapping on J_{a,b} --------------------------------------------------


def _bits(n: int, s: Iterable[int]) -> Variable:
    s = set(s)
    return tuple(1 if j in s else 0 for j in range(n))


def _subsets_between(n: int, lo: int, hi: int) -> list[frozenset]:
    out = []
    for size in range(max(lo, 0), min(hi, n) + 1):
        out.extend(frozenset(c) for c in combinations(range(n), size))
    return out


def bumping_relations(n: int, a: int, b: int) -> list[Binomial]:
    """``z_{I+i} z_J = z_I z_{J+i}`` with ``a <= |I|, |J| <= b-1`` and ``i`` outside both."""
    out = []
    sets = _subsets_between(n, a, b - 1)
    for s, t in product(sets, repeat=2):
        for i in range(n):
            if i in s or i in t:
                continue
            out.append(_binomial([_bits(n, s | {i}), _bits(n, t)], [_bits(n, s), _bits(n, t | {i})], "bumping", True))
    return _dedupe(out)


def swapping_relations(n: int, a: int, b: int) -> list[Binomial]:
    """``z_{I+i} z_{J+j} = z_{I+j} z_{J+i}`` with ``a-1 <= |I|, |J| <= b-1``."""
    out = []
    sets = _subsets_between(n, a - 1, b - 1)
    for s, t in product(sets, repeat=2):
        free = [x for x in range(n) if x not in s and x not in t]
        for i, j in permutations(free, 2):
            out.append(
                _binomial(
                    [_bits(n, s | {i}), _bits(n, t | {j})],
                    [_bits(n, s | {j}), _bits(n, t | {i})],
                    "swapping",
                    True,
                )
            )
    return _dedupe(out)


def two_set_swaps(n: int) -> list[Binomial]:
    """Per 4-set ``i<j<k<l``: ``z_ij z_kl -> z_ik z_jl`` and ``z_il z_jk -> z_ik z_jl``."""
    out = []
    for i, j, k, l in combinations(range(n), 4):
        target = [_bits(n, {i, k}), _bits(n, {j, l})]
        out.append(Binomial(monomial([_bits(n, {i, j}), _bits(n, {k, l})]), monomial(target), True, "swap2"))
        out.append(Binomial(monomial([_bits(n, {i, l}), _bits(n, {j, k})]), monomial(target), True, "swap2"))
    return out


def bumping_swapping_generators(n: int, a: int, b: int, family: str = "both") -> list[Binomial]:
    """Quadratic generators of the ideal of ``T_{a,b}``.

    ``family`` is ``bumping``, ``swapping``, ``both``, or ``reduced`` (all
    bumpings with sets of size at least 2, plus two 2-set swaps per 4-set).
    """
    if not 0 <= a <= b <= n:
        raise ValueError(f"need 0 <= a <= b <= n, got a={a}, b={b}, n={n}")
    if family == "bumping":
        return bumping_relations(n, a, b)
    if family == "swapping":
        return swapping_relations(n, a, b)
    if family == "both":
        return _dedupe(bumping_relations(n, a, b) + swapping_relations(n, a, b))
    if family == "reduced":
        return bumping_relations(n, max(a, 2), b) + two_set_swaps(n)
    raise ValueError(f"unknown family {family!r}")


def jab_point_map(n: int, a: int, b: int) -> dict[Variable, tuple[int, ...]]:
    """Variables of ``T_{a,b}`` with their lattice points."""
    return {v: binary_point(v) for v in sorted(product((0, 1), repeat=n), key=variable_key) if a <= sum(v) <= b}


# Flattening quadrics --------------------------------------------------------------


def restricted_flattening(n: int, a: int, b: int, left: Sequence[int]):
    """Rows, columns and entries (variable or None) of the restricted flattening."""
    left = tuple(sorted(set(left)))
    right = tuple(j for j in range(n) if j not in left)
    if not left or not right:
        raise ValueError("both sides of the partition must be nonempty")
    rows = [frozenset(c) for size in range(1, len(left) + 1) for c in combinations(left, size)]
    cols = [frozenset(c) for size in range(1, len(right) + 1) for c in combinations(right, size)]
    entries = [[_bits(n, r | c) if a <= len(r | c) <= b else None for c in cols] for r in rows]
    return rows, cols, entries


def flattening_quadrics(n: int, a: int, b: int, left: Sequence[int]) -> list[Binomial]:
    """2x2 minors of the restricted flattening that avoid its zero entries."""
    _, _, m = restricted_flattening(n, a, b, left)
    out = []
    for r1, r2 in combinations(range(len(m)), 2):
        for c1, c2 in combinations(range(len(m[0])), 2):
            quad = (m[r1][c1], m[r2][c2], m[r1][c2], m[r2][c1])
            if any(v is None for v in quad):
                continue
            out.append(_binomial(quad[:2], quad[2:], "flatquad", True))
    return _dedupe(out)


# Five Groebner families ------------------------------------------------------------


def _put(v: Variable, updates: Mapping[int, int]) -> Variable:
    out = list(v)
    for pos, value in updates.items():
        out[pos] = value
    return tuple(out)


def gb_families(shape, families: Iterable[int] = (1, 2, 3, 4, 5)) -> list[Binomial]:
    """All instances of the five binomial families, leading terms by degrevlex."""
    shape = _as_shape(shape)
    n = shape.n
    variables = general_indices(shape)
    wanted = set(families)
    out: list[Binomial | None] = []

    if 1 in wanted:
        for I in variables:
            if support_size(I) < 3:
                continue
            for a in support(I):
                for J in variables:
                    if J[a] == 0:
                        out.append(_binomial([I, J], [_put(I, {a: 0}), _put(J, {a: I[a]})], "bumping", True))
    if 2 in wanted:
        for I, J in combinations(variables, 2):
            for a in range(n):
                if I[a] and J[a] and I[a] != J[a]:
                    out.append(_binomial([I, J], [_put(I, {a: J[a]}), _put(J, {a: I[a]})], "pseudoswap", True))
    if 3 in wanted:
        for I in variables:
            for J in variables:
                for a, b in permutations(range(n), 2):
                    if I[a] == 0 and I[b] and J[a] and J[b] == 0:
                        out.append(
                            _binomial([I, J], [_put(I, {a: J[a], b: 0}), _put(J, {a: 0, b: I[b]})], "swap", True)
                        )
    pairs = [I for I in variables if support_size(I) == 2]
    # the cubic families are only needed when z_I is the smallest variable of
    # the leading monomial and the gained position a comes before the lost
    # position b; the other instances can have square leading terms
    if 4 in wanted:
        for I in pairs:
            for a, b in combinations(range(n), 2):
                if I[a] != 0 or I[b] == 0:
                    continue
                for J in variables:
                    if J[b] != 0:
                        continue
                    if variable_key(J) < variable_key(I):
                        continue
                    for L in variables:
                        if support_size(L) < 3 or L[a] == 0 or L[b] == 0:
                            continue
                        if variable_key(L) < variable_key(I):
                            continue
                        out.append(
                            _binomial(
                                [I, J, L],
                                [_put(I, {a: L[a], b: 0}), _put(J, {b: I[b]}), _put(L, {a: 0})],
                                "cubic",
                                True,
                            )
                        )
    if 5 in wanted:
        for I in pairs:
            for a, b in combinations(range(n), 2):
                if I[a] != 0 or I[b] == 0:
                    continue
                for r in range(n):
                    if r in (a, b):
                        continue
                    for L in pairs:
                        if L[a] == 0 or L[r] != 0 or variable_key(L) < variable_key(I):
                            continue
                        for J in variables:
                            if J[r] == 0 or J[b] != 0 or variable_key(J) < variable_key(I):
                                continue
                            out.append(
                                _binomial(
                                    [I, J, L],
                                    [
                                        _put(I, {a: L[a], b: 0}),
                                        _put(J, {r: 0, b: I[b]}),
                                        _put(L, {a: 0, r: J[r]}),
                                    ],
                                    "cubic-cycle",
                                    True,
                                )
                            )
    return _dedupe(out)


# Sorted pairs and basis binomials ---------------------------------------------------

Pair = tuple[int, int]


def admissible_multiset(v: Sequence[int]) -> tuple[Pair, ...]:
    """Pairs ``(factor, value)`` of the nonzero entries, padded to length n
    with the sentinel ``(n, 0)``, which sorts after every real pair."""
    n = len(v)
    pairs = [(j, i) for j, i in enumerate(v) if i]
    return tuple(pairs + [(n, 0)] * (n - len(pairs)))


def from_multiset(pairs: Sequence[Pair], n: int) -> Variable:
    out = [0] * n
    for j, i in pairs:
        if j < n:
            if out[j]:
                raise ValueError("multiset uses a factor twice")
            out[j] = i
    return tuple(out)


def is_sorted_pair(c: Sequence[Pair], d: Sequence[Pair]) -> bool:
    seq = [x for pair in zip(c, d) for x in pair]
    return all(x <= y for x, y in zip(seq, seq[1:]))


def sorted_pair(a: Sequence[Pair], b: Sequence[Pair]) -> tuple[tuple[Pair, ...], tuple[Pair, ...]]:
    """Sort the union and deal it out alternately into ``(C, D)``."""
    if len(a) != len(b):
        raise ValueError("multisets must have the same size")
    s = sorted(list(a) + list(b))
    return tuple(s[0::2]), tuple(s[1::2])


def sorted_pair_variables(u: Variable, v: Variable) -> tuple[Variable, Variable]:
    n = len(u)
    c, d = sorted_pair(admissible_multiset(u), admissible_multiset(v))
    return from_multiset(c, n), from_multiset(d, n)


def basis_binomials(shape) -> list[Binomial]:
    """``z_A z_B - z_C z_D`` for every pair with neither ``(A,B)`` nor ``(B,A)`` sorted."""
    shape = _as_shape(shape)
    variables = general_indices(shape)
    out = []
    for u, v in combinations(variables, 2):
        mu, mv = admissible_multiset(u), admissible_multiset(v)
        if is_sorted_pair(mu, mv) or is_sorted_pair(mv, mu):
            continue
        c, d = sorted_pair_variables(u, v)
        out.append(Binomial(monomial([u, v]), monomial([c, d]), True, "sorted"))
    return out


def _pair_codes(n: int, m: Monomial) -> list[list[int]]:
    width = max((max(v) for v in m), default=0) + 1
    blocks = []
    for v in m:
        blocks.append([j * width + i for j, i in admissible_multiset(v)])
    return blocks


def inversion_measure(m: Monomial) -> int:
    """Fewest inversions over all ways of interleaving the sorted multisets of ``m``."""
    if not m:
        return 0
    return _kernels.min_inversions(_pair_codes(len(m[0]), m))


def inversion_measure_exhaustive(m: Monomial) -> int:
    """Same quantity by trying every ordering of the factors (small degrees only)."""
    if not m:
        return 0
    blocks = _pair_codes(len(m[0]), m)
    best = None
    for sigma in permutations(range(len(blocks))):
        seq = [blocks[p][j] for j in range(len(blocks[0])) for p in sigma]
        inv = sum(1 for x, y in combinations(seq, 2) if x > y)
        best = inv if best is None else min(best, inv)
    return best


# Marked reduction ---------------------------------------------------------------------


class NonNoetherianError(RuntimeError):
    pass


class Reducer:
    """Rewrites monomials with marked binomials until no leading term divides."""

    def __init__(self, basis: Sequence[Binomial]):
        self.basis = list(basis)
        self._by_first: dict[Variable, list[Binomial]] = defaultdict(list)
        for b in self.basis:
            if not b.marked:
                raise ValueError("reduction needs marked binomials")
            self._by_first[b.lhs[0]].append(b)
        for rules in self._by_first.values():
            rules.sort(key=lambda b: [variable_key(v) for v in b.lhs])

    def applicable(self, m: Monomial) -> list[Binomial]:
        out = []
        for v in dict.fromkeys(m):
            for rule in self._by_first.get(v, ()):
                if divides(rule.lhs, m):
                    out.append(rule)
        return out

    def step(self, m: Monomial, rng: random.Random | None = None) -> tuple[Monomial, Binomial] | None:
        if rng is None:
            # leftmost-lowest: rules are grouped by their smallest variable
            for v in dict.fromkeys(m):
                for rule in self._by_first.get(v, ()):
                    if divides(rule.lhs, m):
                        return replace(m, rule.lhs, rule.rhs), rule
            return None
        options = self.applicable(m)
        if not options:
            return None
        rule = rng.choice(options)
        return replace(m, rule.lhs, rule.rhs), rule

    def normal_form(
        self,
        m: Monomial,
        rng: random.Random | None = None,
        on_step: Callable[[Monomial, Monomial, Binomial], None] | None = None,
        max_steps: int = 100_000,
    ) -> Monomial:
        m = monomial(m)
        seen = {m}
        for _ in range(max_steps):
            nxt = self.step(m, rng)
            if nxt is None:
                return m
            new, rule = nxt
            if on_step is not None:
                on_step(m, new, rule)
            if new in seen:
                raise NonNoetherianError("non-noetherian marking")
            seen.add(new)
            m = new
        raise NonNoetherianError("non-noetherian marking")


def reduce(m: Iterable[Sequence[int]], basis: Sequence[Binomial], **kwargs) -> Monomial:
    return Reducer(basis).normal_form(monomial(m), **kwargs)


# Fibers and the connectivity oracle ----------------------------------------------------


class FiberTooLarge(RuntimeError):
    pass


def fibers(points: Mapping[Variable, Sequence[int]], degree: int) -> dict[tuple[int, ...], list[Monomial]]:
    """Degree-``degree`` monomials grouped by lattice degree."""
    variables = sorted(points, key=variable_key)
    out: dict[tuple[int, ...], list[Monomial]] = defaultdict(list)
    for combo in combinations_with_replacement(variables, degree):
        out[lattice_degree(combo, points.__getitem__)].append(combo)
    return dict(out)


def gb_point_map(shape) -> dict[Variable, tuple[int, ...]]:
    shape = _as_shape(shape)
    return {v: embed_index(shape, v) for v in general_indices(shape)}


@dataclass(frozen=True)
class OracleResult:
    connected: bool
    degree: int | None = None
    witness: tuple[Monomial, Monomial] | None = None
    fibers_checked: int = 0

    def __bool__(self) -> bool:
        return self.connected

    def to_dict(self) -> dict:
        out = {"connected": self.connected, "fibersChecked": self.fibers_checked}
        if self.witness is not None:
            out["degree"] = self.degree
            out["witness"] = [[list(v) for v in m] for m in self.witness]
        return out


def fiber_connectivity_oracle(
    points: Mapping[Variable, Sequence[int]],
    moves: Sequence[Binomial],
    max_degree: int,
    cap: int = 1_000_000,
) -> OracleResult:
    """Are all fibers of degree ``<= max_degree`` connected by the moves?

    Two monomials are adjacent when one becomes the other by replacing one
    side of a move with the other side. On failure the witness is a pair of
    monomials from one fiber that no chain of moves joins.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be positive")
    points = {tuple(v): tuple(p) for v, p in points.items()}
    for mv in moves:
        for v in mv.lhs + mv.rhs:
            if v not in points:
                raise ValueError(f"move uses unknown variable {v}")
    steps = [(mv.lhs, mv.rhs) for mv in moves] + [(mv.rhs, mv.lhs) for mv in moves]
    by_first: dict[Variable, list[tuple[Monomial, Monomial]]] = defaultdict(list)
    for old, new in steps:
        by_first[old[0]].append((old, new))
    checked = 0
    for d in range(1, max_degree + 1):
        for fiber in fibers(points, d).values():
            checked += 1
            if len(fiber) > cap:
                raise FiberTooLarge("fiber too large")
            if len(fiber) == 1:
                continue
            start = fiber[0]
            seen = {start}
            queue = deque([start])
            while queue:
                m = queue.popleft()
                for v in dict.fromkeys(m):
                    for old, new in by_first.get(v, ()):
                        if divides(old, m):
                            nxt = replace(m, old, new)
                            if nxt not in seen:
                                seen.add(nxt)
                                queue.append(nxt)
            if len(seen) != len(fiber):
                other = next(m for m in fiber if m not in seen)
                return OracleResult(False, d, (start, other), checked)
    return OracleResult(True, None, None, checked)
