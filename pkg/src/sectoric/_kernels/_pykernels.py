"""Pure-Python versions of the integer hot loops.

Each function here has a twin with the same signature in ``_ckernels.pyx``.
"""

from __future__ import annotations


def box_points(A, b, lo, hi):
    """Integer points ``x`` with ``lo <= x <= hi`` and ``A x >= b`` (row-wise).

    Depth-first over coordinates, pruning a branch as soon as some row can no
    longer reach its bound with the best values of the unassigned coordinates.
    """
    n = len(lo)
    m = len(A)
    # best[i][k]: max contribution of coordinates k.. to row i
    best = []
    for row in A:
        suffix = [0] * (n + 1)
        for k in range(n - 1, -1, -1):
            c = row[k]
            suffix[k] = suffix[k + 1] + (c * hi[k] if c > 0 else c * lo[k])
        best.append(suffix)
    out = []
    x = [0] * n
    partial = [0] * m

    def rec(k):
        if k == n:
            out.append(tuple(x))
            return
        for v in range(lo[k], hi[k] + 1):
            ok = True
            for i in range(m):
                if partial[i] + A[i][k] * v + best[i][k + 1] < b[i]:
                    ok = False
                    break
            if not ok:
                continue
            x[k] = v
            for i in range(m):
                partial[i] += A[i][k] * v
            rec(k + 1)
            for i in range(m):
                partial[i] -= A[i][k] * v

    rec(0)
    return out


def _factor_vectors(k, d, canonical):
    """Nonnegative integer vectors of length k with entry sum <= d."""
    out = []
    vec = [0] * k

    def rec(j, remaining, cap):
        if j == k:
            out.append(tuple(vec))
            return
        top = min(remaining, cap) if canonical else remaining
        for v in range(top, -1, -1):
            vec[j] = v
            rec(j + 1, remaining - v, v)
        vec[j] = 0

    rec(0, d, d)
    return out


def _decomposes(blocks, sums, d):
    """Is ``blocks`` (a point of dQ) equal to q + r with q in Q, r in (d-1)Q?"""
    n = len(blocks)
    total = sum(sums)
    need_total = 2 * (d - 1)
    choice = [-1] * n

    def rec(i, chosen):
        if i == n:
            if chosen < 2:
                return False
            return total - chosen >= need_total
        s = sums[i]
        if s < d:
            choice[i] = -1
            if rec(i + 1, chosen):
                return True
        for j, v in enumerate(blocks[i]):
            if v > 0:
                choice[i] = j
                if rec(i + 1, chosen + 1):
                    return True
        choice[i] = -1
        return False

    return rec(0, 0)


def first_undecomposable(dims, d, canonical):
    """First lattice point of d*Q that is not (point of Q) + (point of (d-1)Q).

    ``Q`` is the projected secant polytope of the shape ``dims``. With
    ``canonical`` only one point per orbit of the coordinate/factor symmetry
    group is visited. Returns the flat point or None.
    """
    if d < 2:
        return None
    n = len(dims)
    per = [_factor_vectors(k, d, canonical) for k in dims]
    idx = [0] * n
    need = 2 * d

    def rec(i, total, prev_key):
        if i == n:
            if total < need:
                return None
            blocks = [per[f][idx[f]] for f in range(n)]
            sums = [sum(bl) for bl in blocks]
            if not _decomposes(blocks, sums, d):
                return tuple(v for bl in blocks for v in bl)
            return None
        options = per[i]
        start = 0
        if canonical and i > 0 and dims[i] == dims[i - 1]:
            start = idx[i - 1]
        for j in range(start, len(options)):
            idx[i] = j
            hit = rec(i + 1, total + sum(options[j]), None)
            if hit is not None:
                return hit
        return None

    return rec(0, 0, None)


def min_inversions(blocks):
    """Minimum over orderings of the inversion count of the interleaved sequence.

    ``blocks`` are d equal-length nondecreasing integer sequences. The
    interleaving for an ordering s reads round 0 of every block in order s,
    then round 1, and so on. Cross-round pairs contribute a constant; the
    within-round part is minimised exactly by a DP over subsets.
    """
    d = len(blocks)
    if d == 0:
        return 0
    n = len(blocks[0])
    const = 0
    for j in range(n):
        for jj in range(j + 1, n):
            for p in range(d):
                vp = blocks[p][j]
                for q in range(d):
                    if vp > blocks[q][jj]:
                        const += 1
    w = [[0] * d for _ in range(d)]
    for p in range(d):
        for q in range(d):
            if p != q:
                w[p][q] = sum(1 for j in range(n) if blocks[p][j] > blocks[q][j])
    full = (1 << d) - 1
    inf = float("inf")
    dp = [inf] * (full + 1)
    dp[0] = 0
    for mask in range(full + 1):
        base = dp[mask]
        if base == inf:
            continue
        for q in range(d):
            if mask >> q & 1:
                continue
            cost = base
            for p in range(d):
                if mask >> p & 1:
                    cost += w[p][q]
            nm = mask | (1 << q)
            if cost < dp[nm]:
                dp[nm] = cost
    return const + int(dp[full])
