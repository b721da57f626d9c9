# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the integer hot loops (same API as _pykernels)."""

from libc.stdlib cimport malloc, free
from libc.string cimport memset

ctypedef long long i64


cdef i64* _alloc(Py_ssize_t n) except NULL:
    cdef i64* p = <i64*> malloc((n if n > 0 else 1) * sizeof(i64))
    if p == NULL:
        raise MemoryError()
    memset(p, 0, (n if n > 0 else 1) * sizeof(i64))
    return p


cdef class _Box:
    cdef Py_ssize_t n, m
    cdef i64* A
    cdef i64* b
    cdef i64* lo
    cdef i64* hi
    cdef i64* best
    cdef i64* partial
    cdef i64* x
    cdef list out

    def __dealloc__(self):
        free(self.A); free(self.b); free(self.lo); free(self.hi)
        free(self.best); free(self.partial); free(self.x)

    cdef void rec(self, Py_ssize_t k):
        cdef Py_ssize_t i, n = self.n, m = self.m
        cdef i64 v, a
        cdef bint ok
        if k == n:
            self.out.append(tuple([self.x[i] for i in range(n)]))
            return
        for v in range(self.lo[k], self.hi[k] + 1):
            ok = True
            for i in range(m):
                if self.partial[i] + self.A[i * n + k] * v + self.best[i * (n + 1) + k + 1] < self.b[i]:
                    ok = False
                    break
            if not ok:
                continue
            self.x[k] = v
            for i in range(m):
                self.partial[i] += self.A[i * n + k] * v
            self.rec(k + 1)
            for i in range(m):
                self.partial[i] -= self.A[i * n + k] * v


def box_points(A, b, lo, hi):
    cdef _Box box = _Box()
    cdef Py_ssize_t n = len(lo), m = len(A), i, k
    cdef i64 c
    box.n = n
    box.m = m
    box.A = _alloc(n * m)
    box.b = _alloc(m)
    box.lo = _alloc(n)
    box.hi = _alloc(n)
    box.best = _alloc(m * (n + 1))
    box.partial = _alloc(m)
    box.x = _alloc(n)
    box.out = []
    for i in range(m):
        box.b[i] = b[i]
        for k in range(n):
            box.A[i * n + k] = A[i][k]
    for k in range(n):
        box.lo[k] = lo[k]
        box.hi[k] = hi[k]
    for i in range(m):
        box.best[i * (n + 1) + n] = 0
        for k in range(n - 1, -1, -1):
            c = box.A[i * n + k]
            box.best[i * (n + 1) + k] = box.best[i * (n + 1) + k + 1] + (c * box.hi[k] if c > 0 else c * box.lo[k])
    box.rec(0)
    return box.out


cdef class _Dilation:
    cdef Py_ssize_t n, d, width
    cdef bint canonical
    cdef i64* dims
    cdef i64* offsets      # start of each factor block in the flat point
    cdef i64* point
    cdef i64* sums
    cdef object found

    def __dealloc__(self):
        free(self.dims); free(self.offsets); free(self.point); free(self.sums)

    cdef bint decomposes(self, Py_ssize_t i, i64 chosen, i64 total):
        cdef Py_ssize_t j
        if i == self.n:
            return chosen >= 2 and total - chosen >= 2 * (self.d - 1)
        if self.sums[i] < self.d:
            if self.decomposes(i + 1, chosen, total):
                return True
        for j in range(self.dims[i]):
            if self.point[self.offsets[i] + j] > 0:
                if self.decomposes(i + 1, chosen + 1, total):
                    return True
        return False

    cdef bint fill_factor(self, Py_ssize_t f, Py_ssize_t j, i64 remaining, i64 cap, i64 total):
        # enumerate coordinates of factor f, then recurse into factor f + 1
        cdef i64 v, top
        cdef Py_ssize_t k = self.dims[f]
        if j == k:
            self.sums[f] = self.d - remaining
            if f > 0 and self.canonical and self.dims[f] == self.dims[f - 1]:
                if self.block_cmp(f) > 0:
                    return False
            return self.next_factor(f + 1, total + self.sums[f])
        top = remaining
        if self.canonical and cap < top:
            top = cap
        v = top
        while v >= 0:
            self.point[self.offsets[f] + j] = v
            if self.fill_factor(f, j + 1, remaining - v, v, total):
                return True
            v -= 1
        self.point[self.offsets[f] + j] = 0
        return False

    cdef int block_cmp(self, Py_ssize_t f):
        # enumeration order is lexicographically decreasing; canonical forms
        # keep equal-size factors in that same order
        cdef Py_ssize_t j, k = self.dims[f]
        cdef i64 a, b
        for j in range(k):
            a = self.point[self.offsets[f - 1] + j]
            b = self.point[self.offsets[f] + j]
            if a != b:
                return 1 if b > a else -1
        return 0

    cdef bint next_factor(self, Py_ssize_t f, i64 total):
        cdef Py_ssize_t i
        if f == self.n:
            if total < 2 * self.d:
                return False
            if not self.decomposes(0, 0, total):
                self.found = tuple([self.point[i] for i in range(self.width)])
                return True
            return False
        return self.fill_factor(f, 0, self.d, self.d, total)


def first_undecomposable(dims, d, canonical):
    if d < 2:
        return None
    cdef _Dilation st = _Dilation()
    cdef Py_ssize_t n = len(dims), i, off = 0
    st.n = n
    st.d = d
    st.canonical = bool(canonical)
    st.dims = _alloc(n)
    st.offsets = _alloc(n)
    st.sums = _alloc(n)
    for i in range(n):
        st.dims[i] = dims[i]
        st.offsets[i] = off
        off += dims[i]
    st.width = off
    st.point = _alloc(off)
    st.found = None
    st.next_factor(0, 0)
    return st.found


def min_inversions(blocks):
    cdef Py_ssize_t d = len(blocks), n, j, jj, p, q
    cdef i64 const = 0, cost, base
    cdef Py_ssize_t mask, full, nm
    if d == 0:
        return 0
    if d > 24:
        raise ValueError("degree too large for the subset DP")
    n = len(blocks[0])
    cdef i64* vals = _alloc(d * n)
    cdef i64* w = _alloc(d * d)
    cdef i64* dp = NULL
    try:
        for p in range(d):
            for j in range(n):
                vals[p * n + j] = blocks[p][j]
        for j in range(n):
            for jj in range(j + 1, n):
                for p in range(d):
                    for q in range(d):
                        if vals[p * n + j] > vals[q * n + jj]:
                            const += 1
        for p in range(d):
            for q in range(d):
                if p != q:
                    for j in range(n):
                        if vals[p * n + j] > vals[q * n + j]:
                            w[p * d + q] += 1
        full = (1 << d) - 1
        dp = _alloc(full + 1)
        for mask in range(1, full + 1):
            dp[mask] = -1
        for mask in range(full + 1):
            base = dp[mask]
            if base < 0:
                continue
            for q in range(d):
                if (mask >> q) & 1:
                    continue
                cost = base
                for p in range(d):
                    if (mask >> p) & 1:
                        cost += w[p * d + q]
                nm = mask | (1 << q)
                if dp[nm] < 0 or cost < dp[nm]:
                    dp[nm] = cost
        return const + dp[full]
    finally:
        free(vals)
        free(w)
        free(dp)
