# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in ``_kernels_py``; same signatures and results."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

GEODESIC = 1
NOT_GEODESIC = 0
CLASS_OVERFLOW = 2


def power_iteration(const int64_t[::1] indptr, const int64_t[::1] indices, double tol, long max_iters):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef double[::1] v = np.full(n, 1.0 / n)
    cdef double[::1] w = np.empty(n)
    cdef double gap = INFINITY, est = INFINITY, acc, comp, y, t, r, lo, hi
    cdef Py_ssize_t i, k
    cdef long it
    for it in range(1, max_iters + 1):
        est = 0.0
        comp = 0.0
        lo = INFINITY
        hi = -INFINITY
        for i in range(n):
            acc = v[i]
            for k in range(indptr[i], indptr[i + 1]):
                acc += v[indices[k]]
            w[i] = acc
            r = acc / v[i]
            if r < lo:
                lo = r
            if r > hi:
                hi = r
            # compensated sum keeps the estimate stable near tol
            y = acc - comp
            t = est + y
            comp = (t - est) - y
            est = t
        for i in range(n):
            v[i] = w[i] / est
        gap = hi - lo
        if gap < tol:
            return est - 1.0, it, gap
    return est - 1.0, max_iters, gap


cdef struct Tables:
    int nl
    int inverse[16]
    int n_swap
    int64_t *swap_len
    int64_t *swap_off
    uint64_t *swap_win
    uint64_t *swap_rep
    int n_dehn
    int64_t *dehn_len
    int64_t *dehn_off
    uint64_t *dehn_key
    int max_class


cdef inline Py_ssize_t lower_bound(uint64_t *a, Py_ssize_t lo, Py_ssize_t hi, uint64_t x) nogil:
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline uint64_t nmask(int k) nogil:
    if k >= 16:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return (<uint64_t>1 << (4 * k)) - 1


cdef bint is_bad(uint64_t w, int L, Tables *T) nogil:
    cdef int i, p, t, l
    cdef int prev = -1, x
    cdef uint64_t mask, win
    cdef Py_ssize_t lo, hi, j
    for i in range(L):
        x = <int>((w >> (4 * (L - 1 - i))) & 15)
        if prev >= 0 and T.inverse[prev] == x:
            return True
        prev = x
    for t in range(T.n_dehn):
        l = <int>T.dehn_len[t]
        if l > L:
            continue
        mask = nmask(l)
        lo, hi = T.dehn_off[t], T.dehn_off[t + 1]
        for p in range(L - l + 1):
            win = (w >> (4 * (L - l - p))) & mask
            j = lower_bound(T.dehn_key, lo, hi, win)
            if j < hi and T.dehn_key[j] == win:
                return True
    return False


cdef int classify(uint64_t u, int L, Tables *T, uint64_t *cls, uint64_t *best) nogil:
    cdef int size = 1, i = 0, t, k, p, q
    cdef uint64_t w, mask, win, base, w2
    cdef Py_ssize_t lo, hi, j
    cdef int shift
    cdef bint found
    cls[0] = u
    while i < size:
        w = cls[i]
        i += 1
        if is_bad(w, L, T):
            return 0
        for t in range(T.n_swap):
            k = <int>T.swap_len[t]
            if k > L:
                continue
            mask = nmask(k)
            lo, hi = T.swap_off[t], T.swap_off[t + 1]
            for p in range(L - k + 1):
                shift = 4 * (L - k - p)
                win = (w >> shift) & mask
                j = lower_bound(T.swap_win, lo, hi, win)
                base = w - (win << shift)
                while j < hi and T.swap_win[j] == win:
                    w2 = base | (T.swap_rep[j] << shift)
                    found = False
                    for q in range(size):
                        if cls[q] == w2:
                            found = True
                            break
                    if not found:
                        if size >= T.max_class:
                            return 2
                        cls[size] = w2
                        size += 1
                    j += 1
    best[0] = cls[0]
    for q in range(1, size):
        if cls[q] < best[0]:
            best[0] = cls[q]
    return 1


def next_sphere(sphere, int m, inverse, swap_len, swap_off, swap_win, swap_rep,
                dehn_len, dehn_off, dehn_key, int max_class):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] sph = np.ascontiguousarray(sphere, dtype=np.uint64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sl = np.ascontiguousarray(swap_len, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] so = np.ascontiguousarray(swap_off, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] sw = np.ascontiguousarray(swap_win, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] sr = np.ascontiguousarray(swap_rep, dtype=np.uint64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dl = np.ascontiguousarray(dehn_len, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] do = np.ascontiguousarray(dehn_off, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] dk = np.ascontiguousarray(dehn_key, dtype=np.uint64)
    cdef Tables T
    cdef int s, status = 1, nl = len(inverse)
    cdef Py_ssize_t i, n = sph.shape[0], count = 0
    cdef uint64_t w, best = 0
    cdef int last
    if nl > 16:
        raise ValueError("packed words hold at most 16 letters")
    T.nl = nl
    for s in range(nl):
        T.inverse[s] = int(inverse[s])
    T.n_swap = sl.shape[0]
    T.swap_len = <int64_t *>sl.data
    T.swap_off = <int64_t *>so.data
    T.swap_win = <uint64_t *>sw.data
    T.swap_rep = <uint64_t *>sr.data
    T.n_dehn = dl.shape[0]
    T.dehn_len = <int64_t *>dl.data
    T.dehn_off = <int64_t *>do.data
    T.dehn_key = <uint64_t *>dk.data
    T.max_class = max_class
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(max(n * nl, 1), dtype=np.uint64)
    cdef uint64_t *cls = <uint64_t *>malloc(max_class * sizeof(uint64_t))
    if cls == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                w = sph[i]
                last = <int>(w & 15) if m > 0 else -1
                for s in range(nl):
                    if m > 0 and T.inverse[last] == s:
                        continue
                    status = classify((w << 4) | <uint64_t>s, m + 1, &T, cls, &best)
                    if status == 2:
                        break
                    if status == 1:
                        out[count] = best
                        count += 1
                if status == 2:
                    break
    finally:
        free(cls)
    if status == 2:
        return np.zeros(0, dtype=np.uint64), CLASS_OVERFLOW
    return np.unique(out[:count]), GEODESIC
