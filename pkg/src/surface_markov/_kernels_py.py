"""Pure-Python reference implementations of the hot loops.

Words are packed into integers, 4 bits per letter with the first letter in
the most significant nibble, so numeric order of equal-length keys is
lexicographic order of the words.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

GEODESIC = 1
NOT_GEODESIC = 0
CLASS_OVERFLOW = 2


def power_iteration(indptr, indices, tol, max_iters):
    """Perron root of the 0/1 matrix in CSR form, iterating ``M + I``.

    Stops when the Collatz-Wielandt bracket ``min w_i / v_i <= rho <= max w_i / v_i``
    is narrower than ``tol``.  Returns ``(lambda, iterations, bracket width)``.
    """
    n = len(indptr) - 1
    ptr = [int(v) for v in indptr]
    col = [int(v) for v in indices]
    v = [1.0 / n] * n
    gap = math.inf
    est = math.inf
    for it in range(1, max_iters + 1):
        w = v[:]
        for i in range(n):
            acc = 0.0
            for t in range(ptr[i], ptr[i + 1]):
                acc += v[col[t]]
            w[i] += acc
        ratios = [a / b for a, b in zip(w, v)]
        lo, hi = min(ratios), max(ratios)
        est = math.fsum(w)
        gap = hi - lo
        v = [x / est for x in w]
        if gap < tol:
            return est - 1.0, it, gap
    return est - 1.0, max_iters, gap


class _Tables:
    def __init__(self, inverse, swap_len, swap_off, swap_win, swap_rep, dehn_len, dehn_off, dehn_key, max_class):
        self.inverse = [int(x) for x in inverse]
        self.swaps: dict[int, dict[int, list[int]]] = {}
        for t, k in enumerate(swap_len):
            d: dict[int, list[int]] = {}
            for i in range(int(swap_off[t]), int(swap_off[t + 1])):
                d.setdefault(int(swap_win[i]), []).append(int(swap_rep[i]))
            self.swaps[int(k)] = d
        self.dehn: dict[int, set[int]] = {}
        for t, l in enumerate(dehn_len):
            self.dehn[int(l)] = {int(dehn_key[i]) for i in range(int(dehn_off[t]), int(dehn_off[t + 1]))}
        self.max_class = int(max_class)


def _bad(w: int, L: int, T: _Tables) -> bool:
    prev = -1
    for i in range(L):
        x = (w >> (4 * (L - 1 - i))) & 15
        if prev >= 0 and T.inverse[prev] == x:
            return True
        prev = x
    for l, keys in T.dehn.items():
        if l > L:
            continue
        mask = (1 << (4 * l)) - 1
        for p in range(L - l + 1):
            if (w >> (4 * (L - l - p))) & mask in keys:
                return True
    return False


def classify(u: int, L: int, T: _Tables) -> tuple[int, int]:
    """(status, least key of the equal-length class) for the packed word ``u``."""
    cls = [u]
    seen = {u}
    i = 0
    while i < len(cls):
        w = cls[i]
        i += 1
        if _bad(w, L, T):
            return NOT_GEODESIC, 0
        for k, table in T.swaps.items():
            if k > L:
                continue
            mask = (1 << (4 * k)) - 1
            for p in range(L - k + 1):
                shift = 4 * (L - k - p)
                win = (w >> shift) & mask
                reps = table.get(win)
                if not reps:
                    continue
                base = w - (win << shift)
                for r in reps:
                    w2 = base | (r << shift)
                    if w2 not in seen:
                        if len(cls) >= T.max_class:
                            return CLASS_OVERFLOW, 0
                        seen.add(w2)
                        cls.append(w2)
    return GEODESIC, min(cls)


def next_sphere(sphere, m, inverse, swap_len, swap_off, swap_win, swap_rep, dehn_len, dehn_off, dehn_key, max_class):
    """Sorted canonical keys of the sphere of radius ``m + 1``.

    Returns ``(keys, status)`` with status ``CLASS_OVERFLOW`` if some
    equal-length class outgrew ``max_class``.
    """
    T = _Tables(inverse, swap_len, swap_off, swap_win, swap_rep, dehn_len, dehn_off, dehn_key, max_class)
    nl = len(T.inverse)
    out = set()
    for w in sphere:
        w = int(w)
        last = w & 15 if m > 0 else -1
        for s in range(nl):
            if m > 0 and T.inverse[last] == s:
                continue
            status, key = classify((w << 4) | s, m + 1, T)
            if status == CLASS_OVERFLOW:
                return np.zeros(0, dtype=np.uint64), CLASS_OVERFLOW
            if status == GEODESIC:
                out.add(key)
    return np.array(sorted(out), dtype=np.uint64), GEODESIC
