"""Growth oracle: spheres of the Cayley graph enumerated by shortlex geodesics.

Independent of the circle map.  It relies on small cancellation: Dehn's
algorithm decides the word problem, and equal-length geodesics for the same
element are connected by half-relator swaps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .bigons import minimal_bigon
from .presentation import GeometricPresentation, Word, free_reduce, inv, inverse_word


class Unsupported(Exception):
    """The presentation fails the small cancellation precondition of the oracle."""


class CapExceeded(Exception):
    pass


class ClassOverflow(Exception):
    """An equal-length rewrite class outgrew its cap (integrity failure)."""


def symmetrized(words: Sequence[Word]) -> list[tuple[int, Word]]:
    """All rotations of every relator and of its inverse, tagged by relator index."""
    out = []
    for r, w in enumerate(words):
        for v in (tuple(w), inverse_word(w)):
            for k in range(len(v)):
                out.append((r, v[k:] + v[:k]))
    return out


@dataclass(frozen=True)
class SmallCancellation:
    max_piece: int
    min_length: int
    verdict: bool


def check_small_cancellation(G: GeometricPresentation) -> SmallCancellation:
    """Longest piece between distinct relator occurrences, and the C'(1/6) verdict."""
    sym = symmetrized(G.relations)
    # distinct cyclic words can coincide as strings when a relator is a proper power
    uniq = sorted(set(v for _, v in sym))
    best = 0
    for i in range(len(uniq)):
        for j in range(i + 1, len(uniq)):
            a, b = uniq[i], uniq[j]
            k = 0
            while k < min(len(a), len(b)) and a[k] == b[k]:
                k += 1
            best = max(best, k)
    if len(uniq) < len(sym):
        best = max(best, max(len(w) for w in G.relations))
    lo = min(len(w) for w in G.relations)
    return SmallCancellation(best, lo, 6 * best < lo)


def derived_relators(G: GeometricPresentation) -> list[Word]:
    """Relators whose rotation halves give equal-length swaps.

    Even relators, plus the boundary of every minimal bigon closed by two odd
    cells.  Chains through even cells are not spliced.
    """
    out = [tuple(w) for w in G.relations if len(w) % 2 == 0]
    for c in range(G.num_letters):
        b = minimal_bigon(G, c)
        if len(b.faces) == 2 and all(len(G.relations[r]) % 2 for r, _ in b.faces):
            out.append(b.right_path + inverse_word(b.left_path))
    return out


@dataclass(frozen=True)
class RewriteSystem:
    """``swaps[k]``: half words of length k -> equal elements of the same length;
    ``dehn[l]``: subwords of length l longer than half a relator -> shorter equal words."""

    n_letters: int
    swaps: dict[int, dict[Word, tuple[Word, ...]]]
    dehn: dict[int, dict[Word, Word]]


@lru_cache(maxsize=None)
def rewrite_system(G: GeometricPresentation) -> RewriteSystem:
    swaps: dict[int, dict[Word, set[Word]]] = {}
    for _, v in symmetrized(derived_relators(G)):
        k = len(v) // 2
        p, q = v[:k], v[k:]
        if p != inverse_word(q):
            swaps.setdefault(k, {}).setdefault(p, set()).add(inverse_word(q))
    dehn: dict[int, dict[Word, Word]] = {}
    for _, v in symmetrized(G.relations):
        L = len(v)
        for l in range(L // 2 + 1, L + 1):
            dehn.setdefault(l, {})[v[:l]] = inverse_word(v[l:])
    return RewriteSystem(
        G.num_letters,
        {k: {p: tuple(sorted(s)) for p, s in d.items()} for k, d in swaps.items()},
        dehn,
    )


def dehn_reduce(G: GeometricPresentation, w: Sequence[int]) -> Word:
    """Free reduction plus repeated replacement of more-than-half relator subwords."""
    R = rewrite_system(G)
    cur = free_reduce(w)
    lengths = sorted(R.dehn, reverse=True)
    changed = True
    while changed:
        changed = False
        for l in lengths:
            if l > len(cur):
                continue
            table = R.dehn[l]
            for p in range(len(cur) - l + 1):
                rep = table.get(cur[p : p + l])
                if rep is not None:
                    cur = free_reduce(cur[:p] + rep + cur[p + l :])
                    changed = True
                    break
            if changed:
                break
    return cur


def same_element(G: GeometricPresentation, u: Sequence[int], v: Sequence[int]) -> bool:
    return dehn_reduce(G, tuple(u) + inverse_word(v)) == ()


def _require_sc(G: GeometricPresentation) -> None:
    if not check_small_cancellation(G).verdict:
        raise Unsupported("presentation is not C'(1/6); the growth oracle refuses it")


def _equal_length_class(R: RewriteSystem, w: Word, cap: int) -> tuple[list[Word], Word | None]:
    """Swap closure of ``w``; second item is a shortening if some member admits one."""
    cls = [w]
    seen = {w}
    i = 0
    while i < len(cls):
        v = cls[i]
        i += 1
        for p in range(len(v) - 1):
            if v[p + 1] == inv(v[p]):
                return cls, free_reduce(v)
        for l, table in R.dehn.items():
            for p in range(len(v) - l + 1):
                rep = table.get(v[p : p + l])
                if rep is not None:
                    return cls, v[:p] + rep + v[p + l :]
        for k, table in R.swaps.items():
            for p in range(len(v) - k + 1):
                for rep in table.get(v[p : p + k], ()):
                    u = v[:p] + rep + v[p + k :]
                    if u not in seen:
                        if len(cls) >= cap:
                            raise ClassOverflow(f"rewrite class of length-{len(w)} word exceeds {cap}")
                        seen.add(u)
                        cls.append(u)
    return cls, None


def canonical_form(G: GeometricPresentation, w: Sequence[int], cap: int = 4096) -> Word:
    """Shortlex-least geodesic word for the element spelled by ``w``."""
    _require_sc(G)
    R = rewrite_system(G)
    cur = free_reduce(w)
    while True:
        cls, shorter = _equal_length_class(R, cur, cap)
        if shorter is None:
            return min(cls)
        cur = free_reduce(shorter)


def is_geodesic(G: GeometricPresentation, w: Sequence[int]) -> bool:
    _require_sc(G)
    return _equal_length_class(rewrite_system(G), free_reduce(w), 4096)[1] is None and len(free_reduce(w)) == len(w)


def _pack(w: Sequence[int]) -> int:
    k = 0
    for x in w:
        k = (k << 4) | x
    return k


def unpack(key: int, length: int) -> Word:
    return tuple((int(key) >> (4 * (length - 1 - i))) & 15 for i in range(length))


def _packed_tables(G: GeometricPresentation):
    R = rewrite_system(G)
    swap_len, swap_off, swap_win, swap_rep = [], [0], [], []
    for k in sorted(R.swaps):
        pairs = sorted((_pack(p), _pack(q)) for p, qs in R.swaps[k].items() for q in qs)
        swap_len.append(k)
        swap_win.extend(a for a, _ in pairs)
        swap_rep.extend(b for _, b in pairs)
        swap_off.append(len(swap_win))
    dehn_len, dehn_off, dehn_key = [], [0], []
    for l in sorted(R.dehn):
        keys = sorted(_pack(p) for p in R.dehn[l])
        dehn_len.append(l)
        dehn_key.extend(keys)
        dehn_off.append(len(dehn_key))
    u64 = lambda a: np.array(a, dtype=np.uint64)  # noqa: E731
    i64 = lambda a: np.array(a, dtype=np.int64)  # noqa: E731
    inverse = i64([inv(x) for x in range(G.num_letters)])
    return inverse, i64(swap_len), i64(swap_off), u64(swap_win), u64(swap_rep), i64(dehn_len), i64(dehn_off), u64(dehn_key)


@dataclass(frozen=True)
class GrowthSeries:
    sigma: tuple[int, ...]

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(b / a for a, b in zip(self.sigma, self.sigma[1:]))

    @property
    def h_vol_estimate(self) -> float:
        return math.log(self.ratios[-1]) if len(self.sigma) > 1 else float("nan")

    def csv_rows(self) -> list[tuple]:
        rows = [(0, self.sigma[0], "", "")]
        for m in range(1, len(self.sigma)):
            r = self.sigma[m] / self.sigma[m - 1]
            rows.append((m, self.sigma[m], r, math.log(r)))
        return rows


def sphere_words(G: GeometricPresentation, R: int, cap_elements: int = 10**7, max_class: int = 4096):
    """Yield ``(m, packed canonical keys)`` for m = 0..R."""
    _require_sc(G)
    if G.num_letters > 16 or R > 16:
        raise Unsupported("packed words hold at most 16 letters of 4 bits")
    tabs = _packed_tables(G)
    sphere = np.zeros(1, dtype=np.uint64)
    total = 1
    yield 0, sphere
    for m in range(R):
        sphere, status = kernels.next_sphere(sphere, m, *tabs, max_class)
        if status == kernels.CLASS_OVERFLOW:
            raise ClassOverflow(f"rewrite class exceeded {max_class} at radius {m + 1}")
        total += len(sphere)
        if total > cap_elements:
            raise CapExceeded(f"more than {cap_elements} stored forms at radius {m + 1}")
        yield m + 1, sphere


def ball_sizes(G: GeometricPresentation, R: int, cap_elements: int = 10**7) -> GrowthSeries:
    """Sphere sizes sigma_0..sigma_R."""
    return GrowthSeries(tuple(len(s) for _, s in sphere_words(G, R, cap_elements)))
