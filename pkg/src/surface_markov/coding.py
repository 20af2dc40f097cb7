"""Prefix counts of the I- and X-codings, and finite orbit-equivalence witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .bigons import minimal_bigon
from .markov import MarkovMatrix
from .presentation import inv
from .partition import CircularPartition, Writing, compare_writings, locate, writing_from


class StateBlowup(Exception):
    pass


class NotFound(Exception):
    pass


def i_prefix_counts(M: MarkovMatrix, m_max: int) -> list[int]:
    """``[I_1, ..., I_m_max]`` with I_m the entry sum of M^(m-1) (exact integers)."""
    v = [1] * M.size
    out = []
    for m in range(1, m_max + 1):
        out.append(sum(v))
        if m < m_max:
            v = [sum(v[j] for j in row) for row in M.rows]
    return out


def i_prefix_count(M: MarkovMatrix, m: int) -> int:
    if m < 1:
        raise ValueError("m >= 1")
    return i_prefix_counts(M, m)[-1]


def x_prefix_counts(M: MarkovMatrix, m_max: int, state_cap: int = 200_000) -> list[int]:
    """Distinct letter words of length 1..m_max read along paths of M.

    Subset construction on the letter-labelled transition system; each
    determinised state is a bitmask of subintervals.
    """
    labels = M.owners
    letters = sorted(set(labels))
    succ = [0] * M.size
    for i, row in enumerate(M.rows):
        for j in row:
            succ[i] |= 1 << j
    by_letter = {x: sum(1 << i for i, l in enumerate(labels) if l == x) for x in letters}
    counts: dict[int, int] = {}
    for x in letters:
        counts[by_letter[x]] = counts.get(by_letter[x], 0) + 1
    trans: dict[int, list[int]] = {}
    out = [sum(counts.values())]
    for _ in range(1, m_max):
        nxt: dict[int, int] = {}
        for S, c in counts.items():
            if S not in trans:
                reach = 0
                T = S
                while T:
                    low = T & -T
                    reach |= succ[low.bit_length() - 1]
                    T ^= low
                trans[S] = [reach & by_letter[x] for x in letters]
                if len(trans) > state_cap:
                    raise StateBlowup(f"more than {state_cap} determinised states")
            for S2 in trans[S]:
                if S2:
                    nxt[S2] = nxt.get(S2, 0) + c
        counts = nxt
        out.append(sum(counts.values()))
    return out


def x_prefix_count(M: MarkovMatrix, m: int) -> int:
    if m < 1:
        raise ValueError("m >= 1")
    return x_prefix_counts(M, m)[-1]


def x_words_bruteforce(M: MarkovMatrix, m: int) -> set[tuple[int, ...]]:
    """Projected words of all M-paths with m states, by plain enumeration."""
    words: set[tuple[int, ...]] = set()
    frontier = {(i, (M.owners[i],)) for i in range(M.size)}
    for _ in range(m - 1):
        frontier = {(j, w + (M.owners[j],)) for i, w in frontier for j in M.rows[i]}
    for _, w in frontier:
        words.add(w)
    return words


@dataclass(frozen=True)
class PrefixCounts:
    I: tuple[int, ...]
    X: tuple[int, ...]
    K: int

    def normalized(self) -> list[tuple[int, float, float]]:
        return [(m + 1, math.log(i) / (m + 1), math.log(x) / (m + 1)) for m, (i, x) in enumerate(zip(self.I, self.X))]


def prefix_counts(part: CircularPartition, M: MarkovMatrix, m: int) -> PrefixCounts:
    K = max(k for _, k in part.intervals.values())
    return PrefixCounts(tuple(i_prefix_counts(M, m)), tuple(x_prefix_counts(M, m)), K)


# orbit witnesses --------------------------------------------------------------


def phi_general(part: CircularPartition, w: Writing) -> Writing:
    """The circle map on any symbolic point, not only on S."""
    _, wx = locate(part.G, w, part.horizon)
    return Writing(wx.prefix[1:], wx.corner)


def act_inverse(part: CircularPartition, s: int, w: Writing) -> Writing:
    """A writing of ``s^-1 . w`` for a point in the cylinder of ``s``."""
    ws = writing_from(part.G, w, s)
    if ws is None:
        raise NotFound(f"point has no writing through {part.G.letter_name(s)}")
    return Writing(ws.prefix[1:], ws.corner)


def same_point(part: CircularPartition, u: Writing, v: Writing) -> bool:
    xu, wu = locate(part.G, u, part.horizon)
    xv, wv = locate(part.G, v, part.horizon)
    return xu == xv and compare_writings(part.G, wu, wv, part.horizon) == 0


def default_depth(part: CircularPartition) -> int:
    G = part.G
    return max(minimal_bigon(G, c).length for c in range(G.num_letters)) + G.num_letters


def orbit_witness(
    part: CircularPartition, s: int, p: Writing | int, depth: Optional[int] = None
) -> tuple[int, int]:
    """Least ``(n, m)`` in the order (n + m, n) with Phi^n(s^-1 p) = Phi^m(p)."""
    if isinstance(p, int):
        p = part.points[p].writing
    depth = default_depth(part) if depth is None else depth
    eta = act_inverse(part, s, p)
    A = [eta]
    B = [p]
    for _ in range(depth + 1):
        A.append(phi_general(part, A[-1]))
        B.append(phi_general(part, B[-1]))
    for total in range(2 * depth + 2):
        for n in range(0, total + 1):
            m = total - n
            if n <= depth + 1 and m <= depth + 1 and same_point(part, A[n], B[m]):
                return n, m
    raise NotFound(f"no witness up to depth {depth}")


def holds(part: CircularPartition, s: int, p: Writing | int, n: int, m: int) -> bool:
    """Whether Phi^n(s^-1 p) = Phi^m(p)."""
    if isinstance(p, int):
        p = part.points[p].writing
    a = act_inverse(part, s, p)
    for _ in range(n):
        a = phi_general(part, a)
    b = p
    for _ in range(m):
        b = phi_general(part, b)
    return same_point(part, a, b)


def crossing_cases(part: CircularPartition) -> list[tuple[int, Writing, str]]:
    """Points with two writings ``x . w1 . w = x' . w2 . w`` across a corner bigon.

    Each endpoint L_x (the corner of x and its left neighbour ``x'``) qualifies,
    as does every point ``side_x . fan(d)`` on top of that bigon that stays
    away from both back edges.  Returned as ``(s = x', point, description)``.
    """
    G = part.G
    m = G.num_letters
    out = []
    for x in G.order:
        c = (G.pos[x] - 1) % m
        xl = G.order[c]
        b = minimal_bigon(G, c)
        out.append((xl, Writing((), c), f"L_{G.letter_name(x)}"))
        near = set()
        for path in (b.left_path, b.right_path):
            p = G.pos[inv(path[-1])]
            near.update({(p - 2) % m, (p - 1) % m, p, (p + 1) % m})
        for d in range(m):
            if d in near:
                continue
            w = Writing(b.side(x), d)
            owner, _ = locate(G, w, part.horizon)
            if owner == x and writing_from(G, w, xl) is not None:
                out.append((xl, w, w.describe(G)))
    return out


def diagonal_witness(part: CircularPartition, s: int, p: Writing | int, depth: Optional[int] = None) -> int:
    """Least k with Phi^k(s^-1 p) = Phi^(k+1)(p)."""
    depth = default_depth(part) if depth is None else depth
    for k in range(depth + 1):
        if holds(part, s, p, k, k + 1):
            return k
    raise NotFound(f"no diagonal witness up to depth {depth}")


def witness_table(part: CircularPartition, cases: Sequence[tuple[int, Writing, str]], depth: Optional[int] = None):
    return [(desc, orbit_witness(part, s, w, depth)) for s, w, desc in cases]
