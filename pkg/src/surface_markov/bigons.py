"""Minimal bigons spawned by corners, and the bigon rays they generate."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .presentation import GeometricPresentation, Word, inv


class ChainCycle(Exception):
    """The bigon completion chain revisited a 2-cell without closing."""


@dataclass(frozen=True)
class Bigon:
    """Two equal-length geodesics from the identity to a common vertex.

    ``left_path`` starts with the corner's left letter and ``right_path`` with
    its right letter.  ``faces`` lists the 2-cells crossed as
    ``(relation index, corner index at the entry vertex)``; the first entry is
    the cell of the bottom corner itself, the rest form the completion chain.
    """

    bottom: int
    top: int
    left_path: Word
    right_path: Word
    faces: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.left_path)

    @property
    def completion(self) -> tuple[tuple[int, int], ...]:
        return self.faces[1:]

    def side(self, letter: int) -> Word:
        if self.left_path[0] == letter:
            return self.left_path
        if self.right_path[0] == letter:
            return self.right_path
        raise ValueError("letter does not start a side of this bigon")

    def to_json(self, G: GeometricPresentation) -> str:
        return json.dumps(
            {
                "bottom": G.corner_name(self.bottom),
                "top": G.corner_name(self.top),
                "left_path": [G.letter_name(x) for x in self.left_path],
                "right_path": [G.letter_name(x) for x in self.right_path],
                "completion": [r for r, _ in self.completion],
            }
        )


def _other_neighbour(G: GeometricPresentation, e: int, not_this: int) -> int:
    m = G.num_letters
    p = G.pos[e]
    a, b = G.order[(p + 1) % m], G.order[(p - 1) % m]
    if a == not_this:
        return b
    if b == not_this:
        return a
    raise AssertionError("previous cell is not adjacent to the middle edge")


def completion_paths(G: GeometricPresentation, e: int, prev_other: int):
    """Follow the bigon completion chain across the edge ``e``.

    ``prev_other`` is the letter at the start vertex of ``e`` bounding the cell
    already crossed.  Returns ``(from_start, from_end, faces)``: the two paths
    running from the endpoints of ``e`` around the completion cells to their
    common vertex, and the ``(relation, corner)`` cells visited.
    """
    a: list[int] = []
    b: list[int] = []
    x, y = a, b
    faces = []
    # the chain is deterministic in (corner, entry edge); a repeat never closes
    visited: set[tuple[int, int]] = set()
    while True:
        e2 = _other_neighbour(G, e, prev_other)
        cc = G.corner_of(e, e2)
        if (cc, e) in visited:
            raise ChainCycle(f"completion chain revisits corner {G.corner_name(cc)}")
        visited.add((cc, e))
        faces.append((G.relation_of_corner(cc)[0], cc))
        H = G.face_word(cc, e)
        M = len(H)
        k = M // 2
        if M % 2 == 1:
            x.extend(inv(H[M - 1 - i]) for i in range(k))
            y.extend(H[1 : k + 1])
            return tuple(a), tuple(b), tuple(faces)
        x.extend(inv(H[M - 1 - i]) for i in range(k - 1))
        y.extend(H[1:k])
        e = H[k]
        prev_other = inv(H[k - 1])
        x, y = y, x


def _build_bigon(G: GeometricPresentation, c: int) -> Bigon:
    corner = G.corners[c]
    F = G.face_word(c, corner.right)
    L = len(F)
    h = L // 2
    right = F[:h]
    left = tuple(inv(F[L - 1 - i]) for i in range(h))
    faces: tuple[tuple[int, int], ...] = ((G.relation_of_corner(c)[0], c),)
    if L % 2 == 1:
        # odd cell: the middle edge runs from the end of ``right`` to the end of ``left``
        ext_r, ext_l, chain = completion_paths(G, F[h], inv(F[h - 1]))
        right, left, faces = right + ext_r, left + ext_l, faces + chain
    top = G.corner_of(inv(right[-1]), inv(left[-1]))
    return Bigon(c, top, left, right, faces)


@lru_cache(maxsize=None)
def _bigon_table(G: GeometricPresentation) -> tuple[Bigon, ...]:
    return tuple(_build_bigon(G, c) for c in range(G.num_letters))


def minimal_bigon(G: GeometricPresentation, c: int) -> Bigon:
    """The unique minimal bigon whose bottom corner is ``c`` (rooted at the identity)."""
    return _bigon_table(G)[c]


def corner_step(G: GeometricPresentation, c: int) -> int:
    """Bottom corner of the next bigon along the ray: opposite of the top corner."""
    return G.opposite_corner(minimal_bigon(G, c).top)


@dataclass(frozen=True)
class BigonRay:
    seed: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def corner_at(self, k: int) -> int:
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def expand(self, G: GeometricPresentation, length: int, sides: str | Sequence[str] = "left") -> Word:
        """Concatenate chosen sides of successive bigons; truncate to ``length`` letters.

        ``sides`` is ``"left"``, ``"right"`` or a sequence of those, one per bigon
        (the last entry repeats).
        """
        out: list[int] = []
        k = 0
        while len(out) < length:
            if isinstance(sides, str):
                choice = sides
            else:
                choice = sides[min(k, len(sides) - 1)]
            b = minimal_bigon(G, self.corner_at(k))
            out.extend(b.left_path if choice == "left" else b.right_path)
            k += 1
        return tuple(out[:length])

    def boundaries(self, G: GeometricPresentation, count: int) -> list[int]:
        """Word positions of the first ``count`` bigon end vertices."""
        out, total = [], 0
        for k in range(count):
            total += minimal_bigon(G, self.corner_at(k)).length
            out.append(total)
        return out


def bigon_ray(G: GeometricPresentation, c: int) -> BigonRay:
    seq: list[int] = []
    index: dict[int, int] = {}
    cur = c
    while cur not in index:
        index[cur] = len(seq)
        seq.append(cur)
        cur = corner_step(G, cur)
    k = index[cur]
    return BigonRay(c, tuple(seq[:k]), tuple(seq[k:]))
