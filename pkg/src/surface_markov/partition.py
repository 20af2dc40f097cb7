"""The finite invariant subdivision set S and the circle map on it.

Boundary points are handled symbolically as *writings* ``w . fan(c)``: a
finite geodesic prefix ``w`` followed by the bigon ray spawned by corner ``c``
at the end vertex of ``w``.  Points are compared by walking two writings from a
common vertex and reading the planar order of the outgoing edges; no numeric
circle coordinates are ever used.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Iterable, Optional

from .bigons import completion_paths, corner_step, minimal_bigon
from .presentation import GeometricPresentation, Word, inv


class HorizonExceeded(Exception):
    """Two writings did not separate within the comparison horizon."""


class OrderInconsistent(Exception):
    pass


class Unrecognized(Exception):
    """A shifted writing matched no point of S."""


@dataclass(frozen=True)
class Writing:
    prefix: Word
    corner: int

    def describe(self, G: GeometricPresentation) -> str:
        head = ".".join(G.letter_name(x) for x in self.prefix)
        fan = f"fan{G.corner_name(self.corner)}"
        return f"{head}.{fan}" if head else fan


def default_horizon(G: GeometricPresentation) -> int:
    return 4 * max(len(r) for r in G.relations) * G.num_letters


def expand_fan(G: GeometricPresentation, c: int, letter: int) -> Writing:
    """Rewrite ``fan(c)`` so that it starts along ``letter`` (one of the corner letters)."""
    return Writing(minimal_bigon(G, c).side(letter), corner_step(G, c))


def strip(G: GeometricPresentation, w: Writing, path: Iterable[int]) -> Optional[Writing]:
    """Remainder of ``w`` after the path, or None if ``w`` does not follow it."""
    prefix, c = w.prefix, w.corner
    for q in path:
        if not prefix:
            k = G.corners[c]
            if q != k.left and q != k.right:
                return None
            prefix, c = minimal_bigon(G, c).side(q), corner_step(G, c)
        if prefix[0] != q:
            return None
        prefix = prefix[1:]
    return Writing(prefix, c)


def compare_writings(
    G: GeometricPresentation,
    w1: Writing,
    w2: Writing,
    horizon: Optional[int] = None,
    *,
    back: Optional[int] = None,
    eps: int = 1,
) -> int:
    """Clockwise order of two writings based at the same vertex: -1, 0 or 1.

    Positions are doubled so letters (``2 pos``) and corners (``2 i + 1``) share
    one cyclic scale; ``back`` is the doubled position behind the walk and
    ``eps`` the local orientation.  At the identity the cut sits at the last
    corner, so ``I`` of the first letter opens the circle.
    """
    m2 = 2 * G.num_letters
    if back is None:
        back = m2 - 1
    if horizon is None:
        horizon = default_horizon(G)
    pos, chi = G.pos, G.chi
    p1, c1 = w1.prefix, w1.corner
    p2, c2 = w2.prefix, w2.corner

    def order(a: int, b: int) -> int:
        oa, ob = (eps * (a - back)) % m2, (eps * (b - back)) % m2
        return (oa > ob) - (oa < ob)

    for _ in range(horizon):
        if not p1 and not p2:
            return 0 if c1 == c2 else order(2 * c1 + 1, 2 * c2 + 1)
        if not p1:
            q = p2[0]
            k = G.corners[c1]
            if q == k.left or q == k.right:
                p1, c1 = minimal_bigon(G, c1).side(q), corner_step(G, c1)
                continue
            return order(2 * c1 + 1, 2 * pos[q])
        if not p2:
            q = p1[0]
            k = G.corners[c2]
            if q == k.left or q == k.right:
                p2, c2 = minimal_bigon(G, c2).side(q), corner_step(G, c2)
                continue
            return order(2 * pos[q], 2 * c2 + 1)
        q1, q2 = p1[0], p2[0]
        if q1 == q2:
            p1, p2 = p1[1:], p2[1:]
            back = 2 * pos[inv(q1)]
            eps *= chi[q1]
            continue
        if G.adjacent(q1, q2):
            # the two rays can only meet again at the top of the bigon between them
            b = minimal_bigon(G, G.corner_of(q1, q2))
            s1, s2 = b.side(q1), b.side(q2)
            t1 = strip(G, Writing(p1, c1), s1)
            t2 = strip(G, Writing(p2, c2), s2)
            if t1 is not None and t2 is not None:
                p1, c1, p2, c2 = t1.prefix, t1.corner, t2.prefix, t2.corner
                back = 2 * b.top + 1
                for q in s1:
                    eps *= chi[q]
                continue
        return order(2 * pos[q1], 2 * pos[q2])
    raise HorizonExceeded(f"{w1.describe(G)} vs {w2.describe(G)}")


def writing_from(G: GeometricPresentation, w: Writing, x: int) -> Optional[Writing]:
    """Another writing of the same point whose first letter is ``x``, if one is at hand."""
    if not w.prefix:
        k = G.corners[w.corner]
        if x == k.left or x == k.right:
            return expand_fan(G, w.corner, x)
        return None
    y = w.prefix[0]
    if y == x:
        return w
    if not G.adjacent(x, y):
        return None
    b = minimal_bigon(G, G.corner_of(x, y))
    rest = strip(G, w, b.side(y))
    if rest is None:
        return None
    return Writing(b.side(x) + rest.prefix, rest.corner)


def locate(G: GeometricPresentation, w: Writing, horizon: Optional[int] = None) -> tuple[int, Writing]:
    """Owner letter of the half-open interval ``[L_x, R_x[`` holding ``w``, with an x-writing."""
    m = G.num_letters
    if not w.prefix:
        x = G.order[(w.corner + 1) % m]
        return x, expand_fan(G, w.corner, x)
    y = w.prefix[0]
    for _ in range(m + 1):
        cl = (G.pos[y] - 1) % m
        if compare_writings(G, w, expand_fan(G, cl, y), horizon) < 0:
            y = G.order[cl]
        else:
            cr = G.pos[y]
            if compare_writings(G, w, expand_fan(G, cr, y), horizon) < 0:
                return y, w
            y = G.order[(cr + 1) % m]
        w2 = writing_from(G, w, y)
        if w2 is None:
            raise Unrecognized(f"{w.describe(G)} leaves the cylinder of its first letter")
        w = w2
    raise Unrecognized(f"could not place {w.describe(G)}")


@dataclass(frozen=True)
class SubdivisionPoint:
    """A point of S; ``writing`` starts with ``owner`` (its interval is ``[L, R[``)."""

    owner: int
    side: str  # "L" (left endpoint), "left", "right" or "image"
    index: int
    kind: str  # "endpoint", "corner", "completion" or "image"
    writing: Writing
    name: str = ""


def _seed_rays(G: GeometricPresentation, x: int) -> list[tuple[str, str, Writing]]:
    """Seed subdivision rays of the interval of ``x``: left rays then right rays."""
    m = G.num_letters
    out = []
    for side, c in (("left", (G.pos[x] - 1) % m), ("right", G.pos[x])):
        y = G.face_word(c, x)
        L = len(y)
        h = L // 2
        last = h - 1 if L % 2 else h - 2
        for j in range(last + 1):
            fan = G.opposite_corner(G.corner_of(inv(y[j]), y[j + 1]))
            out.append((side, "corner", Writing(y[: j + 1], fan)))
        if L % 2:
            for j in range(h - 1):
                ext, other, _ = completion_paths(G, y[j + 1], inv(y[j]))
                top = G.corner_of(inv(ext[-1]), inv(other[-1]))
                out.append((side, "completion", Writing(y[: j + 1] + ext, G.opposite_corner(top))))
    return out


def phi_writing(G: GeometricPresentation, w: Writing, x: int) -> Writing:
    """Image under the branch of x: act by x^-1 on an x-writing (a shift)."""
    wx = writing_from(G, w, x)
    if wx is None:
        raise Unrecognized(f"{w.describe(G)} has no writing starting with {G.letter_name(x)}")
    return Writing(wx.prefix[1:], wx.corner)


@dataclass
class CircularPartition:
    G: GeometricPresentation
    points: list[SubdivisionPoint]
    intervals: dict[int, tuple[int, int]]  # letter -> (start index, subinterval count)
    horizon: int
    _images: dict[tuple[int, int], int] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def num_subintervals(self) -> int:
        return len(self.points)

    def interval_points(self, x: int) -> list[SubdivisionPoint]:
        """Closure of I_x: its own points followed by the right endpoint."""
        s, k = self.intervals[x]
        N = len(self.points)
        return [self.points[(s + i) % N] for i in range(k + 1)]

    def interval_endpoints(self, x: int) -> tuple[SubdivisionPoint, SubdivisionPoint]:
        pts = self.interval_points(x)
        return pts[0], pts[-1]

    def index_of(self, name: str) -> int:
        """Index of a named point; ``R_{x}`` is accepted for the right endpoint of I_x."""
        if name.startswith("R_{") and "," not in name:
            name = right_endpoint_name(self.G, self.G.letter(name[3:-1]))
        for i, p in enumerate(self.points):
            if p.name == name:
                return i
        raise KeyError(name)

    def point(self, name: str) -> SubdivisionPoint:
        return self.points[self.index_of(name)]

    def find(self, w: Writing) -> int:
        """Index in S of the point written by ``w``."""
        x, wx = locate(self.G, w, self.horizon)
        s, k = self.intervals[x]
        N = len(self.points)
        for i in range(k):
            j = (s + i) % N
            if compare_writings(self.G, wx, self.points[j].writing, self.horizon) == 0:
                return j
        raise Unrecognized(f"{w.describe(self.G)} is not a point of S")

    def phi_index(self, i: int, x: Optional[int] = None) -> int:
        """Index of the image of point ``i`` under the branch of ``x`` (default: its owner)."""
        p = self.points[i]
        x = p.owner if x is None else x
        key = (i, x)
        if key not in self._images:
            self._images[key] = self.find(phi_writing(self.G, p.writing, x))
        return self._images[key]

    def phi_point(self, s: SubdivisionPoint) -> SubdivisionPoint:
        return self.points[self.phi_index(self.points.index(s))]

    def subinterval_label(self, i: int) -> str:
        p = self.points[i]
        s, _ = self.intervals[p.owner]
        return f"I_{{{self.G.letter_name(p.owner)},{(i - s) % len(self.points) + 1}}}"

    def to_json(self) -> str:
        G = self.G
        rows = []
        for p in self.points:
            ray = minimal_bigon(G, p.writing.corner)
            rows.append(
                {
                    "name": p.name,
                    "owner": G.letter_name(p.owner),
                    "side": p.side,
                    "index": p.index,
                    "kind": p.kind,
                    "prefix": [G.letter_name(x) for x in p.writing.prefix],
                    "tail_seed": G.corner_name(p.writing.corner),
                    "period": [G.corner_name(c) for c in _period(G, ray.bottom)],
                }
            )
        return json.dumps(rows, indent=1)


def _period(G: GeometricPresentation, c: int) -> list[int]:
    from .bigons import bigon_ray

    return list(bigon_ray(G, c).period)


def build_partition(
    G: GeometricPresentation, horizon: Optional[int] = None, *, allow_length_two: bool = False
) -> CircularPartition:
    """Seed rays plus endpoints, closed under every branch of the map, then ordered."""
    if "length2" in G.flags and not allow_length_two:
        raise ValueError("length-2 relations must be removed before building the partition")
    horizon = default_horizon(G) if horizon is None else horizon
    m = G.num_letters
    buckets: dict[int, list[SubdivisionPoint]] = {x: [] for x in G.order}

    def add(w: Writing, side: str, kind: str) -> bool:
        x, wx = locate(G, w, horizon)
        for q in buckets[x]:
            if compare_writings(G, wx, q.writing, horizon) == 0:
                return False
        buckets[x].append(SubdivisionPoint(x, side, 0, kind, wx))
        return True

    for c in range(m):
        add(Writing((), c), "L", "endpoint")
    for x in G.order:
        for side, kind, w in _seed_rays(G, x):
            add(w, side, kind)

    # close under the branches: each point of the closure of I_x maps by x^-1
    done: set[tuple[int, int]] = set()
    changed = True
    while changed:
        changed = False
        for x in G.order:
            closure = list(buckets[x]) + [buckets[G.order[(G.pos[x] + 1) % m]][0]]
            for q in closure:
                key = (id(q), x)
                if key in done:
                    continue
                done.add(key)
                if add(phi_writing(G, q.writing, x), "image", "image"):
                    changed = True

    points: list[SubdivisionPoint] = []
    intervals: dict[int, tuple[int, int]] = {}
    for x in G.order:
        pts = buckets[x]
        ends = [p for p in pts if p.kind == "endpoint"]
        if len(ends) != 1:
            raise OrderInconsistent(f"interval {G.letter_name(x)} holds {len(ends)} endpoints")
        rest = sorted(
            (p for p in pts if p.kind != "endpoint"),
            key=cmp_to_key(lambda a, b: compare_writings(G, a.writing, b.writing, horizon)),
        )
        if rest and compare_writings(G, ends[0].writing, rest[0].writing, horizon) >= 0:
            raise OrderInconsistent(f"a point of I_{G.letter_name(x)} precedes its left endpoint")
        named = [_named(G, ends[0], x, "L", 0)]
        lefts = [p for p in rest if p.side == "left"]
        rights = [p for p in rest if p.side == "right"]
        for p in rest:
            if p.side == "left":
                named.append(_named(G, p, x, "L", lefts.index(p) + 1))
            elif p.side == "right":
                named.append(_named(G, p, x, "R", len(rights) - rights.index(p)))
            else:
                named.append(_named(G, p, x, "P", rest.index(p) + 1))
        intervals[x] = (len(points), len(named))
        points.extend(named)
    return CircularPartition(G, points, intervals, horizon)


def _named(G, p: SubdivisionPoint, x: int, tag: str, j: int) -> SubdivisionPoint:
    nm = G.letter_name(x)
    name = f"{tag}_{{{nm}}}" if j == 0 else f"{tag}_{{{nm},{j}}}"
    return SubdivisionPoint(p.owner, p.side, j, p.kind, p.writing, name)


def right_endpoint_name(G: GeometricPresentation, x: int) -> str:
    """``R_x`` is the left endpoint of the next interval."""
    return f"L_{{{G.letter_name(G.order[(G.pos[x] + 1) % G.num_letters])}}}"


def audit_order(part: CircularPartition) -> list[str]:
    """Exhaustive pairwise and transitivity check of each interval's order."""
    G, h = part.G, part.horizon
    problems = []
    for x in G.order:
        s, k = part.intervals[x]
        pts = part.points[s : s + k]
        for i in range(k):
            for j in range(k):
                r = compare_writings(G, pts[i].writing, pts[j].writing, h)
                want = (i > j) - (i < j)
                if r != want:
                    problems.append(f"{pts[i].name} vs {pts[j].name}: {r} != {want}")
    return problems
