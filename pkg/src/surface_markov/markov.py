"""Markov transition matrix of the circle map and its entropy."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .partition import CircularPartition


class Orientation(Enum):
    PRESERVING = "Preserving"
    REVERSING = "Reversing"


class Degenerate(Exception):
    pass


class NonContiguous(Exception):
    pass


class NoConvergence(Exception):
    def __init__(self, message: str, estimate: float, gap: float):
        super().__init__(message)
        self.estimate = estimate
        self.gap = gap


class BoundViolation(Exception):
    def __init__(self, message: str, column: int):
        super().__init__(message)
        self.column = column


def _cyclic_order(a: int, b: int, c: int, N: int) -> int:
    """+1 if a, b, c are clockwise and distinct, -1 if counterclockwise, 0 on ties."""
    if a == b or b == c or a == c:
        return 0
    return 1 if (b - a) % N < (c - a) % N else -1


def _closure_indices(part: CircularPartition, x: int) -> list[int]:
    s, k = part.intervals[x]
    N = len(part.points)
    return [(s + i) % N for i in range(k + 1)]


def orientation_of(part: CircularPartition, x: int, exhaustive: bool = False) -> Orientation:
    """Compare the cyclic order of three points of the closed interval with their images."""
    idx = _closure_indices(part, x)
    if len(idx) < 3:
        raise Degenerate(f"interval {part.G.letter_name(x)} holds fewer than 3 points")
    N = len(part.points)
    triples = combinations(idx, 3) if exhaustive else [(idx[0], idx[len(idx) // 2], idx[-1])]
    seen = set()
    for p, r, q in triples:
        img = [part.phi_index(i, x) for i in (p, r, q)]
        seen.add(_cyclic_order(*img, N))
    if seen == {1}:
        return Orientation.PRESERVING
    if seen == {-1}:
        return Orientation.REVERSING
    raise NonContiguous(f"branch of {part.G.letter_name(x)} does not respect the cyclic order")


def arc(a: int, b: int, N: int) -> list[int]:
    """Subintervals met going clockwise from point ``a`` to point ``b``."""
    return [(a + t) % N for t in range((b - a) % N)]


def interval_image(part: CircularPartition, x: int, j: int) -> list[int]:
    """Global subinterval indices covered by the image of I_{x, j} (1-based ``j``)."""
    idx = _closure_indices(part, x)
    N = len(part.points)
    a, b = part.phi_index(idx[j - 1], x), part.phi_index(idx[j], x)
    if orientation_of(part, x) is Orientation.REVERSING:
        a, b = b, a
    out = arc(a, b, N)
    if not out:
        raise NonContiguous(f"I_{{{part.G.letter_name(x)},{j}}} collapses")
    return out


@dataclass
class MarkovMatrix:
    labels: list[str]
    rows: list[list[int]]
    owners: list[int]

    @property
    def size(self) -> int:
        return len(self.rows)

    def dense(self) -> np.ndarray:
        A = np.zeros((self.size, self.size), dtype=np.int64)
        for i, r in enumerate(self.rows):
            A[i, r] = 1
        return A

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.size + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in self.rows])
        indices = np.array([c for r in self.rows for c in r], dtype=np.int64)
        return indptr, indices

    def row_sums(self) -> list[int]:
        return [len(r) for r in self.rows]

    def column_sums(self) -> list[int]:
        return [int(v) for v in self.dense().sum(axis=0)]


def transition_matrix(part: CircularPartition) -> MarkovMatrix:
    N = len(part.points)
    rows: list[list[int]] = [[] for _ in range(N)]
    labels = [part.subinterval_label(i) for i in range(N)]
    owners = [p.owner for p in part.points]
    for x in part.G.order:
        s, k = part.intervals[x]
        for j in range(1, k + 1):
            rows[(s + j - 1) % N] = sorted(interval_image(part, x, j))
    return MarkovMatrix(labels, rows, owners)


def markov_audit(part: CircularPartition, M: Optional[MarkovMatrix] = None) -> list[str]:
    """Violations of the Markov property; an empty list means the partition passes.

    Checks that every branch sends the closed interval's points to distinct
    points of S in one cyclic direction with total turn below a full circle,
    that every row is one contiguous cyclic arc, and that the arc ends are the
    images of the subinterval's endpoints.
    """
    G = part.G
    N = len(part.points)
    out = []
    for x in G.order:
        idx = _closure_indices(part, x)
        try:
            imgs = [part.phi_index(i, x) for i in idx]
        except Exception as exc:  # a point leaving S is itself the violation
            out.append(f"{G.letter_name(x)}: {exc}")
            continue
        try:
            orient = orientation_of(part, x, exhaustive=len(idx) <= 12)
        except (NonContiguous, Degenerate) as exc:
            out.append(str(exc))
            continue
        if orient is Orientation.REVERSING:
            imgs = imgs[::-1]
        steps = [(b - a) % N for a, b in zip(imgs, imgs[1:])]
        if 0 in steps or sum(steps) >= N:
            out.append(f"{G.letter_name(x)}: images wind {sum(steps)} of {N} with steps {steps}")
    if M is not None:
        for i, row in enumerate(M.rows):
            if not row:
                out.append(f"row {M.labels[i]} is empty")
                continue
            members = set(row)
            starts = [c for c in row if (c - 1) % N not in members]
            if len(starts) != 1 and len(row) != N:
                out.append(f"row {M.labels[i]} is not one arc")
                continue
            p = part.points[i]
            s, _ = part.intervals[p.owner]
            j = (i - s) % N + 1
            idx = _closure_indices(part, p.owner)
            a, b = part.phi_index(idx[j - 1], p.owner), part.phi_index(idx[j], p.owner)
            ends = {starts[0], (starts[0] + len(row)) % N} if starts else set()
            if ends != {a, b}:
                out.append(f"row {M.labels[i]} ends {sorted(ends)} differ from images {sorted([a, b])}")
    return out


@dataclass(frozen=True)
class EntropyReport:
    lam: float
    h_top: float
    iterations: int
    tol: float
    gap: float

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "h_top": self.h_top, "iterations": self.iterations, "tol": self.tol}


def spectral_radius(M: MarkovMatrix | np.ndarray | Sequence[Sequence[int]], tol: float = 1e-12, max_iters: int = 10**6) -> EntropyReport:
    """Perron root by power iteration on ``M + I`` (primitive whenever ``M`` is irreducible).

    Convergence is declared once the Collatz-Wielandt bracket is below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(M, MarkovMatrix):
        indptr, indices = M.csr()
    else:
        A = np.asarray(M)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("square matrix required")
        if (A < 0).any():
            raise ValueError("matrix must be nonnegative")
        if not np.array_equal(A, A.astype(bool)):
            return _dense_power(A.astype(np.float64), tol, max_iters)
        indptr = np.zeros(A.shape[0] + 1, dtype=np.int64)
        rows = [np.nonzero(r)[0] for r in A]
        indptr[1:] = np.cumsum([len(r) for r in rows])
        indices = np.concatenate(rows).astype(np.int64) if rows else np.zeros(0, dtype=np.int64)
    lam, iters, gap = kernels.power_iteration(indptr, indices, tol, max_iters)
    if gap >= tol:
        raise NoConvergence(f"no convergence after {iters} iterations", lam, gap)
    return EntropyReport(lam, math.log(lam) if lam > 0 else float("-inf"), iters, tol, gap)


def _dense_power(A: np.ndarray, tol: float, max_iters: int) -> EntropyReport:
    # weighted matrices: same shifted iteration and stopping rule, dense
    n = A.shape[0]
    B = A + np.eye(n)
    v = np.full(n, 1.0 / n)
    gap = math.inf
    for it in range(1, max_iters + 1):
        w = B @ v
        r = w / v
        gap = float(r.max() - r.min())
        est = w.sum()
        v = w / est
        if gap < tol:
            lam = est - 1.0
            return EntropyReport(lam, math.log(lam), it, tol, gap)
    raise NoConvergence(f"no convergence after {max_iters} iterations", est - 1.0, gap)


@dataclass(frozen=True)
class PreimageProfile:
    column_sums: list[int]
    types: dict[str, tuple[int, ...]]
    bounds: tuple[int, int]


def _runs(values: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for v in values:
        if not out or out[-1] != v:
            out.append(v)
    return tuple(out)


def preimage_profile(M: MarkovMatrix, n: int, names: Optional[dict[int, str]] = None, check: bool = True) -> PreimageProfile:
    """Column sums with the (left, centre, right) run type of each interval."""
    cols = M.column_sums()
    lo, hi = 2 * n - 3, 2 * n - 1
    if check:
        for j, c in enumerate(cols):
            if not lo <= c <= hi:
                raise BoundViolation(f"column {M.labels[j]} has {c} preimages, outside [{lo}, {hi}]", j)
    types: dict[str, tuple[int, ...]] = {}
    order: list[int] = []
    for o in M.owners:
        if o not in order:
            order.append(o)
    for o in order:
        seq = [cols[j] for j in range(M.size) if M.owners[j] == o]
        key = names[o] if names else str(o)
        types[key] = _runs(seq)
    return PreimageProfile(cols, types, (lo, hi))


def expansivity_ok(M: MarkovMatrix, power: int = 2) -> bool:
    """Every row of ``M**power`` covers at least two subintervals."""
    A = M.dense()
    P = np.linalg.matrix_power(A, power)
    return bool(((P > 0).sum(axis=1) >= 2).all())


def expansion_power(M: MarkovMatrix, limit: int = 64) -> int:
    """Least k with every row of ``M**k`` covering two or more subintervals."""
    A = M.dense().astype(bool)
    P = A.copy()
    for k in range(1, limit + 1):
        if (P.sum(axis=1) >= 2).all():
            return k
        P = (P.astype(np.int64) @ A.astype(np.int64)) > 0
    raise Degenerate(f"no expansion within {limit} iterates")


def permutation_equivalent(A: MarkovMatrix, B: MarkovMatrix) -> Optional[list[int]]:
    """A bijection ``p`` with ``A[i][j] = B[p i][p j]``, found by refinement and backtracking."""
    if A.size != B.size:
        return None
    n = A.size
    a, b = A.dense().astype(bool), B.dense().astype(bool)

    def signature(X: np.ndarray) -> list[tuple]:
        out = X.sum(axis=1), X.sum(axis=0)
        X2 = X.astype(np.int64) @ X.astype(np.int64)
        return [(int(out[0][i]), int(out[1][i]), int(X[i, i]), int(X2[i, i]), tuple(sorted(X2[i]))) for i in range(n)]

    sa, sb = signature(a), signature(b)
    if sorted(sa) != sorted(sb):
        return None
    cand = [[j for j in range(n) if sb[j] == sa[i]] for i in range(n)]
    order = sorted(range(n), key=lambda i: len(cand[i]))
    perm = [-1] * n
    used = [False] * n

    def ok(i: int, j: int) -> bool:
        for k in range(n):
            pk = perm[k]
            if pk < 0:
                continue
            if a[i, k] != b[j, pk] or a[k, i] != b[pk, j]:
                return False
        return a[i, i] == b[j, j]

    def go(t: int) -> bool:
        if t == n:
            return True
        i = order[t]
        for j in cand[i]:
            if not used[j] and ok(i, j):
                perm[i], used[j] = j, True
                if go(t + 1):
                    return True
                perm[i], used[j] = -1, False
        return False

    return perm if go(0) else None
