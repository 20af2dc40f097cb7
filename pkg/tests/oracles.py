"""Independent oracles used by the tests.

``Holonomy`` realises an orientable presentation whose relators all have the
same length p as the symmetry group of the regular {p, 2n} tiling of the
hyperbolic plane (hyperboloid model, 3x3 Lorentz matrices).  Two words name
the same element exactly when they move the base vertex to the same point.

``cannon_sphere_sizes`` evaluates the rational growth series of the standard
genus-g surface group presentation.
"""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy.spatial import cKDTree

from surface_markov.presentation import GeometricPresentation, free_reduce, inv


def _rot(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _boost(d: float) -> np.ndarray:
    c, s = math.cosh(d), math.sinh(d)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


class Holonomy:
    def __init__(self, G: GeometricPresentation):
        lengths = {len(w) for w in G.relations}
        if not G.orientable or len(lengths) != 1:
            raise ValueError("needs an orientable presentation with relators of one length")
        p = lengths.pop()
        m = G.num_letters
        alpha = 2 * math.pi / m
        self.edge = 2 * math.acosh(math.cos(math.pi / p) / math.sin(alpha / 2))
        self.G = G
        self.p = p
        for sign in (1, -1):
            self.sign = sign
            self._mp_cache = {}
            theta = [sign * alpha * G.pos[x] for x in range(m)]
            mats = [_rot(theta[y]) @ _boost(self.edge) @ _rot(math.pi - theta[inv(y)]) for y in range(m)]
            self.mats = mats
            if all(self.is_identity(w) for w in G.relations):
                return
        raise ValueError("relators do not close up in the regular tiling")

    def matrix(self, word) -> np.ndarray:
        A = np.eye(3)
        for x in word:
            A = A @ self.mats[x]
        return A

    def point(self, word) -> np.ndarray:
        return self.matrix(word)[:, 2]

    def cosh_norm(self, word) -> float:
        """cosh of the distance the word moves the base vertex (exact enough at any length)."""
        word = free_reduce(word)
        if len(word) <= 10:
            return float(self.matrix(word)[2, 2])
        # entries grow like exp(length * edge); carry enough digits to cancel them
        with mpmath.workdps(20 + int(len(word) * self.edge / 2.3)):
            A = mpmath.eye(3)
            for x in word:
                A = A * self._mp(x)
            return float(A[2, 2])

    def _mp(self, x):
        if x not in self._mp_cache:
            self._mp_cache[x] = self._mp_letter(x)
        return self._mp_cache[x]

    def _mp_letter(self, y):
        m = self.G.num_letters
        alpha = 2 * mpmath.pi / m

        def rot(t):
            return mpmath.matrix([[mpmath.cos(t), -mpmath.sin(t), 0], [mpmath.sin(t), mpmath.cos(t), 0], [0, 0, 1]])

        d = 2 * mpmath.acosh(mpmath.cos(mpmath.pi / self.p) / mpmath.sin(alpha / 2))
        boost = mpmath.matrix([[mpmath.cosh(d), 0, mpmath.sinh(d)], [0, 1, 0], [mpmath.sinh(d), 0, mpmath.cosh(d)]])
        t = self.sign * alpha
        return rot(t * self.G.pos[y]) * boost * rot(mpmath.pi - t * self.G.pos[inv(y)])

    def distance(self, u, v) -> float:
        return math.acosh(max(1.0, self.cosh_norm(tuple(inv(x) for x in reversed(u)) + tuple(v))))

    def is_identity(self, word) -> bool:
        return self.cosh_norm(word) < 1 + 1e-6

    def same(self, u, v) -> bool:
        return self.distance(u, v) < self.edge / 4


def disk(P: np.ndarray) -> np.ndarray:
    return P[..., :2] / (1.0 + P[..., 2:3])


def sphere_sizes_by_holonomy(G: GeometricPresentation, R: int) -> list[int]:
    """Sphere sizes from all freely reduced words of length <= R."""
    H = Holonomy(G)
    m = G.num_letters
    words = [()]
    pts = [H.point(())]
    lens = [0]
    frontier = [((), np.eye(3))]
    for L in range(1, R + 1):
        nxt = []
        for w, A in frontier:
            for x in range(m):
                if w and w[-1] == inv(x):
                    continue
                B = A @ H.mats[x]
                nxt.append((w + (x,), B))
                pts.append(B[:, 2])
                lens.append(L)
        frontier = nxt
    X = disk(np.array(pts))
    tree = cKDTree(X)
    parent = list(range(len(X)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # vertices of the ball lie well inside the disk; 1e-9 is far below their spacing
    for i, j in tree.query_pairs(1e-9):
        a, b = find(i), find(j)
        if a != b:
            parent[a] = b
    best: dict[int, int] = {}
    for i, L in enumerate(lens):
        r = find(i)
        best[r] = min(best.get(r, L), L)
    out = [0] * (R + 1)
    for L in best.values():
        out[L] += 1
    return out


def cannon_sphere_sizes(g: int, R: int) -> list[int]:
    """Coefficients of (1 + 2z + ... + 2z^(2g-1) + z^(2g)) / (1 - (4g-2)(z + ... + z^(2g-1)) + z^(2g))."""
    num = [1] + [2] * (2 * g - 1) + [1]
    den = [1] + [-(4 * g - 2)] * (2 * g - 1) + [1]
    a: list[int] = []
    for k in range(R + 1):
        v = num[k] if k < len(num) else 0
        for j in range(1, min(k, len(den) - 1) + 1):
            v -= den[j] * a[k - j]
        a.append(v)
    return a


@lru_cache(maxsize=None)
def reduced_words(m: int, L: int) -> tuple[tuple[int, ...], ...]:
    out = [()]
    for _ in range(L):
        out = [w + (x,) for w in out for x in range(m) if not w or w[-1] != inv(x)]
    return tuple(out)
