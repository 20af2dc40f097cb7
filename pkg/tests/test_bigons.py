import itertools
import json

import numpy as np
import pytest
from scipy.spatial import cKDTree

from conftest import GEOMETRIC, load
from oracles import Holonomy, disk
from surface_markov.bigons import bigon_ray, corner_step, minimal_bigon
from surface_markov.cayley import canonical_form, rewrite_system
from surface_markov.presentation import inverse_word


def word(G, text):
    return G.parse_word(text)


def test_genus2_left_end_of_a(g2):
    c = g2.corner_of(g2.letter("d"), g2.letter("a"))
    b = minimal_bigon(g2, c)
    assert b.length == 4 and b.completion == ()
    assert b.side(g2.letter("a")) == word(g2, "a b a^-1 b^-1")
    assert g2.corner_name(b.top) == "(b,c)"


@pytest.mark.parametrize("name", GEOMETRIC)
def test_parity_law(name):
    G = load(name)
    for c in range(G.num_letters):
        b = minimal_bigon(G, c)
        r, _ = G.relation_of_corner(c)
        L = len(G.relations[r])
        assert (b.completion == ()) == (L % 2 == 0)
        if L % 2 == 0:
            assert b.length == L // 2
        assert len(b.left_path) == len(b.right_path) >= -(-min(len(w) for w in G.relations) // 2)
        k = G.corners[c]
        assert b.left_path[0] == k.left and b.right_path[0] == k.right


@pytest.mark.parametrize("name", GEOMETRIC)
def test_paths_avoid_dehn_windows(name):
    G = load(name)
    windows = [(l, set(t)) for l, t in rewrite_system(G).dehn.items()]
    for c in range(G.num_letters):
        b = minimal_bigon(G, c)
        for p in (b.left_path, b.right_path):
            assert all(p[i + 1] != p[i] ^ 1 for i in range(len(p) - 1))
            for l, keys in windows:
                assert not any(p[i : i + l] in keys for i in range(len(p) - l + 1))


@pytest.mark.parametrize("name", GEOMETRIC)
def test_deterministic(name):
    G = load(name)
    a = [minimal_bigon(G, c) for c in range(G.num_letters)]
    b = [minimal_bigon(G, c) for c in range(G.num_letters)]
    assert a == b


def _ball(H, G, radius):
    """Words of length <= radius with their base-vertex images, grown incrementally."""
    words, pts = [()], [H.point(())]
    frontier = [((), np.eye(3))]
    for _ in range(radius):
        nxt = []
        for w, A in frontier:
            for x in range(G.num_letters):
                if w and w[-1] == x ^ 1:
                    continue
                B = A @ H.mats[x]
                nxt.append((w + (x,), B))
                words.append(w + (x,))
                pts.append(B[:, 2])
        frontier = nxt
    return disk(np.array(pts)), words


@pytest.mark.parametrize("name", ["genus2", "genus3", "genus2_odd"])
def test_bigons_against_holonomy(name):
    """Sides meet, stay geodesic, share no interior vertex, and nothing shorter closes."""
    G = load(name)
    H = Holonomy(G)
    n_max = max(minimal_bigon(G, c).length for c in range(G.num_letters))
    pts, words = _ball(H, G, n_max - 1)
    lens = np.array([len(w) for w in words])
    first = np.array([w[0] if w else -1 for w in words])
    trees = {L: cKDTree(pts[lens <= L]) for L in range(n_max)}
    for c in range(G.num_letters):
        b = minimal_bigon(G, c)
        n = b.length
        assert H.same(b.left_path, b.right_path)
        for p in (b.left_path, b.right_path):
            assert trees[n - 1].query(disk(H.point(p)))[0] > 1e-9
        inner = [{tuple(np.round(disk(H.point(p[:i])), 9)) for i in range(1, n)} for p in (b.left_path, b.right_path)]
        assert not inner[0] & inner[1]
        k = G.corners[c]
        for L in range(2, n):
            sel = lens == L
            geo = trees[L - 1].query(pts[sel])[0] > 1e-9
            cand = pts[sel][geo]
            f = first[sel][geo]
            A, B = cand[f == k.left], cand[f == k.right]
            hits = cKDTree(A).query_ball_point(B, 1e-9)
            assert not any(hits), f"shorter bigon of length {L} at corner {G.corner_name(c)}"


@pytest.mark.parametrize("name", GEOMETRIC)
def test_corner_step_rho(name):
    G = load(name)
    m = G.num_letters
    for c in range(m):
        seen, cur = [], c
        while cur not in seen:
            seen.append(cur)
            cur = corner_step(G, cur)
        assert len(seen) <= m
        ray = bigon_ray(G, c)
        assert len(ray.preperiod) + len(ray.period) <= m and len(ray.period) >= 1
        for k in range(3 * m):
            assert ray.corner_at(k + 1) == G.opposite_corner(minimal_bigon(G, ray.corner_at(k)).top)
        assert bigon_ray(G, c) == ray


def test_corner_step_example(g2):
    c = g2.corner_of(g2.letter("d"), g2.letter("a"))
    bc = g2.corner_of(g2.letter("b"), g2.letter("c"))
    assert corner_step(g2, c) == g2.opposite_corner(bc)


def test_ray_expansion(g2):
    c = g2.corner_of(g2.letter("d"), g2.letter("a"))
    ray = bigon_ray(g2, c)
    assert ray.expand(g2, 4, "right")[:4] == word(g2, "a b a^-1 b^-1") or ray.expand(g2, 4, "left") == word(g2, "a b a^-1 b^-1")
    bounds = ray.boundaries(g2, 5)
    for sides in ("left", "right"):
        w = ray.expand(g2, bounds[-1], sides)
        assert len(w) == bounds[-1]


@pytest.mark.parametrize("c", range(8))
def test_ray_sides_stay_close(g2, c):
    ray = bigon_ray(g2, c)
    width = max(minimal_bigon(g2, k).length for k in range(8))
    L = ray.expand(g2, 12, "left")
    R = ray.expand(g2, 12, "right")
    for k in range(1, 13):
        gap = canonical_form(g2, inverse_word(L[:k]) + R[:k])
        assert len(gap) <= width
    for k in ray.boundaries(g2, 3):
        assert canonical_form(g2, L[:k]) == canonical_form(g2, R[:k])


@pytest.mark.parametrize("name", GEOMETRIC)
def test_mixed_sides_are_geodesic_words(name):
    G = load(name)
    for c in range(G.num_letters):
        ray = bigon_ray(G, c)
        for sides in itertools.product(("left", "right"), repeat=3):
            w = ray.expand(G, 3 * max(len(r) for r in G.relations), list(sides))
            assert all(w[i + 1] != w[i] ^ 1 for i in range(len(w) - 1))


def test_json(g2):
    d = json.loads(minimal_bigon(g2, 0).to_json(g2))
    assert set(d) == {"bottom", "top", "left_path", "right_path", "completion"}
    assert d["completion"] == []


def test_odd_completion_present():
    G = load("genus2_odd")
    assert all(minimal_bigon(G, c).completion for c in range(G.num_letters))
