import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import GEOMETRIC, XXY_FREE, load, partition
from surface_markov import _kernels_py, kernels
from surface_markov.markov import (
    BoundViolation,
    NoConvergence,
    Orientation,
    expansion_power,
    expansivity_ok,
    interval_image,
    markov_audit,
    orientation_of,
    permutation_equivalent,
    preimage_profile,
    spectral_radius,
    transition_matrix,
)

LAMBDA2 = (3 + math.sqrt(17) + math.sqrt(22 + 6 * math.sqrt(17))) / 2

IMAGES_A = [
    (1, "I_{b,2}", "I_{b,2}"),
    (2, "I_{b,3}", "I_{b,4}"),
    (3, "I_{b,5}", "I_{d^-1,7}"),
    (4, "I_{c^-1,1}", "I_{c^-1,7}"),
    (5, "I_{d,1}", "I_{b^-1,3}"),
    (6, "I_{b^-1,4}", "I_{b^-1,5}"),
    (7, "I_{b^-1,6}", "I_{b^-1,6}"),
]

_M: dict = {}


def matrix(name):
    if name not in _M:
        _M[name] = transition_matrix(partition(name))
    return _M[name]


def clockwise_labels(part, first, last):
    labels = [part.subinterval_label(i) for i in range(len(part.points))]
    i, j = labels.index(first), labels.index(last)
    N = len(labels)
    return [labels[(i + t) % N] for t in range((j - i) % N + 1)]


@pytest.mark.parametrize("j, first, last", IMAGES_A)
def test_interval_images_a(part2, j, first, last):
    a = part2.G.letter("a")
    got = sorted(part2.subinterval_label(i) for i in interval_image(part2, a, j))
    assert got == sorted(clockwise_labels(part2, first, last))


def test_row_sums(part2):
    M = matrix("genus2")
    assert M.size == 56 and M.dense().shape == (56, 56)
    r = dict(zip(M.labels, M.row_sums()))
    assert r["I_{a,4}"] == 7 and r["I_{a,1}"] == 1


def test_orientation_genus2(part2):
    for x in part2.G.order:
        assert orientation_of(part2, x, exhaustive=True) is Orientation.PRESERVING


def test_orientation_nonorientable():
    part = partition("nonorientable4_odd")
    G = part.G
    got = {x: orientation_of(part, x, exhaustive=True) for x in G.order}
    assert {x for x, o in got.items() if o is Orientation.REVERSING} == {x for x in G.order if G.chi[x] == -1}


def test_entropy_genus2():
    rep = spectral_radius(matrix("genus2"))
    assert abs(rep.lam - LAMBDA2) < 1e-9
    assert rep.h_top == pytest.approx(math.log(rep.lam), abs=0) and rep.lam >= 1


def test_small_matrices():
    assert spectral_radius(np.array([[2]])).lam == pytest.approx(2, abs=1e-12)
    P = np.eye(5, dtype=int)[[1, 2, 3, 4, 0]]
    assert spectral_radius(P).lam == pytest.approx(1, abs=1e-9)
    assert spectral_radius(np.array([[2, 1], [1, 2]])).lam == pytest.approx(3, abs=1e-9)
    assert spectral_radius(np.ones((4, 4), dtype=int)).lam == pytest.approx(4, abs=1e-9)


def test_no_convergence():
    with pytest.raises(NoConvergence) as exc:
        spectral_radius(matrix("genus2"), tol=1e-12, max_iters=2)
    assert exc.value.estimate > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**31 - 1))
def test_power_iteration_vs_eigvals(n, seed):
    rng = np.random.default_rng(seed)
    A = (rng.random((n, n)) < 0.4).astype(int)
    A[np.arange(n), (np.arange(n) + 1) % n] = 1  # a cycle makes it irreducible
    want = max(abs(np.linalg.eigvals(A)))
    assert spectral_radius(A, tol=1e-13).lam == pytest.approx(want, abs=1e-8)


def test_kernels_agree():
    M = matrix("genus2")
    ip, ix = M.csr()
    a = kernels.power_iteration(ip, ix, 1e-12, 1000)
    b = _kernels_py.power_iteration(ip, ix, 1e-12, 1000)
    assert a[1] == b[1] and abs(a[0] - b[0]) < 1e-12


@pytest.mark.parametrize("name", GEOMETRIC)
def test_markov_audit(name):
    assert markov_audit(partition(name), matrix(name)) == []


@pytest.mark.parametrize("name", GEOMETRIC)
def test_irreducible_and_expansive(name):
    M = matrix(name)
    A = M.dense().astype(bool)
    R = A | np.eye(M.size, dtype=bool)
    for _ in range(int(math.log2(M.size)) + 2):
        R = (R.astype(np.int64) @ R.astype(np.int64)) > 0
    assert R.all()
    k = expansion_power(M)
    assert expansivity_ok(M, k) and k <= max(c for _, c in partition(name).intervals.values())


@pytest.mark.parametrize("name", XXY_FREE)
def test_column_bounds(name):
    G = load(name)
    prof = preimage_profile(matrix(name), G.n)
    assert all(2 * G.n - 3 <= c <= 2 * G.n - 1 for c in prof.column_sums)
    rep = spectral_radius(matrix(name))
    assert math.log(2 * G.n - 3) <= rep.h_top <= math.log(2 * G.n - 1)


def test_genus2_types():
    G = load("genus2")
    prof = preimage_profile(matrix("genus2"), 4, {x: G.letter_name(x) for x in G.order})
    assert set(prof.column_sums) <= {5, 6, 7}
    assert all(t == (6, 7, 6) for t in prof.types.values())


def test_length_three_column():
    G = load("genus2_triangle")
    assert 2 * G.n - 3 in preimage_profile(matrix("genus2_triangle"), G.n).column_sums


def test_xxy_violates_bounds():
    G = load("nonorientable4_xxy")
    with pytest.raises(BoundViolation):
        preimage_profile(matrix("nonorientable4_xxy"), G.n)


def test_permutation_search_recovers_relabelling():
    M = matrix("genus2")
    rng = np.random.default_rng(7)
    q = rng.permutation(M.size)
    A = M.dense()
    B = np.empty_like(A)
    B[np.ix_(q, q)] = A
    from surface_markov.markov import MarkovMatrix

    Mb = MarkovMatrix(list(M.labels), [list(np.nonzero(r)[0]) for r in B], list(M.owners))
    p = permutation_equivalent(M, Mb)
    assert p is not None
    P = np.zeros_like(A)
    P[np.arange(M.size), p] = 1
    assert (P @ B @ P.T == A).all()


def test_alternate_genus2_is_not_a_relabelling():
    """Equal entropy, but tr(A^4) differs, so no index permutation can match the matrices."""
    A, B = matrix("genus2").dense(), matrix("genus2_alt").dense()
    assert np.trace(np.linalg.matrix_power(A, 4)) != np.trace(np.linalg.matrix_power(B, 4))
    assert permutation_equivalent(matrix("genus2"), matrix("genus2_alt")) is None
    assert abs(spectral_radius(matrix("genus2")).lam - spectral_radius(matrix("genus2_alt")).lam) < 1e-9


def test_genus2_m2_expansive():
    assert expansivity_ok(matrix("genus2"), 2)


def test_genus3_needs_more_iterates():
    M = matrix("genus3")
    assert not expansivity_ok(M, 2) and expansion_power(M) > 2
