import pytest
from hypothesis import given, settings, strategies as st

from conftest import XXY_FREE, fixture_text, load
from surface_markov import markov
from surface_markov.partition import build_partition
from surface_markov.presentation import canonical_relation, cyclic_reduce, inv, load_presentation
from surface_markov.reduction import (
    dehn_twist,
    find_xxy,
    reduce,
    remove_length2,
    same_relators,
    substitute,
)


def h_top(P):
    M = markov.transition_matrix(build_partition(P, allow_length_two=True))
    return markov.spectral_radius(M).h_top


@pytest.fixture(scope="module")
def xxy():
    return load("nonorientable4_xxy")


@pytest.fixture(scope="module")
def chain(xxy):
    return reduce(xxy, entropy=h_top)


def test_fixture_is_certified(xxy):
    assert "xxy" in xxy.flags and not xxy.orientable
    hits = find_xxy(xxy)
    assert len(hits) == 1
    assert (xxy.letter_name(hits[0].x), xxy.letter_name(hits[0].y)) == ("x", "y")


def test_find_xxy_sees_rotations():
    P = load_presentation("generators: x y a b c\nrelation: y x x\nrelation: y^-1 a b a^-1 b^-1 c c\n", allow_length_two=True)
    (hit,) = find_xxy(P)
    assert P.letter_name(hit.x) == "x" and P.letter_name(hit.y) == "y"


@pytest.mark.parametrize("name", XXY_FREE)
def test_xxy_free_chain_is_trivial(name):
    G = load(name)
    assert find_xxy(G) == []
    ch = reduce(G)
    assert len(ch.stages) == 1 and ch.final is G


def test_twist_round_trip(xxy):
    step = dehn_twist(xxy, find_xxy(xxy)[0])
    assert same_relators(step.inverse_relations(), xxy.relations)
    assert step.after.n == xxy.n
    assert any(len(w) == 2 for w in step.after.relations)


def test_removal_drops_a_generator(chain, xxy):
    assert [s.presentation.n for s in chain.stages] == [xxy.n, xxy.n, xxy.n - 1]
    final = chain.final
    assert find_xxy(final) == []
    assert len(final.relations) == 1 and len(final.relations[0]) == 8


def test_removal_needs_length_two(xxy):
    with pytest.raises(ValueError):
        remove_length2(xxy)


def test_final_is_standard_nonorientable_genus4(chain):
    ref = load_presentation("generators: x a b c\nrelation: x x a b a^-1 b^-1 c c\n")
    assert same_relators(chain.final.relations, ref.relations)


def test_entropy_across_twist_and_removal(chain):
    h = [s.h_top for s in chain.stages]
    assert all(s.error is None for s in chain.stages)
    assert h[1] <= h[0] + 1e-12
    assert abs(h[2] - h[1]) < 2e-9


def test_final_stage_within_bounds(chain):
    import math

    P = chain.final
    assert math.log(2 * P.n - 3) <= chain.stages[-1].h_top <= math.log(2 * P.n - 1)
    prof = markov.preimage_profile(markov.transition_matrix(build_partition(P)), P.n)
    assert set(prof.types.values()) == {(6, 7, 6)}


def test_twisted_letters_shed_preimages(chain):
    """Letters untouched by the twist keep a (c-1, c, c-1) run type after it."""
    stages = chain.stages
    prof = [
        markov.preimage_profile(markov.transition_matrix(build_partition(s.presentation, allow_length_two=True)), s.presentation.n, check=False)
        for s in stages
    ]
    assert max(prof[0].column_sums) - max(prof[1].column_sums) == 2
    assert max(prof[1].column_sums) == max(prof[2].column_sums)


def test_json_lists_every_stage(chain):
    import json

    data = json.loads(chain.to_json())
    assert [d["stage"] for d in data] == ["input", "twist 1", "removal 1"]
    assert all(load_presentation(d["presentation"], allow_length_two=True) for d in data)


words = st.lists(st.integers(0, 5), min_size=1, max_size=30)


@settings(max_examples=300, deadline=None)
@given(st.lists(words, min_size=1, max_size=4))
def test_substitution_inverts(rels):
    # y = letter 2 and x = letter 0, as in a twist y -> z x^-1 with z in y's slot
    y, x = 2, 0
    z = y
    fwd = {y: (z, inv(x)), inv(y): (x, inv(z))}
    back = {z: (y, x), inv(z): (inv(x), inv(y))}
    out = substitute(substitute(rels, fwd), back)
    assert [canonical_relation(w) if w else () for w in out] == [
        canonical_relation(cyclic_reduce(w)) if cyclic_reduce(w) else () for w in rels
    ]


def test_fixture_text_parses_with_flag():
    assert "relation: x x y" in fixture_text("nonorientable4_xxy")
