import pytest
from hypothesis import given, strategies as st

import oracles
from isoamalgam.block_complex import BUNDLED, load_complex
from isoamalgam.geodesic_enumerator import (AxisMiss, Geometry,
                                            accepted_geodesics,
                                            crossing_bound,
                                            enumerate_geodesics,
                                            is_primitive_word, least_rotation,
                                            straighten)
from isoamalgam.hyperbolic_kernel import NonHyperbolic
from isoamalgam.reports import _class_lengths


@given(st.lists(st.integers(0, 3), min_size=1, max_size=12),
       st.integers(0, 20))
def test_least_rotation_is_rotation_invariant(t, k):
    t = tuple(t)
    k %= len(t)
    r = least_rotation(t)
    assert r == least_rotation(t[k:] + t[:k])
    assert r == min(t[j:] + t[:j] for j in range(len(t)))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=6),
       st.integers(2, 4))
def test_powers_are_not_primitive(t, p):
    assert not is_primitive_word(tuple(t) * p)


@pytest.mark.parametrize("t,want", [((1,), True), ((1, 2), True),
                                    ((1, 1), False), ((1, 2, 1, 2), False),
                                    ((1, 2, 1, 3), True)])
def test_primitive_examples(t, want):
    assert is_primitive_word(t) is want


def _brute_lengths(cx, n):
    geo = Geometry(cx)
    out = []
    for t in oracles.brute_words(cx, geo, n):
        try:
            out.append(straighten(t, cx, geo))
        except (NonHyperbolic, AxisMiss):
            continue
    return _class_lengths(out)


@pytest.mark.parametrize("name", BUNDLED)
def test_pruned_search_matches_brute_force(name):
    cx = load_complex(name)
    n = 3 if cx.block_count > 8 else 4
    pruned = accepted_geodesics(cx, n)
    assert _class_lengths(pruned) == _brute_lengths(cx, n)


@pytest.mark.parametrize("name", ["s1", "s2"])
def test_systole_band(name):
    cx = load_complex(name)
    cat = enumerate_geodesics(cx, 1.01 * cx.c)
    assert [round(k.length, 9) for k in cat.classes] == [round(cx.c, 9)] * 4


@pytest.mark.parametrize("name", ["s1", "x1_homeo"])
def test_lengths_agree_with_holonomy_trace(name):
    cx = load_complex(name)
    for k in enumerate_geodesics(cx, 6 * cx.c, 6).classes:
        g = k.representative
        if g.holonomy is None:
            continue
        h = g.holonomy
        assert oracles.translation_length([[h.a, h.b], [h.c, h.d]]) == \
            pytest.approx(g.length, abs=1e-9)


def test_crossing_bound_grows_with_cutoff():
    cx = load_complex("s1")
    assert crossing_bound(cx, 2.0) <= crossing_bound(cx, 4.0)


def test_cutoff_must_be_positive():
    with pytest.raises(ValueError):
        enumerate_geodesics(load_complex("s1"), 0.0)


def test_worker_count_does_not_change_output():
    cx = load_complex("s2")
    one = enumerate_geodesics(cx, 6 * cx.c, 6, workers=1)
    two = enumerate_geodesics(cx, 6 * cx.c, 6, workers=2)
    assert [(round(k.length, 12), k.witness) for k in one.classes] == \
        [(round(k.length, 12), k.witness) for k in two.classes]


@pytest.mark.parametrize("name", ["s1", "x2_homeo"])
def test_below_systole_nothing(name):
    cx = load_complex(name)
    assert enumerate_geodesics(cx, 0.99 * cx.c).classes == []


def _reverse(t):
    return tuple((x, e) for e, x in reversed(t))


@pytest.mark.parametrize("name", ["s1", "x1_nonhomeo"])
def test_reversed_and_rotated_words_have_equal_length(name):
    cx = load_complex(name)
    geo = Geometry(cx)
    for g in accepted_geodesics(cx, 4)[:60]:
        t = g.word.traversals
        tol = 1e-9
        assert straighten(_reverse(t), cx, geo).length == \
            pytest.approx(g.length, abs=tol)
        assert straighten(t[1:] + t[:1], cx, geo).length == \
            pytest.approx(g.length, abs=tol)


def test_iterates_are_not_primitive():
    cx = load_complex("s1")
    geo = Geometry(cx)
    g = accepted_geodesics(cx, 3)[0]
    sq = straighten(g.word.traversals * 2, cx, geo)
    assert sq.length == pytest.approx(2 * g.length, abs=1e-8)
    assert not is_primitive_word(g.word.traversals * 2)


# a long closed word of x1_nonhomeo that passes through a block vertex
GRAZING = ((4, 1), (39, 35), (37, 36), (4, 1), (39, 36), (8, 9), (15, 13),
           (43, 41), (47, 40))


def test_vertex_grazing_word_straightens_from_every_rotation():
    cx = load_complex("x1_nonhomeo")
    geo = Geometry(cx)
    base = straighten(GRAZING, cx, geo)
    assert base.vertex_grazing
    for k in range(1, len(GRAZING)):
        g = straighten(GRAZING[k:] + GRAZING[:k], cx, geo)
        assert g.length == pytest.approx(base.length, abs=1e-9)
