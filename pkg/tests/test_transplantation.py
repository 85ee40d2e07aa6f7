import pytest
from hypothesis import given, settings, strategies as st

from isoamalgam import reports
from isoamalgam.block_complex import load_complex
from isoamalgam.geodesic_enumerator import (Geometry, enumerate_geodesics,
                                            enumerate_words,
                                            least_rotation, straighten)
from isoamalgam.transplantation import (NotCrossing, beta_decomposition,
                                        check_bijection, count_identical,
                                        derive_transition_table, end_parities,
                                        epsilon_offsets, gluing_correspondence,
                                        initial_offset, closed_case_formula,
                                        start_block, transplant_amalgam,
                                        transplant_word, translated_copies)


@pytest.fixture(scope="module")
def buser():
    s1, s2 = reports.load_pair("buser")
    c1 = enumerate_geodesics(s1, 8 * s1.c, 8)
    c2 = enumerate_geodesics(s2, 8 * s2.c, 8)
    w1 = [e.word for k in c1.classes for e in k.encodings if e.word]
    w2 = [e.word for k in c2.classes for e in k.encodings if e.word]
    return s1, s2, w1, w2


@pytest.fixture(scope="module")
def table():
    return derive_transition_table(reports.load_pair("buser"))


@pytest.mark.parametrize("state,new", [(("a", 0), 4), (("a", 2), 6),
                                       (("a", 1), 1), (("a", 7), 7),
                                       (("c", 6), 6), (("c", 3), 3),
                                       (("b", 0), 0), (("b", 4), 4),
                                       (("b", 2), 6), (("b", 6), 2)])
def test_transition_rules(table, state, new):
    assert table.rules[state] == new


def test_table_matches_stated_cases(table):
    assert table.stated_rule_mismatches() == []
    assert not table.unreachable


@pytest.mark.parametrize("n_a,n_b,block,start", [(2, 5, 3, 3), (1, 2, 3, 4),
                                                 (1, 1, 7, 1), (0, 0, 8, 8),
                                                 (3, 3, 8, 2)])
def test_initiation(n_a, n_b, block, start):
    assert start_block(block, initial_offset(n_a, n_b)) == start


@given(st.integers(0, 40), st.integers(0, 40))
def test_initial_offset_depends_on_parities(n_a, n_b):
    assert initial_offset(n_a, n_b) == initial_offset(n_a % 2, n_b % 2)


def test_bijection_and_lengths(buser):
    s1, s2, w1, w2 = buser
    assert check_bijection(w1, s1, s2, w2).ok
    assert check_bijection(w2, s2, s1, w1).ok
    g1, g2 = Geometry(s1), Geometry(s2)
    for w in w1:
        out = transplant_word(w, s1, s2)
        assert abs(straighten(w, s1, g1).length
                   - straighten(out, s2, g2).length) < 1e-9


def test_round_trip(buser):
    s1, s2, w1, _ = buser
    for w in w1:
        back = transplant_word(transplant_word(w, s1, s2), s2, s1,
                               reverse=True)
        assert least_rotation(back.traversals) == least_rotation(w.traversals)


def test_closed_surface_words_do_not_cross(buser):
    s1, _, w1, _ = buser
    with pytest.raises(NotCrossing):
        beta_decomposition(w1[0], s1)
    # without a branch locus a segment is only congruent to itself
    seg = w1[0].traversals[:1]
    assert translated_copies(seg, s1) == [seg]


def _segments(kind, multiple):
    a, _ = reports.load_pair(kind)
    cat = enumerate_geodesics(a, multiple * a.c, 8)
    return a, [bt for k in reports.crossing_representatives(cat, a)
               for bt in beta_decomposition(k.representative.word, a)]


@pytest.fixture(scope="module")
def homeo_segments():
    return _segments("homeo", 8)


@pytest.fixture(scope="module")
def nonhomeo_segments():
    return _segments("nonhomeo", 12)


def test_homeo_segments_have_one_translate(homeo_segments):
    a, segs = homeo_segments
    assert segs
    for bt in segs:
        assert len(translated_copies(bt, a)) == 2
        assert epsilon_offsets(bt, a) == [(4, 4)]


def test_nonhomeo_segments_have_four_translates(nonhomeo_segments):
    a, segs = nonhomeo_segments
    assert segs
    for bt in segs:
        assert len(translated_copies(bt, a)) == 4
        assert sorted(epsilon_offsets(bt, a)) == [(2, 2), (4, 4), (6, 6)]
        assert end_parities(bt, a) == {0}


@pytest.mark.parametrize("k,c_mid,f1,f2,want", [
    (2, [2], False, False, 8), (2, [2], True, False, 4),
    (2, [2], True, True, 4), (4, [3], False, False, 48),
    (4, [3], True, False, 36), (4, [3], True, True, 27), (3, [1], False, False, None)])
def test_closed_forms(k, c_mid, f1, f2, want):
    assert closed_case_formula(k, c_mid, f1, f2)[0] == want


@pytest.mark.parametrize("kind,multiple", [("homeo", 8), ("nonhomeo", 12)])
def test_counts_agree_between_partners(kind, multiple):
    a, b = reports.load_pair(kind)
    cat = enumerate_geodesics(a, multiple * a.c, 8)
    reps = reports.crossing_representatives(cat, a)
    assert reps
    for k in reps[:10]:
        w = k.representative.word
        assert count_identical(w, a).count == count_identical(w, b, source=a).count


@pytest.fixture(scope="module")
def sec4():
    x1, x2 = reports.load_pair("sec4")
    return x1, x2, enumerate_geodesics(x1, 6 * x1.c, 6)


def test_gluing_correspondence_is_a_bijection(sec4):
    x1, x2, _ = sec4
    phi = gluing_correspondence(x1, x2)
    assert set(phi.mapping) == set(x1.branch_side_ends)
    assert set(phi.mapping.values()) == set(x2.branch_side_ends)


def test_amalgam_delegates_words_off_the_branch(sec4):
    x1, x2, _ = sec4
    inside = [w for w in enumerate_words(x1, 3)
              if not any(x1.is_branch(x) for _, x in w.traversals)]
    assert inside
    for w in inside[:20]:
        r = transplant_amalgam(w, x1, x2)
        assert r.delegated and not r.segments


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_amalgam_transplant_preserves_length(sec4, data):
    x1, x2, cat = sec4
    words = reports.transversal_words(cat, x1)
    w = data.draw(st.sampled_from(words))
    try:
        r = transplant_amalgam(w, x1, x2)
    except Exception as exc:          # NoValidCopy is a documented outcome
        assert type(exc).__name__ == "NoValidCopy"
        return
    g1, g2 = Geometry(x1), Geometry(x2)
    assert abs(straighten(w, x1, g1).length
               - straighten(r.word, x2, g2).length) < 1e-9
