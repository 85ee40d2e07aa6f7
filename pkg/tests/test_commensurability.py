import math
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from isoamalgam.block_complex import load_complex
from isoamalgam.commensurability import (ChamberVector, CoverSpec,
                                         chamber_vector, load_cover,
                                         ratio_test, validate_cover, volume)


@pytest.mark.parametrize("name,want", [("x1_sec4", "{-12x6, -6x12}"),
                                       ("x2_sec4", "{-10x9, -6x9}")])
def test_bundled_covers(name, want):
    r = validate_cover(load_cover(name))
    assert r.ok, r.problems
    assert str(r.chambers) == want
    # chi multiplies by the degree
    assert sum(r.chambers.values) == 6 * sum(r.base_chambers.values) == -144


def _mutations(spec):
    for i, p in enumerate(spec.pieces):
        for field in ("count", "degree"):
            for step in (-1, 1):
                val = getattr(p, field) + step
                if val < 1:
                    continue
                pieces = list(spec.pieces)
                pieces[i] = replace(p, **{field: val})
                yield f"{field}[{i}]{step:+d}", CoverSpec(
                    spec.complex_name, spec.degree, pieces)
        for k in (0, 1):
            for step in (-1, 1):
                cover = list(p.cover)
                cover[k] += step
                if cover[k] < 0:
                    continue
                pieces = list(spec.pieces)
                pieces[i] = replace(p, cover=tuple(cover))
                yield f"cover[{i}][{k}]{step:+d}", CoverSpec(
                    spec.complex_name, spec.degree, pieces)
    for step in (-1, 1):
        yield f"degree{step:+d}", CoverSpec(spec.complex_name,
                                            spec.degree + step, spec.pieces)


@pytest.mark.parametrize("name", ["x1_sec4", "x2_sec4"])
def test_every_single_mutation_rejected(name):
    spec = load_cover(name)
    cx = load_complex(name)
    seen = 0
    for label, bad in _mutations(spec):
        assert not validate_cover(bad, cx).ok, label
        seen += 1
    assert seen >= 10


def test_cover_round_trip():
    spec = load_cover("x2_sec4")
    assert load_cover(spec.to_dict()) == spec


def test_bundled_cover_vectors_not_compatible():
    a = validate_cover(load_cover("x1_sec4")).chambers
    b = validate_cover(load_cover("x2_sec4")).chambers
    r = ratio_test(a, b)
    assert r.verdict == "not-compatible"
    assert (r.ratios[0], r.ratios[-1]) == (Fraction(6, 5), Fraction(1))


vectors = st.lists(st.integers(-20, -1), min_size=1, max_size=8)


@given(vectors)
def test_reflexive(v):
    r = ratio_test(ChamberVector.of(v), ChamberVector.of(v))
    assert r.compatible and set(r.ratios) == {1}


@given(vectors, st.integers(2, 5))
def test_scaling(v, k):
    r = ratio_test(ChamberVector.of([k * x for x in v]), ChamberVector.of(v))
    assert r.compatible and set(r.ratios) == {k}


@given(vectors, vectors)
def test_symmetric_up_to_inversion(v, w):
    if len(v) != len(w):
        with pytest.raises(ValueError):
            ratio_test(ChamberVector.of(v), ChamberVector.of(w))
        return
    r1 = ratio_test(ChamberVector.of(v), ChamberVector.of(w))
    r2 = ratio_test(ChamberVector.of(w), ChamberVector.of(v))
    assert r1.compatible == r2.compatible
    assert r1.ratios == [1 / q for q in r2.ratios]


def test_non_hyperbolic_entries_rejected():
    with pytest.raises(ValueError):
        ChamberVector.of([-2, 0])


@pytest.mark.parametrize("name,units", [("s1", 16), ("x1_homeo", 16),
                                        ("x1_sec4", 48), ("x2_sec4", 48)])
def test_volume(name, units):
    assert volume(load_complex(name)) == units * math.pi


@pytest.mark.parametrize("name", ["x1_sec4", "x2_sec4"])
def test_base_chamber_sum(name):
    assert sum(chamber_vector(load_complex(name)).values) == -24
