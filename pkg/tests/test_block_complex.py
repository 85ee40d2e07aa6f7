import copy
import json

import pytest
from hypothesis import given, strategies as st

from isoamalgam.block_complex import (BUNDLED, DATA_DIR, ComplexValidationError,
                                      complex_from_dict, complex_to_dict,
                                      load_complex, wrap_block)

EULER = {"s1": -8, "s2": -8, "x1_homeo": -8, "x2_homeo": -8,
         "x1_nonhomeo": -8, "x2_nonhomeo": -8, "x1_sec4": -24, "x2_sec4": -24}

CHAMBERS = {
    "x1_homeo": [(3, 4)],
    "x2_homeo": [(3, 4)],
    "x1_nonhomeo": [(1, 4), (1, 4)],
    "x2_nonhomeo": [(1, 8)],
    "x1_sec4": [(1, 2)] * 6 + [(2, 2)] * 3,
    "x2_sec4": [(1, 1)] * 3 + [(1, 2)] * 3 + [(2, 3)] * 3,
}


def _doc(name):
    return json.loads((DATA_DIR / f"{name}.json").read_text())


@pytest.mark.parametrize("name", BUNDLED)
def test_euler_characteristic(name):
    # 2 - 2g per closed surface of 8 right-angled octagons: chi = -#blocks
    cx = load_complex(name)
    assert cx.euler_characteristic == EULER[name] == -cx.block_count


@pytest.mark.parametrize("name", BUNDLED)
def test_round_trip(name):
    cx = load_complex(name)
    assert complex_from_dict(complex_to_dict(cx)) == cx


@pytest.mark.parametrize("name", sorted(CHAMBERS))
def test_chambers(name):
    cx = load_complex(name)
    assert cx.chambers() == sorted(CHAMBERS[name])
    # chambers partition the complex, so their Euler characteristics add up
    assert sum(2 - 2 * g - b for g, b in cx.chambers()) == cx.euler_characteristic


@pytest.mark.parametrize("name", ["s1", "s2"])
def test_closed_surface_has_no_chambers(name):
    with pytest.raises(ComplexValidationError):
        load_complex(name).chambers()


@pytest.mark.parametrize("name", ["s1", "s2"])
def test_four_combinatorial_systoles(name):
    assert len(load_complex(name).combinatorial_systoles()) == 4


def test_partner_is_an_involution():
    cx = load_complex("s1")
    for e in range(cx.side_end_count):
        assert cx.partner(cx.partner(e)) == e


@pytest.mark.parametrize("name", ["x1_homeo", "x1_sec4", "x2_sec4"])
def test_branch_side_ends_have_several_crossings(name):
    cx = load_complex(name)
    for e in cx.branch_side_ends:
        assert len(cx.crossing_options(e)) >= 2
        assert cx.bundle_sign(e) is not None


def _drop_pairing(doc):
    doc["pairings"].pop()


def _no_cells(doc):
    doc["cells"] = []


def _bad_metric(doc):
    doc["metric"] = {"b": 0.4, "c": 0.6}


def _duplicate_cell(doc):
    doc["cells"].append(doc["cells"][0])


def _bad_side(doc):
    doc["pairings"][0]["end_a"][-1] = "Z-side"


def _wrong_euler(doc):
    doc["euler_characteristic"] = -6


def _bad_arc_direction(doc):
    doc["gluing_classes"][0]["members"][0][0][-1] = "?"


@pytest.mark.parametrize("mutate", [_drop_pairing, _no_cells, _bad_metric,
                                    _duplicate_cell, _bad_side, _wrong_euler,
                                    _bad_arc_direction])
def test_invalid_documents_rejected(mutate):
    doc = copy.deepcopy(_doc("x1_homeo"))
    mutate(doc)
    with pytest.raises(ComplexValidationError):
        complex_from_dict(doc)


def test_missing_file():
    with pytest.raises(ComplexValidationError):
        load_complex("no_such_complex.json")


def test_metric_override():
    cx = load_complex("s1", (0.8, 0.45))
    assert (cx.b, cx.c) == (0.8, 0.45)


@given(st.integers(-50, 50))
def test_wrap_block_range(n):
    w = wrap_block(n)
    assert 1 <= w <= 8 and (w - n) % 8 == 0
