import pytest
from hypothesis import given, strategies as st

from isoamalgam.block_complex import load_complex
from isoamalgam.spectrum_compare import (CONVENTION, Band, CutoffMismatch,
                                         LengthSpectrum, build_spectrum,
                                         compare)


def _spec(pairs, cutoff=5.0, name="x"):
    bands = [Band(l, m, witnesses=[f"w{l}"]) for l, m in sorted(pairs)]
    return LengthSpectrum(name, cutoff, 4, bands)


bands = st.lists(st.tuples(st.sampled_from([0.5, 1.0, 1.25, 2.0, 3.5]),
                           st.integers(1, 4)),
                 unique_by=lambda p: p[0], max_size=5)


@given(bands, bands)
def test_compare_is_symmetric(p, q):
    a, b = _spec(p, name="a"), _spec(q, name="b")
    ab, ba = compare(a, b), compare(b, a)
    assert ab.equal == ba.equal
    assert [(m.length, m.multiplicity_a, m.multiplicity_b) for m in ab.mismatches] \
        == [(m.length, m.multiplicity_b, m.multiplicity_a) for m in ba.mismatches]


@given(bands)
def test_compare_is_reflexive(p):
    assert compare(_spec(p), _spec(p)).equal


@given(bands, bands)
def test_weak_ignores_multiplicity(p, q):
    a, b = _spec(p), _spec(q)
    same_set = {l for l, _ in p} == {l for l, _ in q}
    assert compare(a, b, weak=True).equal == same_set
    if compare(a, b).equal:
        assert compare(a, b, weak=True).equal


def test_lengths_within_tolerance_match():
    a = _spec([(1.0, 2)])
    b = _spec([(1.0 + 5e-7, 2)])
    assert compare(a, b).equal
    assert not compare(a, _spec([(1.0 + 5e-6, 2)])).equal


def test_cutoffs_must_agree():
    with pytest.raises(CutoffMismatch):
        compare(_spec([], cutoff=4.0), _spec([], cutoff=5.0))


def test_csv_layout():
    cx = load_complex("s1")
    text = build_spectrum(cx, 2.0).to_csv()
    lines = text.splitlines()
    assert lines[0] == CONVENTION
    assert lines[2] == "length,multiplicity,avoids,contained,crosses,witness"
    assert lines[3].startswith("0.500000000,4,")


def test_spectrum_is_deterministic():
    cx = load_complex("s2")
    assert build_spectrum(cx, 3.0).to_csv() == build_spectrum(cx, 3.0).to_csv()


def test_bands_strictly_increasing():
    spec = build_spectrum(load_complex("x1_homeo"), 3.0)
    lengths = [b.length for b in spec.bands]
    assert all(y - x > spec.tol for x, y in zip(lengths, lengths[1:]))
    assert all(b.multiplicity >= 1 for b in spec.bands)
    assert spec.total == sum(b.multiplicity for b in spec.bands)
