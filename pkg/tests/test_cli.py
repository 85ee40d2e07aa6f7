import json

import pytest

from isoamalgam.cli import main


@pytest.mark.parametrize("argv,code", [
    (["compare", "s1", "s2", "--cutoff", "4", "--tol", "1e-6"], 0),
    (["chambers", "x1_nonhomeo", "x2_nonhomeo"], 0),
    (["chambers", "x1_homeo", "x2_homeo"], 0),
    (["derive-table", "s1", "s2"], 0),
    (["commensurability"], 0),
    (["validate", "s1", "x2_sec4"], 0),
    (["spectrum", "s2", "--cutoff", "2"], 0),
    (["compare", "missing.json", "s2"], 1),
    (["validate", "s1", "--metric", "0.3,0.5"], 1),
    (["validate", "s1", "--metric", "oops"], 1),
    (["spectrum", "s1", "--bogus-flag"], 1),
    (["no-such-verb"], 1),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_mismatch_exits_2(capsys):
    # the declared systole-cut expectation is not what the data gives
    assert main(["systole-cut", "s1", "s2"]) == 2


def test_artifacts_and_manifest(tmp_path):
    out = tmp_path / "run"
    assert main(["compare", "s1", "s2", "--cutoff", "2", "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["compare_s1_s2.md", "manifest.json", "s1_spectrum.csv",
                     "s2_spectrum.csv"]
    man = json.loads((out / "manifest.json").read_text())
    assert man["verdicts"] == {"s1|s2": "equal"}
    assert man["metric"] == {"b": 0.75, "c": 0.5}
    assert len(man["complexes"]["s1"]) == 64


def test_same_parameters_give_identical_csv(tmp_path):
    for d in ("a", "b"):
        main(["spectrum", "x1_homeo", "--cutoff", "3", "--out",
              str(tmp_path / d)])
    assert (tmp_path / "a" / "x1_homeo_spectrum.csv").read_bytes() == \
        (tmp_path / "b" / "x1_homeo_spectrum.csv").read_bytes()
