"""Reproduction checks over the bundled complexes.

Each check computes a dictionary of observations.  Expected values live in
data/expectations.json and are compared key by key, so what is claimed and
what is computed stay separate.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Callable, Iterator

from . import commensurability as cm
from .block_complex import BUNDLED, DATA_DIR, BlockComplex, load_complex
from .geodesic_enumerator import (AxisMiss, Catalog, CrossingWord, Geometry,
                                  accepted_geodesics, enumerate_geodesics,
                                  enumerate_words, group_encodings,
                                  is_primitive_word, least_rotation,
                                  straighten)
from .hyperbolic_kernel import NonHyperbolic, solve_block
from .spectrum_compare import compare, spectrum_from_catalog
from .transplantation import (ClosureFailure, NoValidCopy, NotCrossing,
                              _admissible, _geometry, beta_decomposition,
                              check_bijection, count_identical,
                              translated_copies, transplant_amalgam,
                              transplant_word)

DEFAULT_METRIC = (0.75, 0.5)
PERTURBED_METRIC = (0.8, 0.45)
EXPECTATIONS = DATA_DIR / "expectations.json"


def load_pair(kind: str, metric=DEFAULT_METRIC
              ) -> tuple[BlockComplex, BlockComplex]:
    if kind == "buser":
        return load_complex("s1", metric), load_complex("s2", metric)
    return (load_complex(f"x1_{kind}", metric),
            load_complex(f"x2_{kind}", metric))


def file_hash(name: str) -> str:
    path = DATA_DIR / f"{name}.json"
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ------------------------------------------------------------- helpers
def transversal_words(cat: Catalog, cx: BlockComplex) -> list[CrossingWord]:
    """Words of every encoding of every class that crosses the branch."""
    out = []
    for k in cat.classes:
        for g in k.encodings:
            if g.word is None:
                continue
            try:
                beta_decomposition(g.word, cx)
            except NotCrossing:
                continue
            out.append(g.word)
    return out


def crossing_representatives(cat: Catalog, cx: BlockComplex) -> list:
    out = []
    for k in cat.classes:
        g = k.representative
        if g.word is None or k.profile != "crosses":
            continue
        try:
            beta_decomposition(g.word, cx)
        except NotCrossing:
            continue
        out.append(k)
    return out


def segment_pool(cat: Catalog, cx: BlockComplex) -> list[tuple]:
    """All translated copies of the branch segments of crossing words."""
    pool = set()
    for w in transversal_words(cat, cx):
        for b in beta_decomposition(w, cx):
            pool.update(translated_copies(b, cx, same_endpoints=False))
    return sorted(pool)


def composed_words(cx: BlockComplex, pool: list[tuple], n_segments: int
                   ) -> Iterator[tuple]:
    """Closed geodesic words made of n admissible segment copies.

    Words are produced once (least rotation) in a deterministic order and
    only if they straighten to a closed geodesic.
    """
    geo = _geometry(cx)
    rels = ("preserving", "reversing")

    def joins(a, b):
        return any(_admissible(cx, geo, a[-1][1], b[0][0], r) for r in rels)

    adj = {a: [b for b in pool if joins(a, b)] for a in pool}
    seen = set()

    def cycles(path):
        if len(path) == n_segments:
            if joins(path[-1], path[0]):
                yield path
            return
        for b in adj[path[-1]]:
            yield from cycles(path + [b])

    for s in pool:
        for combo in cycles([s]):
            t = tuple(x for seg in combo for x in seg)
            if not is_primitive_word(t):
                continue
            key = least_rotation(t)
            if key in seen:
                continue
            seen.add(key)
            try:
                straighten(t, cx, geo)
            except (NonHyperbolic, AxisMiss):
                continue
            yield key


def find_configuration(cx: BlockComplex, pool: list[tuple], case: int,
                       n_segments: int = 3, c2: int = 2):
    """First composed geodesic with the given case and c_2 value."""
    for t in composed_words(cx, pool, n_segments):
        r = count_identical(t, cx)
        if r.case == case and r.c_formula and r.c_formula[0] == c2:
            return t, r
    return None


def amalgam_transplant_summary(words: list[CrossingWord], a: BlockComplex,
                               b: BlockComplex, reverse: bool = False
                               ) -> dict:
    geo = _geometry(b)
    ok = failed = length_errors = 0
    images: dict[tuple, set] = {}
    failures = []
    for w in words:
        try:
            r = transplant_amalgam(w, a, b, reverse=reverse)
        except (NoValidCopy, ClosureFailure) as exc:
            failed += 1
            failures.append(f"{' '.join(f'{e}>{x}' for e, x in w.traversals)}"
                            f": {exc}")
            continue
        try:
            la = straighten(w, a, _geometry(a)).length
            lb = straighten(r.word, b, geo).length
        except (NonHyperbolic, AxisMiss):
            la, lb = 0.0, math.inf
        if abs(la - lb) > 1e-9:
            length_errors += 1
        else:
            ok += 1
        images.setdefault(least_rotation(r.word.traversals), set()).add(
            least_rotation(w.traversals))
    collisions = sorted(sorted(v) for v in images.values() if len(v) > 1)
    return {"words": len(words), "ok": ok, "failed": failed,
            "length_errors": length_errors, "collisions": len(collisions),
            "witness": [list(map(list, t)) for t in collisions[0]]
            if collisions else None, "failures": failures[:5]}


def _not_geodesic(words, cx: BlockComplex) -> int:
    """How many of the words fail to straighten in cx."""
    geo = _geometry(cx)
    bad = 0
    for w in words:
        try:
            straighten(w, cx, geo)
        except (NonHyperbolic, AxisMiss):
            bad += 1
    return bad


def _cut_types(cx: BlockComplex, extra_edges=()) -> list[list[int]]:
    edges = [c.edges[0] for c in cx.combinatorial_systoles()]
    comps = cx.cut_along(list(edges) + list(extra_edges))
    return sorted([list(c.type) for c in comps])


def _catalog_pair(kind, metric, multiple, max_crossings, cache):
    key = (kind, metric, multiple, max_crossings)
    if key not in cache:
        a, b = load_pair(kind, metric)
        cutoff = multiple * metric[1]
        cache[key] = (a, b,
                      enumerate_geodesics(a, cutoff, max_crossings),
                      enumerate_geodesics(b, cutoff, max_crossings))
    return cache[key]


# ------------------------------------------------------------- checks
def check_kernel(metric=DEFAULT_METRIC, cache=None) -> dict:
    t0 = time.perf_counter()
    grid = [(b, c) for b in (0.6, 0.7, 0.8, 0.9, 0.95)
            for c in (0.2, 0.3, 0.4, 0.5)]
    worst = max(solve_block(b, c).closure_residual for b, c in grid)
    return {"points": len(grid), "closure_below_1e-9": worst < 1e-9,
            "max_closure_residual": worst,
            "seconds": time.perf_counter() - t0}


def check_systoles(metric=DEFAULT_METRIC, cache=None) -> dict:
    t0 = time.perf_counter()
    out = {}
    for name in ("s1", "s2"):
        cx = load_complex(name, metric)
        c = metric[1]
        cat = enumerate_geodesics(cx, c * 1.01)
        spec = spectrum_from_catalog(cat)
        out[name] = {
            "length_c_geodesics": spec.multiplicity(c),
            "only_band_is_c": [round(bd.length, 9) for bd in spec.bands]
            == [round(c, 9)],
            "combinatorial_systoles": len(cx.combinatorial_systoles()),
            "cut_components": len(_cut_types(cx)),
            "cut_types": _cut_types(cx)}
    out["seconds"] = time.perf_counter() - t0
    return out


def check_buser(metric=DEFAULT_METRIC, multiple=10, max_crossings=10,
                cache=None) -> dict:
    cache = {} if cache is None else cache
    t0 = time.perf_counter()
    s1, s2, c1, c2 = _catalog_pair("buser", metric, multiple, max_crossings,
                                   cache)
    cmp = compare(spectrum_from_catalog(c1), spectrum_from_catalog(c2))
    w1 = [e.word for k in c1.classes for e in k.encodings if e.word]
    w2 = [e.word for k in c2.classes for e in k.encodings if e.word]
    fwd = check_bijection(w1, s1, s2, w2)
    back = check_bijection(w2, s2, s1, w1)
    g1, g2 = _geometry(s1), _geometry(s2)
    worst = 0.0
    for w in w1:
        out = transplant_word(w, s1, s2)
        worst = max(worst, abs(straighten(w, s1, g1).length
                               - straighten(out, s2, g2).length))
    return {"classes": [len(c1.classes), len(c2.classes)],
            "spectra_equal": cmp.equal, "words": len(w1),
            "bijection": fwd.ok and back.ok,
            "length_preserving": worst < 1e-9, "max_length_error": worst,
            "seconds": time.perf_counter() - t0}


def _count_summary(words, a, b) -> dict:
    mism, n, ci_ok, case_ok, case_bad = 0, 0, True, True, Counter()
    for w in words:
        r1 = count_identical(w, a)
        r2 = count_identical(w, b, source=a)
        n += 1
        if r1.count != r2.count:
            mism += 1
        if r1.c_formula and list(r1.c[:-1]) != r1.c_formula:
            ci_ok = False
        if r1.agrees is False:
            case_ok = False
            case_bad[(r1.case, r1.count, r1.formula)] += 1
    return {"geodesics": n, "count_mismatches": mism, "ci_ok": ci_ok,
            "case_ok": case_ok,
            "case_disagreements": [list(k) + [v] for k, v in
                                   sorted(case_bad.items())]}


def check_homeo(metric=DEFAULT_METRIC, multiple=8, max_crossings=8,
                pool_multiple=10, cache=None, words=None) -> dict:
    """``words`` (from an earlier run) fixes the geodesics examined."""
    cache = {} if cache is None else cache
    t0 = time.perf_counter()
    x1, x2, c1, c2 = _catalog_pair("homeo", metric, multiple, max_crossings,
                                   cache)
    if words is None:
        reps = [k.representative.word
                for k in crossing_representatives(c1, x1)]
        big = enumerate_geodesics(x1, pool_multiple * metric[1])
        words = {"reps": reps, "pool": segment_pool(big, x1)}
    cache[("words", "homeo", metric)] = words
    reps, pool = words["reps"], words["pool"]
    counts = _count_summary(reps, x1, x2)
    configs = []
    for case in (1, 2, 3):
        found = find_configuration(x1, pool, case)
        configs.append(None if found is None else found[1].count)
    # the chambers and the same chambers cut along their systoles
    cuts = [len(_cut_types(cx, cx.branch_edges())) for cx in (x1, x2)]
    cmp = compare(spectrum_from_catalog(c1), spectrum_from_catalog(c2))
    return {"chambers": [x1.chambers(), x2.chambers()],
            "chambers_match": x1.chambers() == x2.chambers(),
            "systole_cut_components": cuts,
            "transversal_geodesics": counts["geodesics"],
            "words_not_geodesic": _not_geodesic(reps, x1),
            "identical_counts_equal": counts["count_mismatches"] == 0,
            "count_mismatches": counts["count_mismatches"],
            "configuration_counts": configs,
            "spectra_equal": cmp.equal,
            "spectrum_mismatches": len(cmp.mismatches),
            "seconds": time.perf_counter() - t0}


def check_nonhomeo(metric=DEFAULT_METRIC, multiple=8, max_crossings=8,
                   pool_multiple=12, composed_limit=400, cache=None,
                   words=None) -> dict:
    cache = {} if cache is None else cache
    t0 = time.perf_counter()
    x1, x2, c1, c2 = _catalog_pair("nonhomeo", metric, multiple,
                                   max_crossings, cache)
    if words is None:
        reps = [k.representative.word
                for k in crossing_representatives(c1, x1)]
        # geodesics crossing the branch are long; add the crossing classes
        # up to a larger cutoff and closed words composed of their segments
        big = enumerate_geodesics(x1, pool_multiple * metric[1],
                                  max_crossings)
        reps += [k.representative.word
                 for k in crossing_representatives(big, x1)]
        pool = segment_pool(big, x1)
        composed = []
        for n in (2, 3):
            composed += list(islice(composed_words(x1, pool, n),
                                    composed_limit))
        words = {"reps": reps, "composed": composed}
    cache[("words", "nonhomeo", metric)] = words
    reps, composed = words["reps"], words["composed"]
    direct = _count_summary(reps, x1, x2)
    built = _count_summary(composed, x1, x2)
    cmp = compare(spectrum_from_catalog(c1), spectrum_from_catalog(c2))
    return {"chambers": [len(x1.chambers()), len(x2.chambers())],
            "enumerated_crossing": direct["geodesics"],
            "composed_words": built["geodesics"],
            "words_not_geodesic": _not_geodesic(reps + composed, x1),
            "identical_counts_equal": direct["count_mismatches"] == 0
            and built["count_mismatches"] == 0,
            "ci_formulas_match": direct["ci_ok"] and built["ci_ok"],
            "case_formulas_match": direct["case_ok"] and built["case_ok"],
            "case_disagreements": built["case_disagreements"],
            "spectra_equal": cmp.equal,
            "seconds": time.perf_counter() - t0}


def check_sec4(metric=DEFAULT_METRIC, multiple=8, max_crossings=8,
               cache=None, words=None) -> dict:
    cache = {} if cache is None else cache
    t0 = time.perf_counter()
    x1, x2, c1, c2 = _catalog_pair("sec4", metric, multiple, max_crossings,
                                   cache)
    if words is None:
        words = {"forward": transversal_words(c1, x1),
                 "backward": transversal_words(c2, x2),
                 "reps": [k.representative.word
                          for k in crossing_representatives(c1, x1)]}
    cache[("words", "sec4", metric)] = words
    fwd = amalgam_transplant_summary(words["forward"], x1, x2)
    back = amalgam_transplant_summary(words["backward"], x2, x1,
                                      reverse=True)
    copies = Counter()
    for w in words["reps"]:
        r1 = count_identical(w, x1)
        if r1.segments != 1:
            continue
        r2 = count_identical(w, x2, source=x1)
        copies[(r1.copies[0], r2.copies[0])] += 1
    weak = compare(spectrum_from_catalog(c1), spectrum_from_catalog(c2),
                   weak=True)
    full = compare(spectrum_from_catalog(c1), spectrum_from_catalog(c2))
    return {"transplant_forward": [fwd["ok"], fwd["words"]],
            "transplant_backward": [back["ok"], back["words"]],
            "all_transplanted": fwd["failed"] == 0 and back["failed"] == 0
            and fwd["length_errors"] == 0 and back["length_errors"] == 0,
            "failures_forward": fwd["failed"],
            "failures_backward": back["failed"],
            "length_errors": fwd["length_errors"] + back["length_errors"],
            "words_not_geodesic": _not_geodesic(words["forward"], x1)
            + _not_geodesic(words["backward"], x2),
            "copy_counts": sorted([list(k) + [v]
                                   for k, v in copies.items()]),
            "found_15_vs_12": (15, 12) in copies,
            "non_injective": fwd["collisions"] > 0,
            "witness": fwd["witness"],
            "weak_spectra_equal": weak.equal,
            "full_spectra_equal": full.equal,
            "seconds": time.perf_counter() - t0}


def check_commensurability(metric=DEFAULT_METRIC, cache=None) -> dict:
    t0 = time.perf_counter()
    r1 = cm.validate_cover(cm.load_cover("x1_sec4"),
                           load_complex("x1_sec4", metric))
    r2 = cm.validate_cover(cm.load_cover("x2_sec4"),
                           load_complex("x2_sec4", metric))
    rt = cm.ratio_test(r1.chambers, r2.chambers)
    return {"covers_valid": r1.ok and r2.ok,
            "cover_x1": str(r1.chambers), "cover_x2": str(r2.chambers),
            "ratio_verdict": rt.verdict,
            "first_last_ratio": [str(rt.ratios[0]), str(rt.ratios[-1])],
            "volumes_over_pi": [round(r1.base_volume / math.pi, 9),
                                round(r2.base_volume / math.pi, 9)],
            "seconds": time.perf_counter() - t0}


def _class_lengths(geods) -> list[float]:
    groups = group_encodings([g for g in geods if not g.along_skeleton])
    return sorted(round(grp[0].length, 7) for grp in groups
                  if grp[0].primitive)


def check_oracle(metric=DEFAULT_METRIC, max_crossings=4, cache=None) -> dict:
    """Pruned and unpruned searches find the same geodesic classes.

    Words are compared after grouping: a geodesic through a block corner has
    several encodings and the pruned search keeps fewer of them.
    """
    t0 = time.perf_counter()
    agree = {}
    for name in BUNDLED:
        cx = load_complex(name, metric)
        geo = Geometry(cx)
        pruned = accepted_geodesics(cx, max_crossings, geo=geo)
        full = []
        for w in enumerate_words(cx, max_crossings, prune=False):
            try:
                full.append(straighten(w, cx, geo))
            except (NonHyperbolic, AxisMiss):
                continue
        agree[name] = _class_lengths(pruned) == _class_lengths(full)
    return {"agree": agree, "all_agree": all(agree.values()),
            "seconds": time.perf_counter() - t0}


CHECKS: dict[str, Callable] = {
    "kernel": check_kernel,
    "systoles": check_systoles,
    "buser": check_buser,
    "homeo": check_homeo,
    "nonhomeo": check_nonhomeo,
    "sec4": check_sec4,
    "commensurability": check_commensurability,
    "oracle": check_oracle,
}

# observations that must not move under the metric perturbation
STABLE_KEYS = {
    "homeo": ("chambers_match", "systole_cut_components",
              "identical_counts_equal", "configuration_counts", "spectra_equal"),
    "nonhomeo": ("chambers", "identical_counts_equal", "ci_formulas_match",
                 "case_formulas_match", "spectra_equal"),
    "sec4": ("failures_forward", "failures_backward", "length_errors",
             "found_15_vs_12",
             "non_injective", "weak_spectra_equal"),
}


# ------------------------------------------------------- expectations
@dataclass
class Row:
    id: str
    criterion: int
    check: str
    claim: str
    passed: bool
    mismatches: list[str] = field(default_factory=list)
    observed: dict = field(default_factory=dict)


def load_expectations(path=None) -> list[dict]:
    return json.loads((path or EXPECTATIONS).read_text())["expectations"]


def _matches(expect, observed, prefix="") -> list[str]:
    out = []
    for key, want in expect.items():
        name = f"{prefix}{key}"
        if key == "max_seconds":
            got = observed.get("seconds", math.inf)
            if got > want:
                out.append(f"seconds {got:.2f} > {want}")
            continue
        if key not in observed:
            out.append(f"{name}: not observed")
            continue
        got = observed[key]
        if isinstance(want, dict) and isinstance(got, dict):
            out += _matches(want, got, name + ".")
        elif _norm(got) != _norm(want):
            out.append(f"{name}: expected {want!r}, got {got!r}")
    return out


def _norm(v):
    if isinstance(v, (list, tuple)):
        return [_norm(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def evaluate(entry: dict, metric=DEFAULT_METRIC, cache=None,
             observed: dict | None = None) -> Row:
    if observed is None:
        fn = CHECKS[entry["check"]]
        observed = fn(metric=metric, cache=cache, **entry.get("params", {}))
    bad = _matches(entry["expect"], observed)
    return Row(entry["id"], entry["criterion"], entry["check"],
               entry.get("claim", ""), not bad, bad, observed)


def stability(metric_a=DEFAULT_METRIC, metric_b=PERTURBED_METRIC,
              results: dict | None = None, cache=None) -> dict:
    """Rerun the count-type checks at a second metric on the same words.

    The geodesics examined at metric_a are kept fixed; at metric_b they
    must still straighten, and every count-type verdict computed on them
    must be unchanged.  Spectra are recompared at the cutoff of metric_b.
    """
    cache = {} if cache is None else cache
    out = {}
    for name, keys in STABLE_KEYS.items():
        a = (results or {}).get(name)
        if a is None or ("words", name, metric_a) not in cache:
            a = CHECKS[name](metric=metric_a, cache=cache)
        words = cache[("words", name, metric_a)]
        b = CHECKS[name](metric=metric_b, cache=cache, words=words)
        out[name] = {k: _norm(a[k]) == _norm(b[k]) for k in keys}
        out[name]["words_still_geodesic"] = b["words_not_geodesic"] == 0
    out["all_stable"] = all(all(v.values()) for k, v in out.items())
    return out


def reproduce_all(metric=DEFAULT_METRIC, expectations=None,
                  with_stability: bool = True) -> tuple[list[Row], dict]:
    t0 = time.perf_counter()
    cache: dict = {}
    rows = []
    seen: dict[str, dict] = {}
    for entry in expectations or load_expectations():
        if entry["check"] == "stability":
            if not with_stability:
                continue
            obs = stability(metric, PERTURBED_METRIC, seen, cache)
            rows.append(evaluate(entry, metric, observed=obs))
            continue
        row = evaluate(entry, metric, cache)
        seen[entry["check"]] = row.observed
        rows.append(row)
    manifest = run_manifest("reproduce-all", list(BUNDLED), metric, rows,
                            time.perf_counter() - t0)
    return rows, manifest


def run_manifest(command: str, complexes: list[str], metric, rows,
                 seconds: float, **params) -> dict:
    return {"command": command,
            "complexes": {n: file_hash(n) for n in complexes
                          if (DATA_DIR / f"{n}.json").exists()},
            "metric": {"b": metric[0], "c": metric[1]},
            "parameters": params,
            "verdicts": {r.id: r.passed for r in rows},
            "seconds": round(seconds, 3)}


def rows_markdown(rows: list[Row]) -> str:
    lines = ["| id | criterion | claim | result | notes |",
             "|---|---|---|---|---|"]
    for r in rows:
        notes = "; ".join(r.mismatches).replace("|", "/")
        lines.append(f"| {r.id} | {r.criterion} | {r.claim} | "
                     f"{'pass' if r.passed else 'FAIL'} | {notes} |")
    return "\n".join(lines) + "\n"


def rows_json(rows: list[Row]) -> list[dict]:
    return [asdict(r) for r in rows]
