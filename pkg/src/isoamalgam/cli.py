"""Command-line front end.

Exit codes: 0 when computed verdicts match the declared expectations (or no
expectation is declared), 2 on a mismatch, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import commensurability as cm
from . import reports
from .block_complex import ComplexValidationError, load_complex
from .geodesic_enumerator import enumerate_geodesics
from .hyperbolic_kernel import GeometryError
from .spectrum_compare import CutoffMismatch, build_spectrum, compare
from .transplantation import (NotCrossing, check_bijection, count_identical,
                              derive_transition_table)

OK, INPUT_ERROR, MISMATCH = 0, 1, 2


class InputError(Exception):
    pass


def _metric(text: str | None):
    if text is None:
        return None
    try:
        b, c = (float(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--metric expects b,c, got {text!r}")
    return b, c


def _load(name: str, metric):
    try:
        return load_complex(name, metric)
    except (ComplexValidationError, GeometryError) as exc:
        raise InputError(str(exc))


def _expected(verb: str, key: str):
    verbs = json.loads(reports.EXPECTATIONS.read_text()).get("verbs", {})
    return verbs.get(verb, {}).get(key)


class Output:
    """Writes artifacts to --out (or stdout) and collects a manifest."""

    def __init__(self, args, command: str) -> None:
        self.dir = Path(args.out) if args.out else None
        self.command = command
        self.args = args
        self.t0 = time.perf_counter()
        self.verdicts: dict[str, object] = {}
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def emit(self, name: str, text: str) -> None:
        if self.dir:
            (self.dir / name).write_text(text)
        else:
            sys.stdout.write(text)
            if not text.endswith("\n"):
                sys.stdout.write("\n")

    def finish(self, complexes, metric, expect_ok: bool) -> int:
        if self.dir:
            names = [n for n in complexes if not n.endswith(".json")]
            if metric is None and names:
                cx = _load(names[0], None)
                metric = (cx.b, cx.c)
            manifest = {
                "command": self.command,
                "complexes": {n: reports.file_hash(n) for n in names
                              if (reports.DATA_DIR / f"{n}.json").exists()},
                "metric": metric and {"b": metric[0], "c": metric[1]},
                "cutoff": self.args.cutoff,
                "max_crossings": self.args.max_crossings,
                "tol": self.args.tol,
                "workers": self.args.workers,
                "verdicts": self.verdicts,
                "seconds": round(time.perf_counter() - self.t0, 3)}
            (self.dir / "manifest.json").write_text(
                json.dumps(manifest, indent=1, sort_keys=True) + "\n")
        return OK if expect_ok else MISMATCH


def _check(out: Output, key: str, verdict, expected) -> bool:
    out.verdicts[key] = verdict
    return expected is None or verdict == expected


# -------------------------------------------------------------- verbs
def cmd_validate(args) -> int:
    out = Output(args, "validate")
    metric = _metric(args.metric)
    lines = ["| complex | cells | blocks | euler | chambers |",
             "|---|---|---|---|---|"]
    for name in args.complexes:
        cx = _load(name, metric)
        ch = cx.chambers() if cx.is_amalgam else "-"
        lines.append(f"| {cx.name} | {len(cx.cells)} | {cx.block_count} | "
                     f"{cx.euler_characteristic} | {ch} |")
        out.verdicts[cx.name] = "valid"
    out.emit("validate.md", "\n".join(lines) + "\n")
    return out.finish(args.complexes, metric, True)


def cmd_spectrum(args) -> int:
    out = Output(args, "spectrum")
    metric = _metric(args.metric)
    cx = _load(args.complex, metric)
    cutoff = args.cutoff if args.cutoff is not None else 4 * cx.c
    spec = build_spectrum(cx, cutoff, args.max_crossings, tol=args.tol,
                          workers=args.workers)
    out.verdicts["classes"] = spec.total
    out.emit(f"{cx.name}_spectrum.csv", spec.to_csv())
    return out.finish([args.complex], metric, True)


def cmd_compare(args) -> int:
    out = Output(args, "compare")
    metric = _metric(args.metric)
    a, b = _load(args.a, metric), _load(args.b, metric)
    cutoff = args.cutoff if args.cutoff is not None else 4 * a.c
    sa = build_spectrum(a, cutoff, args.max_crossings, tol=args.tol,
                        workers=args.workers)
    sb = build_spectrum(b, cutoff, args.max_crossings, tol=args.tol,
                        workers=args.workers)
    try:
        res = compare(sa, sb, weak=args.weak)
    except CutoffMismatch as exc:
        raise InputError(str(exc))
    verdict = "equal" if res.equal else "differ"
    key = f"{a.name}|{b.name}" + ("|weak" if args.weak else "")
    ok = _check(out, key, verdict, _expected("compare", key))
    out.emit(f"compare_{a.name}_{b.name}.md", res.to_markdown())
    if args.out:
        out.emit(f"{a.name}_spectrum.csv", sa.to_csv())
        out.emit(f"{b.name}_spectrum.csv", sb.to_csv())
    return out.finish([args.a, args.b], metric, ok)


def cmd_transplant(args) -> int:
    out = Output(args, "transplant")
    metric = _metric(args.metric)
    a, b = _load(args.a, metric), _load(args.b, metric)
    cutoff = args.cutoff if args.cutoff is not None else 10 * a.c
    ca = enumerate_geodesics(a, cutoff, args.max_crossings)
    key = f"{a.name}|{b.name}"
    if a.is_amalgam:
        words = reports.transversal_words(ca, a)
        rep = reports.amalgam_transplant_summary(words, a, b)
        verdict = ("no-words" if not words else
                   "all-transplanted" if rep["failed"] == 0
                   and rep["length_errors"] == 0 else "failures")
    else:
        cb = enumerate_geodesics(b, cutoff, args.max_crossings)
        wa = [e.word for k in ca.classes for e in k.encodings if e.word]
        wb = [e.word for k in cb.classes for e in k.encodings if e.word]
        r = check_bijection(wa, a, b, wb)
        rep = {"words": r.size, "injective": r.injective,
               "onto_target": r.into_target, "inverse_ok": r.inverse_ok,
               "failures": r.failures[:10]}
        verdict = ("no-words" if not r.size else
                   "bijection" if r.ok else "not-bijection")
    rep["verdict"] = verdict
    ok = _check(out, key, verdict, _expected("transplant", key))
    out.emit(f"transplant_{a.name}_{b.name}.json",
             json.dumps(rep, indent=1) + "\n")
    return out.finish([args.a, args.b], metric, ok)


def cmd_count_identical(args) -> int:
    out = Output(args, "count-identical")
    metric = _metric(args.metric)
    a, b = _load(args.a, metric), _load(args.b, metric)
    cutoff = args.cutoff if args.cutoff is not None else 12 * a.c
    cat = enumerate_geodesics(a, cutoff, args.max_crossings)
    rows = []
    for k in reports.crossing_representatives(cat, a):
        w = k.representative.word
        try:
            r1 = count_identical(w, a)
        except NotCrossing:
            continue
        r2 = count_identical(w, b, source=a)
        rows.append({"length": k.length, "word": k.witness,
                     "segments": r1.segments, "copies": r1.copies,
                     "c": r1.c, "case": r1.case, "formula": r1.formula,
                     "count_a": r1.count, "count_b": r2.count})
    equal = all(r["count_a"] == r["count_b"] for r in rows)
    formulas = all(r["formula"] in (None, r["count_a"]) for r in rows)
    verdict = ("no-crossing-geodesics" if not rows else
               "equal" if equal else "differ")
    key = f"{a.name}|{b.name}"
    ok = _check(out, key, verdict, _expected("count-identical", key))
    ok = _check(out, "formulas", formulas, True) and ok
    out.emit(f"count_{a.name}_{b.name}.json",
             json.dumps({"verdict": verdict, "formulas_agree": formulas,
                         "geodesics": rows}, indent=1) + "\n")
    return out.finish([args.a, args.b], metric, ok)


def cmd_derive_table(args) -> int:
    out = Output(args, "derive-table")
    metric = _metric(args.metric)
    a, b = _load(args.a, metric), _load(args.b, metric)
    table = derive_transition_table((a, b))
    bad = table.stated_rule_mismatches()
    lines = ["| class | delta | new delta |", "|---|---|---|"]
    lines += [f"| {r['length_class']} | {r['delta']} | {r['new_delta']} |"
              for r in table.as_rows()]
    lines += ["", "unreachable: " + (", ".join(map(str, table.unreachable))
                                     or "none"),
              "stated cases: " + ("consistent" if not bad else
                                  "; ".join(bad))]
    verdict = "consistent" if not bad else "inconsistent"
    key = f"{a.name}|{b.name}"
    ok = _check(out, key, verdict, _expected("derive-table", key))
    out.emit(f"table_{a.name}_{b.name}.md", "\n".join(lines) + "\n")
    return out.finish([args.a, args.b], metric, ok)


def cmd_systole_cut(args) -> int:
    out = Output(args, "systole-cut")
    metric = _metric(args.metric)
    lines = ["| complex | systoles | components |", "|---|---|---|"]
    ok = True
    for name in args.complexes:
        cx = _load(name, metric)
        sy = cx.combinatorial_systoles()
        extra = cx.branch_edges() if cx.is_amalgam else []
        types = reports._cut_types(cx, extra)
        lines.append(f"| {cx.name} | "
                     + "; ".join(s.description for s in sy)
                     + f" | {types} |")
        ok = _check(out, cx.name, types,
                    _expected("systole-cut", cx.name)) and ok
    out.emit("systole_cut.md", "\n".join(lines) + "\n")
    return out.finish(args.complexes, metric, ok)


def cmd_chambers(args) -> int:
    out = Output(args, "chambers")
    metric = _metric(args.metric)
    cxs = [_load(n, metric) for n in args.complexes]
    lines = ["| complex | chambers (genus, boundary) |", "|---|---|"]
    for cx in cxs:
        try:
            lines.append(f"| {cx.name} | {cx.chambers()} |")
        except ComplexValidationError as exc:
            raise InputError(str(exc))
    ok = True
    if len(cxs) == 2:
        same = cxs[0].chambers() == cxs[1].chambers()
        verdict = ("homeomorphism-compatible" if same
                   else "not-homeomorphism-compatible")
        key = f"{cxs[0].name}|{cxs[1].name}"
        lines += ["", f"verdict: **{verdict}**"]
        ok = _check(out, key, verdict, _expected("chambers", key))
    out.emit("chambers.md", "\n".join(lines) + "\n")
    return out.finish(args.complexes, metric, ok)


def cmd_commensurability(args) -> int:
    out = Output(args, "commensurability")
    metric = _metric(args.metric)
    specs = []
    for src in args.covers:
        try:
            spec = cm.load_cover(src)
        except (OSError, KeyError, ValueError) as exc:
            raise InputError(f"bad cover spec {src}: {exc}")
        specs.append(cm.validate_cover(spec, _load(spec.complex_name,
                                                   metric)))
    lines = []
    for r in specs:
        lines.append(f"- {r.complex_name}: cover chambers {r.chambers}, "
                     f"valid: {r.ok}" + "".join(f"\n  - {p}"
                                                for p in r.problems))
    try:
        rt = cm.ratio_test(specs[0].chambers, specs[1].chambers)
    except ValueError as exc:
        raise InputError(str(exc))
    lines += ["", "| i | ratio |", "|---|---|"]
    lines += [f"| {i + 1} | {q} |" for i, q in enumerate(rt.ratios)]
    lines += ["", f"verdict: **{rt.verdict}**"]
    key = f"{specs[0].complex_name}|{specs[1].complex_name}"
    ok = all(r.ok for r in specs)
    ok = _check(out, key, rt.verdict, _expected("commensurability", key)) \
        and ok
    out.emit("commensurability.md", "\n".join(lines) + "\n")
    return out.finish([r.complex_name for r in specs], metric, ok)


def cmd_reproduce_all(args) -> int:
    metric = _metric(args.metric) or reports.DEFAULT_METRIC
    rows, manifest = reports.reproduce_all(metric,
                                           with_stability=not args.quick)
    text = reports.rows_markdown(rows)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "reproduce.md").write_text(text)
        (d / "reproduce.json").write_text(
            json.dumps(reports.rows_json(rows), indent=1, default=str) + "\n")
        (d / "manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    sys.stdout.write(text)
    return OK if all(r.passed for r in rows) else MISMATCH


# --------------------------------------------------------------- main
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", type=float, help="length cutoff")
    common.add_argument("--max-crossings", type=int,
                        help="cap on cells per word")
    common.add_argument("--tol", type=float, default=1e-6,
                        help="band tolerance for lengths")
    common.add_argument("--metric", help="block side lengths b,c")
    common.add_argument("--weak", action="store_true",
                        help="compare length sets without multiplicity")
    common.add_argument("--out", help="directory for artifacts")
    common.add_argument("--workers", type=int, default=1)

    p = argparse.ArgumentParser(prog="isoamalgam", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)
    s = sub.add_parser("validate", parents=[common])
    s.add_argument("complexes", nargs="+")
    s.set_defaults(func=cmd_validate)
    s = sub.add_parser("spectrum", parents=[common])
    s.add_argument("complex")
    s.set_defaults(func=cmd_spectrum)
    for verb, fn in (("compare", cmd_compare),
                     ("transplant", cmd_transplant),
                     ("count-identical", cmd_count_identical),
                     ("derive-table", cmd_derive_table)):
        s = sub.add_parser(verb, parents=[common])
        s.add_argument("a")
        s.add_argument("b")
        s.set_defaults(func=fn)
    for verb, fn in (("systole-cut", cmd_systole_cut),
                     ("chambers", cmd_chambers)):
        s = sub.add_parser(verb, parents=[common])
        s.add_argument("complexes", nargs="+")
        s.set_defaults(func=fn)
    s = sub.add_parser("commensurability", parents=[common])
    s.add_argument("covers", nargs="*", default=["x1_sec4", "x2_sec4"])
    s.set_defaults(func=cmd_commensurability)
    s = sub.add_parser("reproduce-all", parents=[common])
    s.add_argument("--quick", action="store_true",
                   help="skip the perturbed-metric rerun")
    s.set_defaults(func=cmd_reproduce_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
