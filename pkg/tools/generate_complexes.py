"""Regenerate the bundled complex documents under src/isoamalgam/data.

The two closed surfaces share the c and b pairings and differ only in the
a pairings.  The amalgams are derived from them by declaring gluing classes
(and, for the three-copy complexes, by cutting every block along m).

Run from the repository root:  python3 tools/generate_complexes.py
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "isoamalgam" / "data"
METRIC = {"b": 0.75, "c": 0.5}
B_PAIRS = ((1, 4), (2, 3), (5, 8), (6, 7))


def w(n):
    return (n - 1) % 8 + 1


def a_rules(surface):
    # (top-right partner, top-left partner) as functions of n
    if surface == 1:
        return (lambda n: w(5 * n + 4)), (lambda n: w(5 * n))
    return (lambda n: w(5 * n)), (lambda n: w(5 * n + 4))


def whole_pairings(surface, copy=1):
    tr, tl = a_rules(surface)
    out = []
    for n in range(1, 9):
        out.append(([copy, n, "whole", "C-right"],
                    [copy, w(n + 1), "whole", "C-left"]))
        out.append(([copy, n, "whole", "A-top-right"],
                    [copy, tr(n), "whole", "A-bottom-right"]))
        out.append(([copy, n, "whole", "A-top-left"],
                    [copy, tl(n), "whole", "A-bottom-left"]))
    for p, q in B_PAIRS:
        out.append(([copy, p, "whole", "B-top"], [copy, q, "whole", "B-top"]))
        out.append(([copy, p, "whole", "B-bottom"],
                    [copy, q, "whole", "B-bottom"]))
    return out


def half_pairings(surface, copy):
    tr, tl = a_rules(surface)
    L, R = "left", "right"
    out = []
    for n in range(1, 9):
        out.append(([copy, n, R, "C-right"], [copy, w(n + 1), L, "C-left"]))
        out.append(([copy, n, R, "A-top-right"],
                    [copy, tr(n), R, "A-bottom-right"]))
        out.append(([copy, n, L, "A-top-left"],
                    [copy, tl(n), L, "A-bottom-left"]))
        out.append(([copy, n, L, "m"], [copy, n, R, "m"]))
    for p, q in B_PAIRS:
        for x, y in ((p, q), (q, p)):
            out.append(([copy, x, L, "B-top"], [copy, y, R, "B-top"]))
            out.append(([copy, x, R, "B-bottom"], [copy, y, L, "B-bottom"]))
    return out


def doc(name, cells, pairings, classes=(), copies=1, euler=None):
    d = {
        "name": name,
        "metric": METRIC,
        "copies": copies,
        "cells": cells,
        "pairings": [{"end_a": a, "end_b": b, "orientation": "reversing"}
                     for a, b in pairings],
        "gluing_classes": [{"members": m} for m in classes],
    }
    if euler is not None:
        d["euler_characteristic"] = euler
    return d


def main():
    whole = [[1, n, "whole"] for n in range(1, 9)]
    docs = []
    for k in (1, 2):
        docs.append(doc(f"s{k}", whole, whole_pairings(k), euler=-8))

    # two 2a curves (top-right of B2/B6 followed by top-left of B3/B7)
    homeo = [[[1, 2, "whole", "A-top-right", "+"],
              [1, 3, "whole", "A-top-left", "+"]],
             [[1, 6, "whole", "A-top-right", "+"],
              [1, 7, "whole", "A-top-left", "+"]]]
    for k in (1, 2):
        docs.append(doc(f"x{k}_homeo", whole, whole_pairings(k), [homeo]))

    # all four systoles identified, each run top to bottom
    for k in (1, 2):
        odd = k == 1
        members = [[[1, n, "whole", "C-right", "+"]]
                   for n in range(1, 9) if (n % 2 == 1) == odd]
        docs.append(doc(f"x{k}_nonhomeo", whole, whole_pairings(k), [members]))

    # three copies cut along m; the m-arcs of blocks (1,4), (2,3), (5,8)
    # close up into curves of length 2m, odd halves matched with odd halves
    halves = [[s, n, h] for s in (1, 2, 3) for n in range(1, 9)
              for h in ("left", "right")]
    sec4 = []
    for s in (1, 2, 3):
        for p, q in ((1, 4), (3, 2), (5, 8)):
            sec4.append([[s, p, "left", "m", "+"], [s, q, "left", "m", "-"]])
    for k in (1, 2):
        pairs = [x for s in (1, 2, 3) for x in half_pairings(k, s)]
        docs.append(doc(f"x{k}_sec4", halves, pairs, [sec4], copies=3))

    OUT.mkdir(parents=True, exist_ok=True)
    for d in docs:
        (OUT / f"{d['name']}.json").write_text(json.dumps(d, indent=1) + "\n")
        print("wrote", d["name"])


if __name__ == "__main__":
    main()
