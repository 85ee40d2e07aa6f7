"""Closed geodesics of block complexes as cyclic crossing words.

A traversal is a pair (entry side-end, exit side-end) of one cell; a word is
a cyclic sequence of traversals in which each exit crosses, through a
pairing or a branch bundle, into the next entry.  Words are searched depth
first from every root traversal.  A prefix is dropped when no geodesic line
crosses all its developed sides in the right direction (a convex feasibility
test on the circle parameters s = u + v, p = uv of the line) or when a
developed side is farther from the root side than the length cutoff.

Geodesics lying in the skeleton (sides and bisectors) have no transversal
encoding and are found by a separate walk over the quotient graph.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Iterator, Sequence

from .block_complex import (CELL_SIDES, BlockComplex, Half, Side,
                            complex_from_dict, complex_to_dict)
from .hyperbolic_kernel import (BlockGeometry, Isometry, NonHyperbolic,
                                Segment, axis_and_angles, axis_frame,
                                crossing_isometry, hdist, pair_map,
                                signed_side, solve_block)

AXIS_TOL = 1e-8       # tolerance on signed sinh-distances at acceptance
PRUNE_TOL = 1e-7      # looser tolerance used while pruning prefixes
CHORD_TOL = 1e-7
GRAZE_TOL = 1e-7

Traversal = tuple[int, int]


class AxisMiss(ValueError):
    def __init__(self, index: int, msg: str = "") -> None:
        super().__init__(msg or f"axis misses developed side {index}")
        self.index = index


class BranchAngleViolation(AxisMiss):
    pass


# ------------------------------------------------------------------ words
@dataclass(frozen=True)
class CrossingWord:
    traversals: tuple[Traversal, ...]
    complex_name: str = ""
    anchor: int = 0

    def __len__(self) -> int:
        return len(self.traversals)

    def counts(self, cx: BlockComplex) -> dict[str, int]:
        out = Counter(cx.side_end_info(x)[1].length_class
                      for _, x in self.traversals)
        return {k: out.get(k, 0) for k in ("a", "b", "c", "m")}

    def describe(self, cx: BlockComplex) -> str:
        parts = []
        for e, x in self.traversals:
            cell, s_in = cx.side_end_info(e)
            _, s_out = cx.side_end_info(x)
            parts.append(f"{cell}[{_short(s_in)}>{_short(s_out)}]")
        return " ".join(parts)

    def rotated(self, k: int) -> "CrossingWord":
        t = self.traversals
        return CrossingWord(t[k:] + t[:k], self.complex_name)


_SHORT = {Side.C_LEFT: "cL", Side.A_TL: "aTL", Side.B_TOP: "bT",
          Side.A_TR: "aTR", Side.C_RIGHT: "cR", Side.A_BR: "aBR",
          Side.B_BOTTOM: "bB", Side.A_BL: "aBL", Side.M: "m"}


def _short(s: Side) -> str:
    return _SHORT[s]


def least_rotation(t: Sequence) -> tuple:
    t = tuple(t)
    return min(t[k:] + t[:k] for k in range(len(t))) if t else t


def is_primitive_word(t: Sequence) -> bool:
    n = len(t)
    for p in range(1, n):
        if n % p == 0 and all(t[i] == t[i % p] for i in range(n)):
            return False
    return True


def is_closed_word(cx: BlockComplex, t: Sequence[Traversal]) -> bool:
    n = len(t)
    for i in range(n):
        e, x = t[i]
        if e == x:
            return False
        nxt = t[(i + 1) % n][0]
        if not any(f == nxt for f, _ in cx.crossing_options(x)):
            return False
    return n > 0


# ------------------------------------------------------------- geometry
class Geometry:
    """Per-complex cache of side endpoints and crossing isometries."""

    def __init__(self, cx: BlockComplex) -> None:
        self.cx = cx
        self.block: BlockGeometry = solve_block(cx.b, cx.c)
        n = len(cx._index["se_list"])
        self.cell_of = [0] * n
        self.ends: list[tuple[complex, complex]] = []
        self.length: list[float] = []
        for e in range(n):
            cell, side = cx.side_end_info(e)
            self.cell_of[e] = cx._index["se_list"][e][0]
            p, q = self.block.side_endpoints(cell.half, side)
            self.ends.append((p, q))
            self.length.append(hdist(p, q))
        self.exits: dict[int, list[int]] = defaultdict(list)
        for e in range(n):
            self.exits[self.cell_of[e]].append(e)
        self.options: list[list[tuple[int, str, Isometry]]] = []
        for e in range(n):
            cell, side = cx.side_end_info(e)
            opts = []
            for f, rel in cx.crossing_options(e):
                cf, sf = cx.side_end_info(f)
                g = crossing_isometry(self.block, (cell.half, side),
                                      (cf.half, sf), rel)
                opts.append((f, rel, g))
            self.options.append(opts)
        # label view: (half, side) of each side-end and crossings by label
        self.label: list[tuple[str, int]] = []
        for e in range(n):
            cell, side = cx.side_end_info(e)
            self.label.append((cell.half.value, int(side)))
        self.by_label: dict[tuple[str, int], list[int]] = defaultdict(list)
        self.sibling: dict[tuple[int, int], int] = {}
        for e in range(n):
            self.by_label[self.label[e]].append(e)
            for x in self.exits[self.cell_of[e]]:
                self.sibling[(e, self.label[x][1])] = x
        ctype: dict = defaultdict(list)
        self.label_iso: dict = {}
        for x in range(n):
            for f, rel, g in self.options[x]:
                ctype[(x, self.label[f], rel)].append(f)
                self.label_iso[(self.label[x], self.label[f], rel)] = g
        self.ctype = {k: tuple(v) for k, v in ctype.items()}
        self.types_from: dict[int, list] = defaultdict(list)
        for x, lab, rel in self.ctype:
            self.types_from[x].append((lab, rel))

    def other_exits(self, entry: int) -> list[int]:
        return [x for x in self.exits[self.cell_of[entry]] if x != entry]

    def root_frame(self, e0: int) -> Isometry:
        p, q = self.ends[e0]
        h = self.length[e0] / 2
        return pair_map(p, q, 1j * math.exp(-h), 1j * math.exp(h))

    def crossing(self, x: int, f: int) -> Isometry:
        for g_f, _, g in self.options[x]:
            if g_f == f:
                return g
        raise ValueError(f"side-end {x} does not cross into {f}")

    def oriented_side(self, frame: Isometry, e: int, entry: bool = False
                      ) -> tuple[complex, complex]:
        """Developed (P, Q) of side-end e: P must lie left of the geodesic."""
        vs, ve = self.ends[e]
        p, q = frame(vs), frame(ve)
        if entry:
            p, q = q, p
        if frame.det < 0:
            p, q = q, p
        return p, q


# --------------------------------------------------------- feasibility
def _clip(poly: list[tuple[float, float]], coef: tuple[float, float, float]
          ) -> list[tuple[float, float]]:
    """Clip a convex polygon to alpha*s + beta*p + gamma >= 0."""
    al, be, ga = coef
    out = []
    n = len(poly)
    for i in range(n):
        s1, p1 = poly[i]
        s2, p2 = poly[(i + 1) % n]
        v1 = al * s1 + be * p1 + ga
        v2 = al * s2 + be * p2 + ga
        if v1 >= 0:
            out.append((s1, p1))
        if (v1 >= 0) != (v2 >= 0):
            t = v1 / (v1 - v2)
            out.append((s1 + t * (s2 - s1), p1 + t * (p2 - p1)))
    return out


def _constraint(z: complex, sign: float, tol: float):
    # sign * (|z|^2 - x s + p) / y + tol >= 0
    x, y = z.real, z.imag
    return (-sign * x / y, sign / y, sign * (x * x + y * y) / y + tol)


def _initial_region(ell: float) -> list[tuple[float, float]]:
    lo, hi = -math.exp(ell), -math.exp(-ell)
    big = 1e8
    return [(-big, lo), (big, lo), (big, hi), (-big, hi)]


def _same_segment(a: tuple[complex, complex], b: tuple[complex, complex]
                  ) -> bool:
    def close(z, w):
        return abs(z - w) <= 1e-9 * (1 + abs(z))
    return ((close(a[0], b[0]) and close(a[1], b[1]))
            or (close(a[0], b[1]) and close(a[1], b[0])))


# ---------------------------------------------------------- enumeration
# The developed picture of a prefix depends only on its labels: the shape of
# each cell, the sides it is entered and left through, and the relation of
# each crossing.  The search therefore runs over label words and carries,
# for every label prefix, the set of concrete (start, current exit) pairs
# realizing it.  A prefix is dropped when it is geometrically infeasible or
# has no realization left.

LabelElement = tuple[str, int, int, str]   # half, entry side, exit side, rel


@dataclass(frozen=True)
class LabelWord:
    elements: tuple[LabelElement, ...]
    realizations: int = 0      # pointed closed realizations counted

    def __len__(self) -> int:
        return len(self.elements)


def _label_of(geo: Geometry, e: int) -> tuple[str, int]:
    return geo.label[e]


def _search_label_root(geo: Geometry, root: tuple[str, int, int],
                       max_crossings: int, max_length: float, prune: bool
                       ) -> list[LabelWord]:
    half, s_in, s_out = root
    starts = geo.by_label.get((half, s_in), [])
    if not starts:
        return []
    e0 = starts[0]
    a0 = geo.root_frame(e0)
    seg0_pts = geo.oriented_side(a0, e0, entry=True)
    seg0 = Segment(*seg0_pts)
    region0 = _initial_region(geo.length[e0] / 2)
    found: list[LabelWord] = []
    word: list[tuple[str, int, int]] = []
    rels: list[str] = []
    segs: list[tuple[complex, complex]] = [seg0_pts]
    start_label = (half, s_in)

    def visit(elem, frame: Isometry, region, real: dict) -> None:
        word.append(elem)
        exit_se = next(iter(real))[1]
        pq = geo.oriented_side(frame, exit_se)
        ok = True
        if prune:
            if any(_same_segment(pq, s) for s in segs):
                ok = False
            elif max_length < math.inf and seg0.distance(
                    Segment(*pq)) > max_length + 1e-9:
                ok = False
            else:
                region = _clip(region, _constraint(pq[0], 1.0, PRUNE_TOL))
                if region:
                    region = _clip(region,
                                   _constraint(pq[1], -1.0, PRUNE_TOL))
                ok = bool(region)
        if ok:
            segs.append(pq)
            types = set()
            for _, x in real:
                types.update(geo.types_from[x])
            for lab_f, rel in sorted(types):
                if lab_f == start_label:
                    n = sum(c for (s, x), c in real.items()
                            if s in geo.ctype.get((x, lab_f, rel), ()))
                    if n:
                        w = tuple(e + (r,) for e, r in zip(word, rels + [rel]))
                        if least_rotation(w) == w:
                            found.append(LabelWord(w, n))
                if len(word) >= max_crossings:
                    continue
                g = geo.label_iso[(geo.label[exit_se], lab_f, rel)]
                nf = frame @ g
                for so in CELL_SIDES[Half(lab_f[0])]:
                    so = int(so)
                    el = (lab_f[0], lab_f[1], so)
                    if so == lab_f[1] or el < root:
                        continue
                    nxt: dict = defaultdict(int)
                    for (s, x), c in real.items():
                        for f in geo.ctype.get((x, lab_f, rel), ()):
                            nxt[(s, geo.sibling[(f, so)])] += c
                    if nxt:
                        rels.append(rel)
                        visit(el, nf, region, nxt)
                        rels.pop()
            segs.pop()
        word.pop()

    real0 = {(e, geo.sibling[(e, s_out)]): 1 for e in starts}
    visit(root, a0, region0, real0)
    return found


def _label_roots(geo: Geometry) -> list[tuple[str, int, int]]:
    out = set()
    for e in range(len(geo.cell_of)):
        h, s = geo.label[e]
        for x in geo.other_exits(e):
            out.add((h, s, geo.label[x][1]))
    return sorted(out)


def _label_chunk(args):
    doc, roots, max_crossings, max_length, prune = args
    geo = Geometry(complex_from_dict(doc))
    out = []
    for r in roots:
        out.extend(_search_label_root(geo, tuple(r), max_crossings,
                                      max_length, prune))
    return out


def enumerate_label_words(cx: BlockComplex, max_crossings: int,
                          max_length: float = math.inf, *, prune: bool = True,
                          workers: int = 1) -> list[LabelWord]:
    """Closed label words (least rotations) realized in the complex."""
    geo = Geometry(cx)
    roots = _label_roots(geo)
    if workers <= 1:
        found = [w for r in roots for w in _search_label_root(
            geo, r, max_crossings, max_length, prune)]
    else:
        doc = complex_to_dict(cx)
        chunks = [roots[k::workers * 4] for k in range(workers * 4)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = ex.map(_label_chunk,
                           [(doc, ch, max_crossings, max_length, prune)
                            for ch in chunks])
            found = [w for part in parts for w in part]
    return sorted(found, key=lambda w: w.elements)


def realize(cx: BlockComplex, lw: LabelWord | Sequence[LabelElement],
            geo: Geometry | None = None) -> list[tuple[Traversal, ...]]:
    """All concrete closed words (pointed at element 0) with these labels."""
    geo = geo or Geometry(cx)
    els = lw.elements if isinstance(lw, LabelWord) else tuple(lw)
    n = len(els)
    out = []
    for s in geo.by_label.get((els[0][0], els[0][1]), []):
        path = [(s, geo.sibling[(s, els[0][2])])]

        def extend(k: int) -> None:
            x = path[-1][1]
            rel = els[k - 1][3]
            if k == n:
                if s in geo.ctype.get((x, (els[0][0], els[0][1]), rel), ()):
                    out.append(tuple(path))
                return
            h, si, so = els[k][:3]
            for f in geo.ctype.get((x, (h, si), rel), ()):
                path.append((f, geo.sibling[(f, so)]))
                extend(k + 1)
                path.pop()

        extend(1)
    return out


def label_word_of(cx: BlockComplex, t: Sequence[Traversal],
                  geo: Geometry | None = None) -> tuple[LabelElement, ...]:
    geo = geo or Geometry(cx)
    n = len(t)
    out = []
    for k, (e, x) in enumerate(t):
        f = t[(k + 1) % n][0]
        rel = next(r for g, r in cx.crossing_options(x) if g == f)
        out.append(geo.label[e] + (geo.label[x][1], rel))
    return tuple(out)


def enumerate_words(cx: BlockComplex, max_crossings: int,
                    max_length: float = math.inf, *, prune: bool = True,
                    workers: int = 1) -> Iterator[CrossingWord]:
    """Canonical primitive crossing words with at most max_crossings cells.

    Every surviving word is the least rotation of itself; the stream order is
    deterministic (sorted) whatever the worker count.
    """
    geo = Geometry(cx)
    words = set()
    for lw in enumerate_label_words(cx, max_crossings, max_length,
                                    prune=prune, workers=workers):
        for t in realize(cx, lw, geo):
            if is_primitive_word(t):
                words.add(least_rotation(t))
    for t in sorted(words):
        yield CrossingWord(t, cx.name)


# ---------------------------------------------------------- straighten
@dataclass(frozen=True)
class Chord:
    cell: int
    p: complex
    q: complex

    def matches(self, o: "Chord", tol: float = CHORD_TOL) -> bool:
        if self.cell != o.cell:
            return False
        return ((abs(self.p - o.p) < tol and abs(self.q - o.q) < tol)
                or (abs(self.p - o.q) < tol and abs(self.q - o.p) < tol))


@dataclass(frozen=True)
class ClosedGeodesic:
    length: float
    word: CrossingWord | None = None
    edges: tuple[tuple[int, int], ...] | None = None   # (edge, direction)
    holonomy: Isometry | None = None
    chords: tuple[Chord, ...] = ()
    crossing_points: tuple[complex, ...] = ()
    along_skeleton: bool = False
    vertex_grazing: bool = False
    strict_left: bool = False
    orientable: bool = True
    primitive: bool = True
    power: int = 1
    chord_slots: tuple[int, ...] = ()    # traversal index of each chord

    @property
    def is_edge_geodesic(self) -> bool:
        return self.edges is not None or self.along_skeleton


def develop(geo: Geometry, t: Sequence[Traversal]):
    """Frames of each traversal, developed (P, Q) sides and the holonomy."""
    e0 = t[0][0]
    a0 = geo.root_frame(e0)
    frames = [a0]
    sides = [geo.oriented_side(a0, e0, entry=True)]
    f = a0
    n = len(t)
    for k in range(n):
        e, x = t[k]
        sides.append(geo.oriented_side(f, x))
        f = f @ geo.crossing(x, t[(k + 1) % n][0])
        if k < n - 1:
            frames.append(f)
    h = f @ a0.inverse()
    return frames, sides, h, a0


def _line_point(u: float, v: float, p: complex, q: complex) -> complex:
    """Intersection of the directed axis u -> v with the line through p, q."""
    m = axis_frame(u, v)
    mp, mq = m(p), m(q)
    if abs(mp.real - mq.real) < 1e-14 * (abs(mp) + abs(mq)):
        y0 = math.sqrt(mp.imag * mq.imag)
    else:
        c0 = (abs(mp) ** 2 - abs(mq) ** 2) / (2 * (mp.real - mq.real))
        r2 = (mp.real - c0) ** 2 + mp.imag ** 2
        y0 = math.sqrt(max(r2 - c0 * c0, 1e-300))
    return m.inverse()(1j * y0)


def straighten(word: CrossingWord | Sequence[Traversal], cx: BlockComplex,
               geo: Geometry | None = None) -> ClosedGeodesic:
    """Realize a closed word as a closed geodesic, or raise.

    Raises NonHyperbolic, AxisMiss(index) or BranchAngleViolation(index).
    """
    t = tuple(word.traversals if isinstance(word, CrossingWord) else word)
    if not is_closed_word(cx, t):
        raise ValueError("word is not reduced and combinatorially closed")
    geo = geo or Geometry(cx)
    frames, sides, h, a0 = develop(geo, t)
    # a side end on the axis (a vertex the geodesic passes through) is
    # resolved only to about GRAZE_TOL far along the axis
    rep = axis_and_angles(h, sides, GRAZE_TOL)
    n = len(t)
    if rep.miss is not None:
        k = rep.miss
        crossed = t[k - 1][1] if k > 0 else t[-1][1]
        if cx.is_branch(crossed):
            raise BranchAngleViolation(k)
        raise AxisMiss(k)
    ts = rep.crossings
    # sides met at a vertex are crossed at one point; far along the axis
    # that point is only resolved to about GRAZE_TOL
    for k in range(n):
        if not ts[k + 1] >= ts[k] - GRAZE_TOL:
            raise AxisMiss(k + 1, "developed sides are crossed out of order")
    for i in range(len(sides)):
        for j in range(i + 1, len(sides)):
            if _same_segment(sides[i], sides[j]):
                raise AxisMiss(j, "word winds around a vertex")
    u, v = rep.repelling, rep.attracting
    points = [_line_point(u, v, p, q) for p, q in sides]
    chords = []
    slots = []
    along = False
    grazing = False
    for k in range(n):
        inv = frames[k].inverse()
        zin, zout = inv(points[k]), inv(points[k + 1])
        cell = geo.cell_of[t[k][0]]
        if hdist(zin, zout) > CHORD_TOL:
            chords.append(Chord(cell, zin, zout))
            slots.append(k)
            if _on_common_side(geo, cell, zin, zout):
                along = True
    for k, (p, q) in enumerate(sides):
        z = points[k]
        if min(hdist(z, p), hdist(z, q)) < GRAZE_TOL:
            grazing = True
    strict = all(rep.sides_left[k] > AXIS_TOL and rep.sides_right[k] < AXIS_TOL
                 for k in range(len(sides)))
    mult = Counter(_chord_key(c) for c in chords)
    power = reduce(math.gcd, mult.values()) if mult else 1
    return ClosedGeodesic(
        length=rep.length, word=CrossingWord(t, cx.name), holonomy=h,
        chords=tuple(chords), crossing_points=tuple(points[:-1]),
        along_skeleton=along, vertex_grazing=grazing, strict_left=strict,
        orientable=h.det > 0, primitive=power == 1, power=power,
        chord_slots=tuple(slots))


def relabel(g: ClosedGeodesic, t: Sequence[Traversal], geo: Geometry,
            rotate: int = 0) -> ClosedGeodesic:
    """The same developed geodesic carried by another word with equal labels.

    With ``rotate`` = r the result is reported for the word t[r:] + t[:r];
    its holonomy is then a conjugate of the stored one.
    """
    t = tuple(t)
    n = len(t)
    chords = tuple(Chord(geo.cell_of[t[k][0]], c.p, c.q)
                   for k, c in zip(g.chord_slots, g.chords))
    mult = Counter(_chord_key(c) for c in chords)
    power = reduce(math.gcd, mult.values()) if mult else 1
    r = rotate % n if n else 0
    pts = g.crossing_points
    return replace(g, word=CrossingWord(t[r:] + t[:r], geo.cx.name),
                   chords=chords, primitive=power == 1, power=power,
                   chord_slots=tuple((k - r) % n for k in g.chord_slots),
                   crossing_points=tuple(pts[r:] + pts[:r]))


def _chord_key(c: Chord) -> tuple:
    a = (round(c.p.real, 6), round(c.p.imag, 6))
    b = (round(c.q.real, 6), round(c.q.imag, 6))
    return (c.cell,) + (a + b if a <= b else b + a)


def _on_common_side(geo: Geometry, cell: int, z: complex, w: complex) -> bool:
    for e in geo.exits[cell]:
        p, q = geo.ends[e]
        ell = geo.length[e]
        if (abs(hdist(p, z) + hdist(z, q) - ell) < 1e-8
                and abs(hdist(p, w) + hdist(w, q) - ell) < 1e-8):
            return True
    return False


# -------------------------------------------------------- edge geodesics
def _skeleton(cx: BlockComplex, geo: Geometry):
    """Directed edge steps with their germs and lengths."""
    links, germs = cx._link()
    steps = []  # (edge, direction, start germ, end germ, length, vertex0, 1)
    for edge in cx.edges:
        e = edge.side_ends[0]
        g0, g1 = germs.find(2 * e), germs.find(2 * e + 1)
        ell = geo.length[e]
        steps.append((edge.index, +1, g0, g1, ell))
        steps.append((edge.index, -1, g1, g0, ell))
    germ_vertex = {}
    hops: dict[int, dict[int, int]] = {}
    for v, arcs in links.items():
        adj = defaultdict(list)
        for x, y in arcs:
            adj[x].append(y)
            adj[y].append(x)
        for g in adj:
            germ_vertex[g] = v
            dist = {g: 0}
            frontier = [g]
            while frontier:
                nxt = []
                for x in frontier:
                    for y in adj[x]:
                        if y not in dist:
                            dist[y] = dist[x] + 1
                            nxt.append(y)
                frontier = nxt
            hops[g] = dist
    return steps, germ_vertex, hops


def edge_geodesics(cx: BlockComplex, max_length: float,
                   geo: Geometry | None = None) -> list[ClosedGeodesic]:
    """Primitive closed geodesics contained in the skeleton.

    A closed edge walk is geodesic when at every vertex the incoming and
    outgoing germs are at least two corners (an angle pi) apart in the link.
    """
    geo = geo or Geometry(cx)
    steps, germ_vertex, hops = _skeleton(cx, geo)
    by_start = defaultdict(list)
    for k, st in enumerate(steps):
        by_start[germ_vertex[st[2]]].append(k)
    found = set()
    limit = max_length + 1e-9

    def straight(a, b) -> bool:
        return hops[steps[a][3]].get(steps[b][2], -1) >= 2

    for k0 in range(len(steps)):
        path = [k0]

        def extend(total: float) -> None:
            last = path[-1]
            v = germ_vertex[steps[last][3]]
            for k in by_start[v]:
                if not straight(last, k):
                    continue
                if k == k0:
                    found.add(tuple(path))
                if k > k0 and total + steps[k][4] <= limit:
                    path.append(k)
                    extend(total + steps[k][4])
                    path.pop()

        if steps[k0][4] <= limit:
            extend(steps[k0][4])
    out = {}
    for p in found:
        if not is_primitive_word(p):
            continue
        walk = tuple((steps[k][0], steps[k][1]) for k in p)
        rev = tuple((e, -d) for e, d in reversed(walk))
        key = min(least_rotation(walk), least_rotation(rev))
        if key in out:
            continue
        length = sum(steps[k][4] for k in p)
        out[key] = ClosedGeodesic(length=length, edges=key)
    return sorted(out.values(), key=lambda g: (g.length, g.edges))


# ---------------------------------------------------------- catalogue
@dataclass
class GeodesicClass:
    """One unoriented primitive closed geodesic and all words encoding it."""
    length: float
    representative: ClosedGeodesic
    encodings: list[ClosedGeodesic] = field(default_factory=list)
    profile: str = "avoids"

    @property
    def witness(self) -> str:
        r = self.representative
        if r.word is not None:
            return " ".join(f"{e}>{x}" for e, x in r.word.traversals)
        return "edges:" + " ".join(f"{e}{'+' if d > 0 else '-'}"
                                   for e, d in r.edges)


@dataclass
class Catalog:
    complex_name: str
    max_length: float
    max_crossings: int
    classes: list[GeodesicClass]
    crossing_bound_note: str
    edge_crosscheck: list[str] = field(default_factory=list)

    def lengths(self) -> list[float]:
        return sorted(c.length for c in self.classes)


def crossing_bound(cx: BlockComplex, max_length: float) -> int:
    """Safety cap on crossings for a length cutoff.

    Two consecutive chords of a transversal geodesic cannot both be short
    corner cuts at distinct vertices, so every pair of consecutive chords has
    length at least the shortest side; hence N <= 2 L / s_min + 2.
    """
    geo = Geometry(cx)
    smin = min(geo.length)
    return int(math.floor(2 * max_length / smin)) + 2


def _same_geodesic(a: ClosedGeodesic, b: ClosedGeodesic) -> bool:
    if abs(a.length - b.length) > 1e-7 or len(a.chords) != len(b.chords):
        return False
    used = [False] * len(b.chords)
    for ca in a.chords:
        for j, cb in enumerate(b.chords):
            if not used[j] and ca.matches(cb):
                used[j] = True
                break
        else:
            return False
    return True


def group_encodings(geods: list[ClosedGeodesic]) -> list[list[ClosedGeodesic]]:
    """Group accepted words that trace the same unoriented geodesic."""
    buckets: dict[tuple, list[ClosedGeodesic]] = defaultdict(list)
    for g in geods:
        buckets[tuple(sorted(c.cell for c in g.chords))].append(g)
    groups: list[list[ClosedGeodesic]] = []
    for key in sorted(buckets):
        groups.extend(_group_band(buckets[key]))
    groups.sort(key=lambda grp: (grp[0].length, grp[0].word.traversals))
    return groups


def _group_band(geods: list[ClosedGeodesic]) -> list[list[ClosedGeodesic]]:
    geods = sorted(geods, key=lambda g: g.length)
    groups: list[list[ClosedGeodesic]] = []
    band: list[list[ClosedGeodesic]] = []
    band_len = None
    for g in geods:
        if band_len is None or g.length - band_len > 1e-7:
            groups.extend(band)
            band = []
        band_len = g.length
        for grp in band:
            if _same_geodesic(grp[0], g):
                grp.append(g)
                break
        else:
            band.append([g])
    groups.extend(band)
    return groups


def classify_branch_profile(g: ClosedGeodesic | GeodesicClass,
                            cx: BlockComplex):
    """Return (profile, beta segments) for a geodesic.

    Profiles: "avoids", "contained", "crosses".  For crossing geodesics the
    beta segments are the maximal runs of traversals between branch
    crossings, each starting right after a branch crossing.
    """
    if isinstance(g, GeodesicClass):
        g = g.representative
    if not cx.is_amalgam:
        return "avoids", ()
    if g.edges is not None:
        ses = [cx.edges[e].side_ends[0] for e, _ in g.edges]
        if all(cx.is_branch(s) for s in ses):
            return "contained", ()
        verts = set()
        for s in ses:
            verts.update(cx.endpoint_vertices(s))
        bverts = set()
        for s in cx.branch_side_ends:
            bverts.update(cx.endpoint_vertices(s))
        return ("crosses" if verts & bverts else "avoids"), ()
    t = g.word.traversals
    cuts = [k for k, (_, x) in enumerate(t) if cx.is_branch(x)]
    if not cuts:
        return "avoids", ()
    n = len(t)
    betas = []
    for i, k in enumerate(cuts):
        k2 = cuts[(i + 1) % len(cuts)]
        start = (k + 1) % n
        length = (k2 - k) % n or n
        betas.append(tuple(t[(start + j) % n] for j in range(length)))
    return "crosses", tuple(betas)


def accepted_geodesics(cx: BlockComplex, max_crossings: int,
                       max_length: float = math.inf, *, workers: int = 1,
                       geo: Geometry | None = None) -> list[ClosedGeodesic]:
    """Straightened canonical words, one straightening per label word."""
    geo = geo or Geometry(cx)
    out: dict[tuple, ClosedGeodesic] = {}
    for lw in enumerate_label_words(cx, max_crossings, max_length,
                                    workers=workers):
        reals = realize(cx, lw, geo)
        if not reals:
            continue
        try:
            g0 = straighten(reals[0], cx, geo)
        except (NonHyperbolic, AxisMiss):
            continue
        if g0.length > max_length + 1e-9:
            continue
        for t in reals:
            if not is_primitive_word(t):
                continue
            key = least_rotation(t)
            if key not in out:
                r = next(k for k in range(len(t)) if t[k:] + t[:k] == key)
                out[key] = relabel(g0, t, geo, r)
    return [out[k] for k in sorted(out)]


def enumerate_geodesics(cx: BlockComplex, max_length: float,
                        max_crossings: int | None = None, *,
                        workers: int = 1, keep_encodings: bool = True
                        ) -> Catalog:
    """All primitive unoriented closed geodesics of length <= max_length."""
    if max_length <= 0:
        raise ValueError("max_length must be positive")
    bound = crossing_bound(cx, max_length)
    n = bound if max_crossings is None else min(max_crossings, bound)
    note = (f"crossing bound {n} (safety cap {bound} = floor(2L/s_min)+2)")
    geo = Geometry(cx)
    accepted = accepted_geodesics(cx, n, max_length, workers=workers,
                                  geo=geo)
    transversal = [g for g in accepted if not g.along_skeleton]
    skeleton_words = [g for g in accepted if g.along_skeleton]
    classes = []
    for grp in group_encodings(transversal):
        grp.sort(key=lambda g: (not g.strict_left, g.word.traversals))
        rep = grp[0]
        if not rep.primitive:
            continue
        gc = GeodesicClass(rep.length, rep, grp if keep_encodings else [rep])
        gc.profile = classify_branch_profile(rep, cx)[0]
        classes.append(gc)
    edges = edge_geodesics(cx, max_length, geo)
    for eg in edges:
        gc = GeodesicClass(eg.length, eg, [eg])
        gc.profile = classify_branch_profile(eg, cx)[0]
        classes.append(gc)
    classes.sort(key=lambda c: (round(c.length, 9), c.witness))
    check = _edge_crosscheck(edges, skeleton_words)
    return Catalog(cx.name, max_length, n, classes, note, check)


def _edge_crosscheck(edges, skeleton_words) -> list[str]:
    """Skeleton geodesics seen by transversal words must be in the walk list."""
    msgs = []
    lengths = [e.length for e in edges]
    for g in skeleton_words:
        if not any(abs(g.length - L) < 1e-7 for L in lengths):
            msgs.append(f"skeleton word of length {g.length:.9f} has no "
                        "matching edge walk")
    return msgs
