"""Combinatorial model of complexes assembled from octagonal building blocks.

A complex is a finite set of cells (whole octagons, or the two halves of an
octagon cut along its m-bisector), a list of side pairings that glue the
cells into closed surfaces, and a list of gluing classes.  Each gluing class
identifies two or more closed curves of the cell boundary with each other;
the identified curves form the branch locus of a surface amalgam.

Conventions used throughout the package:

* the sides of a cell are listed clockwise; side ``j`` runs from corner
  ``j - 1`` to corner ``j``, so corner ``j`` sits between sides ``j`` and
  ``j + 1``;
* the arc-length coordinate of a side starts at its start corner;
* a pairing is ``reversing`` when the start of one side is glued to the end
  of the other (the orientable gluing of two clockwise polygons) and
  ``preserving`` when start is glued to start.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

DATA_DIR = Path(__file__).resolve().parent / "data"
BUNDLED = ("s1", "s2", "x1_homeo", "x2_homeo", "x1_nonhomeo", "x2_nonhomeo",
           "x1_sec4", "x2_sec4")


class ComplexValidationError(ValueError):
    """Raised when a complex description violates the model's invariants."""


class Side(IntEnum):
    C_LEFT = 0
    A_TL = 1
    B_TOP = 2
    A_TR = 3
    C_RIGHT = 4
    A_BR = 5
    B_BOTTOM = 6
    A_BL = 7
    M = 8

    @property
    def length_class(self) -> str:
        return _LENGTH_CLASS[self]

    @property
    def label(self) -> str:
        return _SIDE_NAMES[self]

    @classmethod
    def parse(cls, text: str) -> "Side":
        try:
            return _SIDE_BY_NAME[text]
        except KeyError:
            raise ComplexValidationError(f"unknown side label {text!r}") from None


_LENGTH_CLASS = {
    Side.C_LEFT: "c", Side.C_RIGHT: "c",
    Side.A_TL: "a", Side.A_TR: "a", Side.A_BR: "a", Side.A_BL: "a",
    Side.B_TOP: "b", Side.B_BOTTOM: "b",
    Side.M: "m",
}
_SIDE_NAMES = {
    Side.C_LEFT: "C-left", Side.A_TL: "A-top-left", Side.B_TOP: "B-top",
    Side.A_TR: "A-top-right", Side.C_RIGHT: "C-right",
    Side.A_BR: "A-bottom-right", Side.B_BOTTOM: "B-bottom",
    Side.A_BL: "A-bottom-left", Side.M: "m",
}
_SIDE_BY_NAME = {v: k for k, v in _SIDE_NAMES.items()}


class Half(str, Enum):
    WHOLE = "whole"
    LEFT = "left"
    RIGHT = "right"


# clockwise side lists of the three cell shapes
CELL_SIDES: dict[Half, tuple[Side, ...]] = {
    Half.WHOLE: (Side.C_LEFT, Side.A_TL, Side.B_TOP, Side.A_TR, Side.C_RIGHT,
                 Side.A_BR, Side.B_BOTTOM, Side.A_BL),
    Half.LEFT: (Side.C_LEFT, Side.A_TL, Side.B_TOP, Side.M, Side.B_BOTTOM,
                Side.A_BL),
    Half.RIGHT: (Side.M, Side.B_TOP, Side.A_TR, Side.C_RIGHT, Side.A_BR,
                 Side.B_BOTTOM),
}


def wrap_block(n: int) -> int:
    """Block indices live in 1..8 with arithmetic mod 8 (0 maps to 8)."""
    return (n - 1) % 8 + 1


@dataclass(frozen=True, order=True)
class Cell:
    copy_id: int
    block_index: int
    half: Half = Half.WHOLE

    def __str__(self) -> str:
        tag = "" if self.half is Half.WHOLE else self.half.value[0].upper()
        return f"{self.copy_id}:B{self.block_index}{tag}"


@dataclass(frozen=True)
class SidePairing:
    end_a: tuple[Cell, Side]
    end_b: tuple[Cell, Side]
    orientation: str = "reversing"


@dataclass(frozen=True)
class Arc:
    cell: Cell
    side: Side
    forward: bool = True  # curve runs along the side's own direction


@dataclass(frozen=True)
class GluingClass:
    members: tuple[tuple[Arc, ...], ...]


@dataclass(frozen=True)
class Edge:
    """An edge of the quotient complex: a class of identified side-ends."""
    index: int
    side_ends: tuple[int, ...]
    length_class: str
    is_branch: bool


@dataclass(frozen=True)
class Component:
    cells: tuple[Cell, ...]
    euler: int
    boundary_count: int

    @property
    def genus(self) -> int:
        return (2 - self.euler - self.boundary_count) // 2

    @property
    def type(self) -> tuple[int, int]:
        return (self.genus, self.boundary_count)


@dataclass(frozen=True)
class EdgeCurve:
    """A closed curve in the skeleton, given as its cyclic list of edges."""
    edges: tuple[int, ...]
    length_pattern: tuple[str, ...]
    description: str = ""


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = defaultdict(list)
        for x in range(len(self.parent)):
            out[self.find(x)].append(x)
        return out


@dataclass(frozen=True)
class BlockComplex:
    name: str
    cells: tuple[Cell, ...]
    pairings: tuple[SidePairing, ...]
    gluing_classes: tuple[GluingClass, ...]
    b: float
    c: float
    copies: int = 1
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        self._validate_basic()
        self._compile()
        self._validate_links()

    # ------------------------------------------------------------------ build
    def _validate_basic(self) -> None:
        if not self.cells:
            raise ComplexValidationError(f"{self.name}: complex has no cells")
        if not (0 < self.c < self.b < 1):
            raise ComplexValidationError(
                f"{self.name}: metric (b, c) = ({self.b}, {self.c}) "
                "violates 0 < c < b < 1")
        if len(set(self.cells)) != len(self.cells):
            raise ComplexValidationError(f"{self.name}: duplicate cells")
        for copy in {cl.copy_id for cl in self.cells}:
            halves = {cl.half is Half.WHOLE for cl in self.cells
                      if cl.copy_id == copy}
            if len(halves) != 1:
                raise ComplexValidationError(
                    f"{self.name}: copy {copy} mixes whole and half cells")
        cellset = set(self.cells)
        for cl in self.cells:
            if cl.half is not Half.WHOLE:
                twin = Cell(cl.copy_id, cl.block_index,
                            Half.RIGHT if cl.half is Half.LEFT else Half.LEFT)
                if twin not in cellset:
                    raise ComplexValidationError(
                        f"{self.name}: half cell {cl} lacks its twin")

    def _compile(self) -> None:
        ix = self._index
        cells = self.cells
        cell_id = {cl: k for k, cl in enumerate(cells)}
        se_list: list[tuple[int, Side]] = []
        se_id: dict[tuple[int, Side], int] = {}
        for k, cl in enumerate(cells):
            for s in CELL_SIDES[cl.half]:
                se_id[(k, s)] = len(se_list)
                se_list.append((k, s))

        def lookup(end: tuple[Cell, Side]) -> int:
            cl, s = end
            if cl not in cell_id:
                raise ComplexValidationError(
                    f"{self.name}: pairing names unknown cell {cl}")
            key = (cell_id[cl], s)
            if key not in se_id:
                raise ComplexValidationError(
                    f"{self.name}: cell {cl} has no side {s.label}")
            return se_id[key]

        partner: dict[int, tuple[int, str]] = {}
        for p in self.pairings:
            ea, eb = lookup(p.end_a), lookup(p.end_b)
            if p.orientation not in ("reversing", "preserving"):
                raise ComplexValidationError(
                    f"{self.name}: bad orientation {p.orientation!r}")
            if p.end_a[1].length_class != p.end_b[1].length_class:
                raise ComplexValidationError(
                    f"{self.name}: length class mismatch in pairing "
                    f"{_fmt_end(p.end_a)} ~ {_fmt_end(p.end_b)}")
            if ea == eb:
                raise ComplexValidationError(
                    f"{self.name}: side {_fmt_end(p.end_a)} paired to itself")
            for e in (ea, eb):
                if e in partner:
                    k, s = se_list[e]
                    raise ComplexValidationError(
                        f"{self.name}: side ({cells[k]}, {s.label}) "
                        "occurs in two pairings")
            partner[ea] = (eb, p.orientation)
            partner[eb] = (ea, p.orientation)
        for e, (k, s) in enumerate(se_list):
            if e not in partner:
                raise ComplexValidationError(
                    f"{self.name}: unpaired side ({cells[k]}, {s.label})")

        # branch bundles: every side-end on a gluing curve, with the sign of
        # its own direction relative to the curve direction
        bundles: list[list[tuple[int, bool]]] = []
        bundle_of: dict[int, int] = {}
        for gc in self.gluing_classes:
            if len(gc.members) < 2:
                raise ComplexValidationError(
                    f"{self.name}: gluing class needs at least two curves")
            lengths = {len(m) for m in gc.members}
            if len(lengths) != 1:
                raise ComplexValidationError(
                    f"{self.name}: gluing class members differ in arc count")
            for pos in range(lengths.pop()):
                arcs = [m[pos] for m in gc.members]
                if len({a.side.length_class for a in arcs}) != 1:
                    raise ComplexValidationError(
                        f"{self.name}: gluing class arcs differ in length "
                        f"class at position {pos}")
                members: list[tuple[int, bool]] = []
                for a in arcs:
                    e = lookup((a.cell, a.side))
                    pe, orient = partner[e]
                    members.append((e, a.forward))
                    members.append(
                        (pe, (not a.forward) if orient == "reversing"
                         else a.forward))
                for e, _ in members:
                    if e in bundle_of:
                        k, s = se_list[e]
                        raise ComplexValidationError(
                            f"{self.name}: arc ({cells[k]}, {s.label}) "
                            "appears in two gluing positions")
                    bundle_of[e] = len(bundles)
                bundles.append(members)
            self._check_curves_closed(gc, lookup, se_list, partner)

        # crossing options from each side-end: (target, relation)
        crossing: list[tuple[tuple[int, str], ...]] = []
        for e in range(len(se_list)):
            if e in bundle_of:
                members = bundles[bundle_of[e]]
                sign = dict(members)[e]
                opts = tuple(
                    (f, "preserving" if sf == sign else "reversing")
                    for f, sf in members if f != e)
            else:
                opts = (partner[e],)
            crossing.append(opts)

        # corner and germ identifications
        starts = []
        ncorner = 0
        for k, cl in enumerate(cells):
            starts.append(ncorner)
            ncorner += len(CELL_SIDES[cl.half])

        def side_pos(e: int) -> tuple[int, int, int]:
            k, s = se_list[e]
            sides = CELL_SIDES[cells[k].half]
            return k, sides.index(s), len(sides)

        def end_corners(e: int) -> tuple[int, int]:
            k, j, n = side_pos(e)
            return starts[k] + (j - 1) % n, starts[k] + j

        ix.update(cell_id=cell_id, se_list=se_list, se_id=se_id,
                  partner=partner, crossing=crossing, bundle_of=bundle_of,
                  bundles=bundles, corner_start=starts, ncorner=ncorner)
        object.__setattr__(self, "_end_corners", end_corners)
        object.__setattr__(self, "_side_pos", side_pos)

    def _check_curves_closed(self, gc, lookup, se_list, partner) -> None:
        # consecutive arcs of each member must share a corner after gluing;
        # this is verified in _validate_links once vertex classes exist
        self._index.setdefault("curves", []).append(gc)

    def _identify(self, cut: frozenset[int] = frozenset()):
        """Union-find over corners and side-ends, skipping cut side-ends."""
        ix = self._index
        se_list, crossing = ix["se_list"], ix["crossing"]
        corners = _UnionFind(ix["ncorner"])
        edges = _UnionFind(len(se_list))
        cellsuf = _UnionFind(len(self.cells))
        for e in range(len(se_list)):
            if e in cut:
                continue
            s0, s1 = self._end_corners(e)
            for f, rel in crossing[e]:
                if f in cut:
                    continue
                t0, t1 = self._end_corners(f)
                if rel == "reversing":
                    corners.union(s0, t1)
                    corners.union(s1, t0)
                else:
                    corners.union(s0, t0)
                    corners.union(s1, t1)
                edges.union(e, f)
                cellsuf.union(se_list[e][0], se_list[f][0])
        return corners, edges, cellsuf

    # ------------------------------------------------------------ properties
    @cached_property
    def _structure(self):
        corners, edges, _ = self._identify()
        vclass = {x: corners.find(x) for x in range(self._index["ncorner"])}
        eclass = {x: edges.find(x) for x in range(len(self._index["se_list"]))}
        vids = {r: k for k, r in enumerate(sorted(set(vclass.values())))}
        eids = {r: k for k, r in enumerate(sorted(set(eclass.values())))}
        vertex_of_corner = [vids[vclass[x]] for x in range(len(vclass))]
        edge_of_se = [eids[eclass[x]] for x in range(len(eclass))]
        members: dict[int, list[int]] = defaultdict(list)
        for e, k in enumerate(edge_of_se):
            members[k].append(e)
        branch = set(self._index["bundle_of"])
        edge_list = []
        for k in range(len(eids)):
            ses = tuple(members[k])
            lc = self._index["se_list"][ses[0]][1].length_class
            edge_list.append(Edge(k, ses, lc, ses[0] in branch))
        return vertex_of_corner, edge_of_se, tuple(edge_list)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._structure[2]

    def edge_of(self, cell: Cell, side: Side) -> Edge:
        e = self.side_end(cell, side)
        return self.edges[self._structure[1][e]]

    def side_end(self, cell: Cell, side: Side) -> int:
        return self._index["se_id"][(self._index["cell_id"][cell], side)]

    def side_end_info(self, e: int) -> tuple[Cell, Side]:
        k, s = self._index["se_list"][e]
        return self.cells[k], s

    def crossing_options(self, e: int) -> tuple[tuple[int, str], ...]:
        return self._index["crossing"][e]

    def partner(self, e: int) -> int:
        """Side-end glued to e by its surface pairing (ignoring the branch)."""
        return self._index["partner"][e][0]

    def bundle(self, e: int) -> int | None:
        """Index of the branch arc e lies on, or None."""
        return self._index["bundle_of"].get(e)

    def bundle_sign(self, e: int) -> bool | None:
        """Whether e runs along the branch curve's direction."""
        if e not in self._index["bundle_of"]:
            return None
        return dict(self._index["bundles"][self._index["bundle_of"][e]])[e]

    @property
    def side_end_count(self) -> int:
        return len(self._index["se_list"])

    def is_branch(self, e: int) -> bool:
        return e in self._index["bundle_of"]

    @property
    def is_amalgam(self) -> bool:
        return bool(self.gluing_classes)

    @property
    def branch_side_ends(self) -> frozenset[int]:
        return frozenset(self._index["bundle_of"])

    def endpoint_vertices(self, e: int) -> tuple[int, int]:
        s0, s1 = self._end_corners(e)
        vc = self._structure[0]
        return vc[s0], vc[s1]

    # ---------------------------------------------------------- link checks
    def _link(self, cut: frozenset[int] = frozenset()):
        """Link graph of every vertex: nodes are edge germs, arcs are corners.

        A germ is (side-end class, end) where end 0 is the start corner.
        """
        corners, edges, _ = self._identify(cut)
        ix = self._index
        germs = _UnionFind(2 * len(ix["se_list"]))
        for e in range(len(ix["se_list"])):
            if e in cut:
                continue
            for f, rel in ix["crossing"][e]:
                if f in cut:
                    continue
                if rel == "reversing":
                    germs.union(2 * e, 2 * f + 1)
                    germs.union(2 * e + 1, 2 * f)
                else:
                    germs.union(2 * e, 2 * f)
                    germs.union(2 * e + 1, 2 * f + 1)
        links: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for k, cl in enumerate(self.cells):
            sides = CELL_SIDES[cl.half]
            n = len(sides)
            for j in range(n):
                corner = ix["corner_start"][k] + j
                here = ix["se_id"][(k, sides[j])]
                nxt = ix["se_id"][(k, sides[(j + 1) % n])]
                links[corners.find(corner)].append(
                    (germs.find(2 * here + 1), germs.find(2 * nxt)))
        return links, germs

    def _validate_links(self) -> None:
        links, germs = self._link()
        branch_germs = {germs.find(2 * e + t) for e in self.branch_side_ends
                        for t in (0, 1)}
        for v, arcs in links.items():
            touches = {g for arc in arcs for g in arc} & branch_germs
            if not touches:
                if len(arcs) != 4 or not _is_cycle(arcs):
                    raise ComplexValidationError(
                        f"{self.name}: vertex-link failure, interior vertex "
                        f"has {len(arcs)} corners")
                continue
            for run in _split_runs(arcs, touches):
                if run != 2:
                    raise ComplexValidationError(
                        f"{self.name}: vertex-link failure at a branch vertex "
                        f"(half-plane with {run} corners)")
        for gc in self.gluing_classes:
            for member in gc.members:
                n = len(member)
                for i in range(n):
                    a, b = member[i], member[(i + 1) % n]
                    ea = self.side_end(a.cell, a.side)
                    eb = self.side_end(b.cell, b.side)
                    va = self.endpoint_vertices(ea)[1 if a.forward else 0]
                    vb = self.endpoint_vertices(eb)[0 if b.forward else 1]
                    if va != vb:
                        raise ComplexValidationError(
                            f"{self.name}: gluing curve does not close at "
                            f"({a.cell}, {a.side.label})")

    def link_hops(self, v_germ_a: int, v_germ_b: int,
                  cut: frozenset[int] = frozenset()) -> int:
        """Number of corners on the shortest link path between two germs."""
        links, _ = self._link(cut)
        for arcs in links.values():
            nodes = {g for arc in arcs for g in arc}
            if v_germ_a in nodes:
                return _bfs_hops(arcs, v_germ_a, v_germ_b)
        raise KeyError(v_germ_a)

    # ------------------------------------------------------------ topology
    @cached_property
    def euler_characteristic(self) -> int:
        vc, ec, _ = self._structure
        return len(set(vc)) - len(set(ec)) + len(self.cells)

    def cut_along(self, curves: Iterable[EdgeCurve | int]) -> list[Component]:
        """Cut along closed edge-curves (or raw edge indices)."""
        cut_edges: set[int] = set()
        for cv in curves:
            if isinstance(cv, EdgeCurve):
                cut_edges.update(cv.edges)
            else:
                cut_edges.add(int(cv))
        for k in cut_edges:
            if not 0 <= k < len(self.edges):
                raise ComplexValidationError(f"edge {k} not in the skeleton")
        cut = frozenset(e for k in cut_edges for e in self.edges[k].side_ends)
        return self._components(cut)

    def _components(self, cut: frozenset[int]) -> list[Component]:
        corners, edges, cellsuf = self._identify(cut)
        ix = self._index
        comp_cells: dict[int, list[int]] = defaultdict(list)
        for k in range(len(self.cells)):
            comp_cells[cellsuf.find(k)].append(k)
        out = []
        for ks in comp_cells.values():
            kset = set(ks)
            ses = [e for e, (k, _) in enumerate(ix["se_list"]) if k in kset]
            verts = {corners.find(c) for k in ks
                     for c in range(ix["corner_start"][k],
                                    ix["corner_start"][k]
                                    + len(CELL_SIDES[self.cells[k].half]))}
            inner = {edges.find(e) for e in ses if e not in cut}
            bnd = [e for e in ses if e in cut]
            # boundary cycles: boundary side-ends linked through vertices
            buf = _UnionFind(len(bnd))
            at_vertex: dict[int, list[int]] = defaultdict(list)
            for i, e in enumerate(bnd):
                for c in self._end_corners(e):
                    at_vertex[corners.find(c)].append(i)
            for idxs in at_vertex.values():
                for i in idxs[1:]:
                    buf.union(idxs[0], i)
            nb = len(buf.classes()) if bnd else 0
            euler = len(verts) - len(inner) - len(bnd) + len(ks)
            out.append(Component(tuple(self.cells[k] for k in sorted(ks)),
                                 euler, nb))
        out.sort(key=lambda c: (c.cells[0], len(c.cells)))
        return out

    def branch_edges(self) -> list[int]:
        return sorted({e.index for e in self.edges if e.is_branch})

    def chambers(self) -> list[tuple[int, int]]:
        """Homeomorphism types (genus, boundary count) of the chambers."""
        if not self.is_amalgam:
            raise ComplexValidationError(
                f"{self.name}: closed surface has no chambers")
        comps = self.cut_along(self.branch_edges())
        return sorted(c.type for c in comps)

    def combinatorial_systoles(self, cut_edges: Sequence[int] | None = None
                               ) -> list[EdgeCurve]:
        """Closed geodesic loops made of a single c-edge.

        On an amalgam the search runs inside the chambers (the complex cut
        along its branch edges) unless ``cut_edges`` says otherwise;
        straightness is judged in the links of the cut complex.
        """
        if cut_edges is None:
            cut_edges = self.branch_edges()
        cut_set = set(cut_edges)
        cut = frozenset(e for k in cut_set for e in self.edges[k].side_ends)
        links, germs = self._link(cut)
        corners, _, _ = self._identify(cut)
        out = []
        for edge in self.edges:
            if edge.length_class != "c" or edge.index in cut_set:
                continue
            e = edge.side_ends[0]
            s0, s1 = self._end_corners(e)
            if corners.find(s0) != corners.find(s1):
                continue
            g0, g1 = germs.find(2 * e), germs.find(2 * e + 1)
            arcs = links[corners.find(s0)]
            if _bfs_hops(arcs, g0, g1) >= 2:
                cl, s = self.side_end_info(e)
                nb = cl.block_index if s is Side.C_RIGHT else wrap_block(
                    cl.block_index - 1)
                out.append(EdgeCurve((edge.index,), ("c",),
                                     f"between B{nb} and B{wrap_block(nb + 1)}"
                                     f" (copy {cl.copy_id})"))
        return out

    @property
    def block_count(self) -> int:
        return len({(c.copy_id, c.block_index) for c in self.cells})


def _is_cycle(arcs: list[tuple[int, int]]) -> bool:
    deg = Counter(g for arc in arcs for g in arc)
    if any(d != 2 for d in deg.values()):
        return False
    return _bfs_hops(arcs, arcs[0][0], arcs[0][1]) >= 0 and len(
        _component(arcs, arcs[0][0])) == len(deg)


def _component(arcs, start):
    adj = defaultdict(set)
    for a, b in arcs:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {start}, [start]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return seen


def _bfs_hops(arcs, a, b) -> int:
    adj = defaultdict(list)
    for x, y in arcs:
        adj[x].append(y)
        adj[y].append(x)
    if a == b:
        # a loop edge: distance around the link from one germ to itself is 0
        return 0
    dist = {a: 0}
    frontier = [a]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist.get(b, -1)


def _split_runs(arcs, stops) -> list[int]:
    """Lengths (in corners) of link paths between consecutive branch germs."""
    adj = defaultdict(list)
    for idx, (x, y) in enumerate(arcs):
        adj[x].append((y, idx))
        adj[y].append((x, idx))
    used: set[int] = set()
    runs = []
    for s in stops:
        for y, idx in adj[s]:
            if idx in used:
                continue
            used.add(idx)
            length, cur = 1, y
            while cur not in stops:
                step = [(z, i) for z, i in adj[cur] if i not in used]
                if not step:
                    length = -1
                    break
                z, i = step[0]
                used.add(i)
                length += 1
                cur = z
            runs.append(length)
    return runs


def _fmt_end(end: tuple[Cell, Side]) -> str:
    return f"({end[0]}, {end[1].label})"


# ---------------------------------------------------------------- loading
def _parse_cell(raw: Sequence) -> Cell:
    if len(raw) == 2:
        return Cell(int(raw[0]), int(raw[1]))
    return Cell(int(raw[0]), int(raw[1]), Half(raw[2]))


def _parse_end(raw: Sequence) -> tuple[Cell, Side]:
    if not isinstance(raw, (list, tuple)) or len(raw) not in (3, 4):
        raise ComplexValidationError(f"malformed side reference {raw!r}")
    return _parse_cell(raw[:-1]), Side.parse(raw[-1])


def complex_from_dict(doc: dict) -> BlockComplex:
    try:
        name = str(doc["name"])
        metric = doc["metric"]
        b, c = float(metric["b"]), float(metric["c"])
        cells = tuple(sorted(_parse_cell(x) for x in doc["cells"]))
        pairings = tuple(
            SidePairing(_parse_end(p["end_a"]), _parse_end(p["end_b"]),
                        p.get("orientation", "reversing"))
            for p in doc["pairings"])
        classes = []
        for gc in doc.get("gluing_classes", []):
            members = []
            for curve in gc["members"]:
                arcs = []
                for arc in curve:
                    cell, side = _parse_end(arc[:-1])
                    if arc[-1] not in ("+", "-"):
                        raise ComplexValidationError(
                            f"arc direction must be '+' or '-': {arc!r}")
                    arcs.append(Arc(cell, side, arc[-1] == "+"))
                members.append(tuple(arcs))
            classes.append(GluingClass(tuple(members)))
        copies = int(doc.get("copies", 1))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ComplexValidationError):
            raise
        raise ComplexValidationError(f"schema violation: {exc!r}") from exc
    cx = BlockComplex(name, cells, pairings, tuple(classes), b, c, copies)
    if "euler_characteristic" in doc:
        if cx.euler_characteristic != int(doc["euler_characteristic"]):
            raise ComplexValidationError(
                f"{name}: Euler characteristic {cx.euler_characteristic} "
                f"differs from declared {doc['euler_characteristic']}")
    return cx


def load_complex(source: str | Path | dict, metric: tuple[float, float] | None
                 = None) -> BlockComplex:
    """Load a complex from JSON text, a path, a bundled name, or a dict."""
    if isinstance(source, dict):
        doc = dict(source)
    else:
        text = str(source)
        path = Path(text)
        if text in BUNDLED:
            path = DATA_DIR / f"{text}.json"
        if text.lstrip().startswith("{"):
            raw = text
        else:
            if not path.exists():
                raise ComplexValidationError(f"no such complex file: {text}")
            raw = path.read_text()
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ComplexValidationError(f"invalid JSON: {exc}") from exc
    if metric is not None:
        doc["metric"] = {"b": metric[0], "c": metric[1]}
    return complex_from_dict(doc)


def complex_to_dict(cx: BlockComplex) -> dict:
    def end(e):
        cl, s = e
        return [cl.copy_id, cl.block_index, cl.half.value, s.label]
    return {
        "name": cx.name,
        "metric": {"b": cx.b, "c": cx.c},
        "copies": cx.copies,
        "cells": [[c.copy_id, c.block_index, c.half.value] for c in cx.cells],
        "pairings": [{"end_a": end(p.end_a), "end_b": end(p.end_b),
                      "orientation": p.orientation} for p in cx.pairings],
        "gluing_classes": [
            {"members": [[[a.cell.copy_id, a.cell.block_index,
                           a.cell.half.value, a.side.label,
                           "+" if a.forward else "-"] for a in m]
                         for m in gc.members]}
            for gc in cx.gluing_classes],
    }
