"""Transplantation of closed words between paired complexes.

Blocks are identical, so a word of one complex is carried to the other by
keeping its side labels and choosing new blocks.  The block offset between
corresponding cells, delta = n' - n (mod 8), evolves by a table that is
derived from the data, not assumed.  For amalgams the same label-following
builds translated copies of the segments between branch crossings; counting
the admissible cyclic concatenations of such copies gives the number of
closed geodesics identical to a given one.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .block_complex import BlockComplex, Cell, Half, Side, wrap_block
from .geodesic_enumerator import (ClosedGeodesic, CrossingWord, Geometry,
                                  Traversal, is_closed_word, least_rotation)

LENGTH_CLASSES = ("a", "b", "c", "m")
# blocks whose m-arc lies on the gluing curve of the three-copy amalgams and
# whose index set is invariant under the offset 4
ANCHOR_BLOCKS = frozenset({1, 4, 5, 8})


class IllDefined(ValueError):
    def __init__(self, length_class: str, delta: int, values) -> None:
        super().__init__(f"transition ({length_class}, delta={delta}) is "
                         f"realized with different results {sorted(values)}")
        self.length_class = length_class
        self.delta = delta


class ClosureFailure(RuntimeError):
    pass


class NoValidCopy(RuntimeError):
    pass


class NotCrossing(ValueError):
    pass


def _word(w: CrossingWord | ClosedGeodesic | Sequence[Traversal]
          ) -> tuple[Traversal, ...]:
    if isinstance(w, ClosedGeodesic):
        if w.word is None:
            raise NotCrossing("edge geodesics have no crossing word")
        w = w.word
    if isinstance(w, CrossingWord):
        return w.traversals
    return tuple(tuple(x) for x in w)


def _geometry(cx: BlockComplex) -> Geometry:
    geo = cx._index.get("geometry")
    if geo is None:
        geo = cx._index["geometry"] = Geometry(cx)
    return geo


def _cell(cx: BlockComplex, e: int) -> Cell:
    return cx.side_end_info(e)[0]


def _side(cx: BlockComplex, e: int) -> Side:
    return cx.side_end_info(e)[1]


# ------------------------------------------------------------- delta table
@dataclass(frozen=True)
class DeltaState:
    delta: int

    def advance(self, table: "TransitionTable", length_class: str
                ) -> "DeltaState":
        return DeltaState(table.step(length_class, self.delta))


@dataclass(frozen=True)
class TransitionTable:
    rules: dict
    unreachable: tuple = ()

    def step(self, length_class: str, delta: int) -> int:
        return self.rules[(length_class, delta % 8)]

    def stated_rule_mismatches(self) -> list[str]:
        """Compare with the stated cases: a moves even offsets by 4 and fixes
        odd ones, c fixes everything, b fixes 0 and 4 and moves 2 and 6 by 4."""
        want = {}
        for d in range(8):
            want[("a", d)] = (d + 4) % 8 if d % 2 == 0 else d
            want[("c", d)] = d
        for d in (0, 4):
            want[("b", d)] = d
        for d in (2, 6):
            want[("b", d)] = (d + 4) % 8
        out = []
        for key, v in sorted(want.items()):
            got = self.rules.get(key)
            if got != v:
                out.append(f"{key}: expected {v}, derived {got}")
        return out

    def as_rows(self) -> list[dict]:
        return [{"length_class": lc, "delta": d, "new_delta": v}
                for (lc, d), v in sorted(self.rules.items())]


def derive_transition_table(pair: tuple[BlockComplex, BlockComplex]
                            ) -> TransitionTable:
    """Observe delta changes over every realization in the pair.

    For each cell n of the first complex, offset d and side s, compare the
    block reached by crossing s from n with the block reached by crossing s
    from n + d in the second complex.  Branch bundles are ignored: the
    surface pairings alone define the table.
    """
    a, b = pair
    if (a.b, a.c) != (b.b, b.c):
        raise ValueError("complexes are built from different blocks")
    seen: dict[tuple[str, int], set[int]] = defaultdict(set)
    cells_b = set(b.cells)
    for cell in a.cells:
        for e in range(a.side_end_count):
            if _cell(a, e) != cell:
                continue
            side = _side(a, e)
            m = _cell(a, a.partner(e)).block_index
            for d in range(8):
                twin = Cell(cell.copy_id, wrap_block(cell.block_index + d),
                            cell.half)
                if twin not in cells_b:
                    continue
                m2 = _cell(b, b.partner(b.side_end(twin, side))).block_index
                seen[(side.length_class, d)].add((m2 - m) % 8)
    rules = {}
    for key, vals in seen.items():
        if len(vals) != 1:
            raise IllDefined(key[0], key[1], vals)
        rules[key] = vals.pop()
    classes = {lc for lc, _ in rules}
    missing = tuple((lc, d) for lc in sorted(classes) for d in range(8)
                    if (lc, d) not in rules)
    return TransitionTable(rules, missing)


# ------------------------------------------------------- Buser transplant
def crossing_counts(cx: BlockComplex, t: Sequence[Traversal]) -> Counter:
    return Counter(_side(cx, x).length_class for _, x in t)


def initial_offset(n_a: int, n_b: int) -> int:
    """Starting block offset of the transplant: 0 when #a is even, 1 when
    #a is odd and #b even, 2 when both are odd."""
    if n_a % 2 == 0:
        return 0
    return 1 if n_b % 2 == 0 else 2


def initiate(word: CrossingWord | Sequence[Traversal], cx: BlockComplex
             ) -> int:
    n = crossing_counts(cx, _word(word))
    return initial_offset(n["a"], n["b"])


def start_block(block: int, offset: int) -> int:
    return wrap_block(block + offset)


def _follow(src: BlockComplex, t: Sequence[Traversal], dst: BlockComplex,
            first: Cell, closed: bool = True) -> tuple[Traversal, ...]:
    """Walk t's labels in dst from cell ``first`` along surface pairings."""
    out = []
    cell = first
    for k, (e, x) in enumerate(t):
        try:
            e2 = dst.side_end(cell, _side(src, e))
            x2 = dst.side_end(cell, _side(src, x))
        except KeyError:
            raise ClosureFailure(f"cell {cell} missing in {dst.name}")
        if out and dst.partner(out[-1][1]) != e2:
            raise ClosureFailure("label walk left the expected side")
        out.append((e2, x2))
        if k + 1 < len(t):
            nxt = dst.partner(x2)
            if _side(dst, nxt) != _side(src, t[k + 1][0]):
                raise ClosureFailure(
                    f"crossing {_side(dst, x2).label} lands on "
                    f"{_side(dst, nxt).label}, expected "
                    f"{_side(src, t[k + 1][0]).label}")
            cell = _cell(dst, nxt)
    if closed and dst.partner(out[-1][1]) != out[0][0]:
        raise ClosureFailure(f"transplanted word does not close in {dst.name}")
    return tuple(out)


def transplant_word(word: CrossingWord | Sequence[Traversal],
                    source: BlockComplex, target: BlockComplex, *,
                    reverse: bool = False) -> CrossingWord:
    """Carry a closed word of one closed surface to its partner.

    ``reverse`` selects the rules for the opposite direction (negated
    offset), so that transplanting forward and then back is the identity.
    """
    t = _word(word)
    off = initiate(t, source)
    if reverse:
        off = -off
    c0 = _cell(source, t[0][0])
    first = Cell(c0.copy_id, start_block(c0.block_index, off), c0.half)
    return CrossingWord(_follow(source, t, target, first), target.name)


def delta_trace(source: BlockComplex, t: Sequence[Traversal],
                target: BlockComplex, t2: Sequence[Traversal]) -> list[int]:
    return [(_cell(target, e2).block_index - _cell(source, e).block_index) % 8
            for (e, _), (e2, _) in zip(t, t2)]


@dataclass
class BijectionReport:
    size: int
    injective: bool
    into_target: bool
    inverse_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.into_target and self.inverse_ok


def check_bijection(words: Iterable[CrossingWord], source: BlockComplex,
                    target: BlockComplex,
                    target_words: Iterable[CrossingWord] | None = None
                    ) -> BijectionReport:
    """Injectivity by hashing canonical images, surjectivity by comparing
    with the target word set and transplanting every image back."""
    words = [w.traversals for w in words]
    images = {}
    fails = []
    inverse_ok = True
    for t in words:
        try:
            out = transplant_word(t, source, target).traversals
        except ClosureFailure as exc:
            fails.append(f"{t}: {exc}")
            continue
        back = transplant_word(out, target, source, reverse=True).traversals
        if back != t:
            inverse_ok = False
            fails.append(f"{t}: back-transplant differs")
        images.setdefault(least_rotation(out), []).append(t)
    injective = all(len(v) == 1 for v in images.values()) and not fails
    into = True
    if target_words is not None:
        tw = {w.traversals for w in target_words}
        into = set(images) == tw
        if not into:
            fails.append(f"image misses {len(tw - set(images))} target words,"
                         f" has {len(set(images) - tw)} extra")
    return BijectionReport(len(words), injective, into, inverse_ok, fails)


# ------------------------------------------------------ branch segments
@dataclass(frozen=True)
class BetaSegment:
    """A maximal run of traversals between two branch crossings.

    ``rel_out`` is the relation of the crossing that leaves the segment.
    """
    traversals: tuple[Traversal, ...]
    rel_out: str

    @property
    def entry(self) -> int:
        return self.traversals[0][0]

    @property
    def exit(self) -> int:
        return self.traversals[-1][1]


def _relation(cx: BlockComplex, x: int, f: int) -> str:
    for g, rel in cx.crossing_options(x):
        if g == f:
            return rel
    raise ValueError(f"side-end {x} does not cross into {f}")


def beta_decomposition(word, cx: BlockComplex, by: str = "branch"
                       ) -> tuple[BetaSegment, ...]:
    """Split a closed word at its branch crossings.

    by="branch" cuts at every crossing of the gluing curve; by="sheet" cuts
    only where the word leaves the surface it is travelling in, i.e. where
    the next cell is not the one the surface pairing leads to.
    """
    t = _word(word)
    n = len(t)
    cuts = []
    for k, (_, x) in enumerate(t):
        f = t[(k + 1) % n][0]
        if by == "branch":
            cut = cx.is_branch(x)
        elif by == "sheet":
            cut = cx.partner(x) != f
        else:
            raise ValueError(f"unknown decomposition {by!r}")
        if cut:
            cuts.append(k)
    if not cuts:
        raise NotCrossing("word does not cross the branch locus")
    out = []
    for i, k in enumerate(cuts):
        k2 = cuts[(i + 1) % len(cuts)]
        size = (k2 - k) % n or n
        seg = tuple(t[(k + 1 + j) % n] for j in range(size))
        out.append(BetaSegment(seg, _relation(cx, seg[-1][1],
                                              t[(k2 + 1) % n][0])))
    return tuple(out)


def _labels(cx: BlockComplex, seg: Sequence[Traversal]):
    return [(_cell(cx, e).half, _side(cx, e), _side(cx, x)) for e, x in seg]


def _copies_by_labels(labels, cx: BlockComplex) -> list[tuple[Traversal, ...]]:
    half, s_in, _ = labels[0]
    out = []
    for e in cx.branch_side_ends:
        cell, side = cx.side_end_info(e)
        if cell.half != half or side != s_in:
            continue
        path = []
        cur = cell
        ok = True
        for k, (h, si, so) in enumerate(labels):
            if cur.half != h:
                ok = False
                break
            e2 = cx.side_end(cur, si)
            x2 = cx.side_end(cur, so)
            path.append((e2, x2))
            last = k == len(labels) - 1
            if cx.is_branch(x2) != last:
                ok = False
                break
            if not last:
                f = cx.partner(x2)
                if _side(cx, f) != labels[k + 1][1]:
                    ok = False
                    break
                cur = _cell(cx, f)
        if ok:
            out.append(tuple(path))
    return sorted(out)


def _same_point(cx: BlockComplex, e: int, f: int) -> bool:
    return (e == f or (cx.bundle(e) is not None
                       and cx.bundle(e) == cx.bundle(f)
                       and cx.bundle_sign(e) == cx.bundle_sign(f)))


def translated_copies(beta: BetaSegment | Sequence[Traversal],
                      cx: BlockComplex, source: BlockComplex | None = None,
                      *, same_endpoints: bool = True
                      ) -> list[tuple[Traversal, ...]]:
    """Locally congruent copies of a segment with endpoints on the branch.

    Congruence is checked on labels: cell shape, entry and exit sides and
    the sides crossed in between.  With ``same_endpoints`` only copies
    starting and ending at the same branch points as beta are kept (this
    needs beta to live in cx itself).
    """
    seg = beta.traversals if isinstance(beta, BetaSegment) else tuple(beta)
    source = source or cx
    labels = _labels(source, seg)
    if not source.is_branch(seg[0][0]) or not source.is_branch(seg[-1][1]):
        if source is cx and same_endpoints:
            return [seg]
    copies = _copies_by_labels(labels, cx)
    if same_endpoints:
        if source is not cx:
            raise ValueError("same_endpoints needs beta in the same complex")
        copies = [c for c in copies
                  if _same_point(cx, c[0][0], seg[0][0])
                  and _same_point(cx, c[-1][1], seg[-1][1])]
        if seg not in copies:
            copies.append(seg)
    return sorted(copies)


def block_offsets(copy: Sequence[Traversal], beta: Sequence[Traversal],
                  cx: BlockComplex) -> list[int]:
    """Block index differences (mod 8) between a copy and beta, per cell."""
    return [(_cell(cx, e1).block_index - _cell(cx, e0).block_index) % 8
            for (e0, _), (e1, _) in zip(beta, copy)]


# ---------------------------------------------------- identical copies
@dataclass
class IdenticalCount:
    count: int
    segments: int
    copies: list[int]
    c: list                       # direct c_i for i = 2..N (None if uneven)
    fact1: bool | None = None
    fact2: bool | None = None
    case: int | None = None
    formula: int | None = None
    c_formula: list[int] = field(default_factory=list)

    @property
    def agrees(self) -> bool | None:
        if self.formula is None:
            return None
        return self.formula == self.count


def _admissible(cx: BlockComplex, geo: Geometry, a_exit: int, b_entry: int,
                rel: str) -> bool:
    if a_exit == b_entry:
        return False     # backtracking through the side it just left
    return b_entry in geo.ctype.get((a_exit, geo.label[b_entry], rel), ())


def closed_case_formula(k: int, c_mid: Sequence[int], fact1: bool,
                       fact2: bool) -> tuple[int | None, int]:
    """Closed-form count for K copies per segment; returns (value, case).

    Cases: 1 when neither junction fact holds, 2 when exactly one holds, 3
    when both hold.  Only K = 2 and K = 4 have published closed forms.
    """
    prod = 1
    for ci in c_mid:
        prod *= ci
    case = 1 + int(fact1) + int(fact2)
    if k not in (2, 4):
        return None, case
    if case == 1:
        return k * prod * k, case
    if case == 2:
        return k * prod * (k - 1), case
    if k == 2:
        return 2 * prod, case
    return prod * 3 + 3 * prod * 2, case


def count_identical(gamma, cx: BlockComplex,
                    source: BlockComplex | None = None) -> IdenticalCount:
    """Number of closed geodesics of cx identical to gamma.

    gamma is split at its branch crossings into segments beta_1..beta_N.  A
    geodesic identical to gamma is a cyclic concatenation of translated
    copies alpha_i of beta_i, alpha_1 starting at a point of the branch
    locus congruent to gamma's start, such that each junction crosses the
    branch with the same relation as gamma does there (continuity) and no
    alpha_{i+1} re-enters through the side alpha_i left (no backtracking).
    """
    source = source or cx
    betas = beta_decomposition(gamma, source, "branch")
    geo = _geometry(cx)
    copies = [_copies_by_labels(_labels(source, b.traversals), cx)
              for b in betas]
    rels = [b.rel_out for b in betas]
    n = len(betas)
    total = 0
    for a1 in copies[0]:
        vec = {a1: 1}
        for i in range(1, n):
            nxt: dict = defaultdict(int)
            for a, cnt in vec.items():
                for b in copies[i]:
                    if _admissible(cx, geo, a[-1][1], b[0][0], rels[i - 1]):
                        nxt[b] += cnt
            vec = nxt
        total += sum(cnt for a, cnt in vec.items()
                     if _admissible(cx, geo, a[-1][1], a1[0][0], rels[-1]))
    # direct c_i: admissible successors of each fixed predecessor copy
    cs = []
    for i in range(1, n):
        vals = {sum(_admissible(cx, geo, a[-1][1], b[0][0], rels[i - 1])
                    for b in copies[i]) for a in copies[i - 1]}
        cs.append(vals.pop() if len(vals) == 1 else None)
    res = IdenticalCount(total, n, [len(c) for c in copies], cs)
    # the closed forms treat beta_1 and beta_{N-1} as independent choices,
    # which needs N >= 3
    if n >= 3 and len(set(res.copies)) == 1:
        k = res.copies[0]
        lab = [(_cell(source, b.entry).half, _side(source, b.entry),
                _side(source, b.exit)) for b in betas]
        c_mid = [k - int(lab[i - 1][2] == lab[i][1]) for i in range(1, n - 1)]
        fact1 = lab[n - 2][2] == lab[n - 1][1]
        fact2 = lab[n - 1][2] == lab[0][1]
        res.fact1, res.fact2 = fact1, fact2
        res.formula, res.case = closed_case_formula(k, c_mid, fact1, fact2)
        res.c_formula = c_mid
    return res


def identical_geodesics(gamma, cx: BlockComplex,
                        source: BlockComplex | None = None
                        ) -> list[tuple[Traversal, ...]]:
    """The words counted by count_identical (small cases only)."""
    source = source or cx
    betas = beta_decomposition(gamma, source, "branch")
    geo = _geometry(cx)
    copies = [_copies_by_labels(_labels(source, b.traversals), cx)
              for b in betas]
    rels = [b.rel_out for b in betas]
    out = []

    def extend(chain):
        i = len(chain)
        if i == len(betas):
            if _admissible(cx, geo, chain[-1][-1][1], chain[0][0][0],
                           rels[-1]):
                out.append(tuple(x for seg in chain for x in seg))
            return
        for b in copies[i]:
            if not chain or _admissible(cx, geo, chain[-1][-1][1], b[0][0],
                                        rels[i - 1]):
                extend(chain + [b])

    extend([])
    return out


# ------------------------------------------------ gluing correspondence
@dataclass(frozen=True)
class GluingCorrespondence:
    """Arc-to-arc matching of the branch curves of two paired amalgams.

    Arcs are matched by (class, member, position) and keep their
    arc-length coordinate; ``mapping`` sends a side-end on a branch arc of
    the first complex to the side-end with the same label on the matched
    arc of the second.
    """
    mapping: dict

    def __call__(self, e: int) -> int:
        return self.mapping[e]


def gluing_correspondence(a: BlockComplex, b: BlockComplex
                          ) -> GluingCorrespondence:
    if len(a.gluing_classes) != len(b.gluing_classes):
        raise ValueError("amalgams have different numbers of gluing classes")
    mapping = {}
    for ga, gb in zip(a.gluing_classes, b.gluing_classes):
        if [len(m) for m in ga.members] != [len(m) for m in gb.members]:
            raise ValueError("gluing classes differ in shape")
        for ma, mb in zip(ga.members, gb.members):
            for arc_a, arc_b in zip(ma, mb):
                if (arc_a.side.length_class != arc_b.side.length_class
                        or arc_a.forward != arc_b.forward):
                    raise ValueError("matched arcs differ in length class "
                                     "or direction")
                ea = a.side_end(arc_a.cell, arc_a.side)
                eb = b.side_end(arc_b.cell, arc_b.side)
                mapping[ea] = eb
                mapping[a.partner(ea)] = b.partner(eb)
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("gluing correspondence is not injective")
    return GluingCorrespondence(mapping)


# ------------------------------------------------ amalgam transplantation
@dataclass
class SegmentChoice:
    rule: int
    delta: int
    copy_id: int
    recopied: bool = False


@dataclass
class AmalgamTransplant:
    word: CrossingWord
    segments: list[SegmentChoice]
    delegated: bool = False


def _segment_delta(src: BlockComplex, seg: BetaSegment) -> tuple[int, int]:
    t = seg.traversals
    n0 = _cell(src, t[0][0]).block_index
    n1 = _cell(src, t[-1][0]).block_index
    if n0 in ANCHOR_BLOCKS:
        nb = crossing_counts(src, t[:-1])["b"]
        return 1, 0 if nb % 2 == 0 else 4
    if n1 in ANCHOR_BLOCKS:
        return 2, 0
    return 3, 2


def transplant_amalgam(word, source: BlockComplex, target: BlockComplex, *,
                       reverse: bool = False) -> AmalgamTransplant:
    """Transplant a closed word between the three-copy amalgams.

    The word is split where it changes sheet.  Each sheet segment is
    started with an offset chosen from its first and last blocks (rules 1-3)
    and walked along the surface pairings of the same copy; if the junction
    with the previous segment (and, for the last one, with the first) would
    backtrack or break continuity, the segment is moved to another copy in
    ascending copy order (rule 4).
    """
    t = _word(word)
    try:
        segs = beta_decomposition(t, source, "sheet")
    except NotCrossing:
        out = transplant_word(t, source, target, reverse=reverse)
        return AmalgamTransplant(out, [], delegated=True)
    copies = sorted({c.copy_id for c in target.cells})
    geo = _geometry(target)
    built: list[tuple[Traversal, ...]] = []
    choices: list[SegmentChoice] = []
    n = len(segs)
    for j, seg in enumerate(segs):
        rule, delta = _segment_delta(source, seg)
        if reverse:
            delta = -delta % 8
        c0 = _cell(source, seg.entry)
        order = [c0.copy_id] + [c for c in copies if c != c0.copy_id]
        placed = None
        for copy in order:
            first = Cell(copy, wrap_block(c0.block_index + delta), c0.half)
            try:
                cand = _follow(source, seg.traversals, target, first,
                               closed=False)
            except ClosureFailure:
                continue
            if not target.is_branch(cand[-1][1]):
                continue
            if j > 0 and not _admissible(target, geo, built[-1][-1][1],
                                         cand[0][0], segs[j - 1].rel_out):
                continue
            if j == n - 1:
                head = cand if n == 1 else built[0]
                if not _admissible(target, geo, cand[-1][1], head[0][0],
                                   seg.rel_out):
                    continue
            placed = cand
            choices.append(SegmentChoice(rule, delta, copy,
                                         copy != c0.copy_id))
            break
        if placed is None:
            raise NoValidCopy(f"segment {j + 1} of {n} has no admissible copy")
        built.append(placed)
    out = tuple(x for seg in built for x in seg)
    if not is_closed_word(target, out):
        raise ClosureFailure("amalgam transplant does not close")
    return AmalgamTransplant(CrossingWord(out, target.name), choices)


# --------------------------------------------------- offset claims
def epsilon_offsets(beta: BetaSegment | Sequence[Traversal],
                    cx: BlockComplex) -> list[tuple[int, int]]:
    """(start, end) block offsets of every other same-endpoint copy."""
    seg = beta.traversals if isinstance(beta, BetaSegment) else tuple(beta)
    out = []
    for c in translated_copies(seg, cx):
        if c == seg:
            continue
        d = block_offsets(c, seg, cx)
        end = (_cell(cx, c[-1][1]).block_index
               - _cell(cx, seg[-1][1]).block_index) % 8
        out.append((d[0], end))
    return out


def end_parities(beta: BetaSegment | Sequence[Traversal],
                 cx: BlockComplex) -> set[int]:
    """Parities of the end-block offsets of all label-congruent copies."""
    seg = beta.traversals if isinstance(beta, BetaSegment) else tuple(beta)
    ref = _cell(cx, seg[-1][1]).block_index
    return {(_cell(cx, c[-1][1]).block_index - ref) % 2
            for c in translated_copies(seg, cx)}
