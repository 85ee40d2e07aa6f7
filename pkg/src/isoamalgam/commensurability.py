"""Chamber data, finite covers and the Euler characteristic ratio test.

A cover of an amalgam is described chamber type by chamber type: how many
cover chambers sit over each base chamber of that type, their degree and
topological type.  Such a description is validated, not constructed: the
checks are Riemann-Hurwitz for each piece, a constant total degree over
every base chamber, and trivial lifting of the boundary curves so that the
lifted branch curves glue up.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .block_complex import DATA_DIR, BlockComplex, Half, load_complex


def euler(genus: int, boundary: int) -> int:
    return 2 - 2 * genus - boundary


@dataclass(frozen=True)
class ChamberVector:
    """Multiset of chamber Euler characteristics."""
    counts: tuple[tuple[int, int], ...]     # (euler, multiplicity), sorted

    @classmethod
    def of(cls, values) -> "ChamberVector":
        values = list(values)
        if any(v >= 0 for v in values):
            raise ValueError(f"non-hyperbolic chamber in {sorted(values)}")
        return cls(tuple(sorted(Counter(values).items())))

    @property
    def values(self) -> list[int]:
        return [e for e, k in self.counts for _ in range(k)]

    def __str__(self) -> str:
        return "{" + ", ".join(f"{e}x{k}" for e, k in self.counts) + "}"


def chamber_vector(cx: BlockComplex) -> ChamberVector:
    return ChamberVector.of(euler(g, b) for g, b in cx.chambers())


def volume(cx: BlockComplex) -> float:
    """Area: each right-angled octagon block has area 2 pi, a half block pi."""
    return math.pi * sum(1 if c.half is not Half.WHOLE else 2
                         for c in cx.cells)


@dataclass(frozen=True)
class CoverPiece:
    base: tuple[int, int]      # chamber type (genus, boundary) downstairs
    count: int                 # cover chambers over each base chamber
    degree: int
    cover: tuple[int, int]


@dataclass
class CoverSpec:
    complex_name: str
    degree: int
    pieces: list[CoverPiece]

    @classmethod
    def from_dict(cls, doc: dict) -> "CoverSpec":
        pieces = [CoverPiece(tuple(p["base"]), int(p["count"]),
                             int(p["degree"]), tuple(p["cover"]))
                  for p in doc["pieces"]]
        return cls(doc["complex"], int(doc["degree"]), pieces)

    def to_dict(self) -> dict:
        return {"complex": self.complex_name, "degree": self.degree,
                "pieces": [{"base": list(p.base), "count": p.count,
                            "degree": p.degree, "cover": list(p.cover)}
                           for p in self.pieces]}


def load_cover(source) -> CoverSpec:
    if isinstance(source, dict):
        return CoverSpec.from_dict(source)
    p = Path(source)
    if not p.exists() and not p.suffix:
        p = DATA_DIR / f"cover_{source}.json"
    return CoverSpec.from_dict(json.loads(p.read_text()))


@dataclass
class CoverReport:
    complex_name: str
    ok: bool
    chambers: ChamberVector
    base_chambers: ChamberVector
    base_volume: float
    cover_volume: float
    problems: list[str] = field(default_factory=list)


def validate_cover(spec: CoverSpec, cx: BlockComplex | None = None
                   ) -> CoverReport:
    cx = cx or load_complex(spec.complex_name)
    base = Counter(cx.chambers())
    problems = []
    over: Counter = Counter()
    values = []
    for p in spec.pieces:
        if p.base not in base:
            problems.append(f"no chamber of type {p.base} in {cx.name}")
            continue
        if euler(*p.cover) != p.degree * euler(*p.base):
            problems.append(f"{p.cover} is not a degree {p.degree} cover of "
                            f"{p.base} (Euler characteristic)")
        if p.cover[1] != p.degree * p.base[1]:
            problems.append(f"boundary of {p.base} does not lift trivially "
                            f"to {p.cover}")
        if euler(*p.cover) >= 0:
            problems.append(f"cover chamber {p.cover} is not hyperbolic")
            continue
        over[p.base] += p.count * p.degree
        values += [euler(*p.cover)] * (p.count * base[p.base])
    for t in base:
        if over[t] != spec.degree:
            problems.append(f"chambers of type {t} covered with total degree "
                            f"{over[t]}, expected {spec.degree}")
    vol = volume(cx)
    return CoverReport(cx.name, not problems, ChamberVector.of(values),
                       chamber_vector(cx), vol, vol * spec.degree, problems)


@dataclass
class RatioTest:
    compatible: bool
    ratios: list[Fraction]

    @property
    def verdict(self) -> str:
        return "compatible" if self.compatible else "not-compatible"


def ratio_test(a: ChamberVector, b: ChamberVector) -> RatioTest:
    """Entrywise ratios of the two vectors, both sorted ascending.

    Commensurable amalgams admit covers whose chamber Euler characteristics
    are proportional term by term, so every ratio must be the same.
    """
    va, vb = a.values, b.values
    if len(va) != len(vb):
        raise ValueError(f"chamber vectors differ in size: {len(va)} vs "
                         f"{len(vb)}")
    ratios = [Fraction(x, y) for x, y in zip(va, vb)]
    return RatioTest(len(set(ratios)) <= 1, ratios)
