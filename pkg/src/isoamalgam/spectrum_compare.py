"""Length spectra as banded multisets, and their comparison."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

from .block_complex import BlockComplex
from .geodesic_enumerator import Catalog, enumerate_geodesics

DEFAULT_TOL = 1e-6
CONVENTION = ("# primitive unoriented closed geodesics; each geodesic counted "
              "once regardless of orientation or base point")


class CutoffMismatch(ValueError):
    pass


@dataclass
class Band:
    length: float
    multiplicity: int
    profiles: Counter = field(default_factory=Counter)
    witnesses: list[str] = field(default_factory=list)


@dataclass
class LengthSpectrum:
    complex_name: str
    cutoff: float
    max_crossings: int
    bands: list[Band]
    tol: float = DEFAULT_TOL
    note: str = ""

    @property
    def total(self) -> int:
        return sum(b.multiplicity for b in self.bands)

    def close_bands(self) -> list[tuple[float, float]]:
        """Adjacent bands nearer than ten tolerances (ambiguous binning)."""
        return [(a.length, b.length) for a, b in zip(self.bands, self.bands[1:])
                if b.length - a.length < 10 * self.tol]

    def multiplicity(self, length: float) -> int:
        for b in self.bands:
            if abs(b.length - length) <= self.tol:
                return b.multiplicity
        return 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CONVENTION + "\n")
        buf.write(f"# complex={self.complex_name} cutoff={self.cutoff} "
                  f"max_crossings={self.max_crossings} tol={self.tol}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["length", "multiplicity", "avoids", "contained",
                    "crosses", "witness"])
        for b in self.bands:
            w.writerow([f"{b.length:.9f}", b.multiplicity,
                        b.profiles["avoids"], b.profiles["contained"],
                        b.profiles["crosses"], b.witnesses[0]])
        return buf.getvalue()


def spectrum_from_catalog(cat: Catalog, tol: float = DEFAULT_TOL
                          ) -> LengthSpectrum:
    bands: list[Band] = []
    for gc in sorted(cat.classes, key=lambda c: c.length):
        if bands and gc.length - bands[-1].length <= tol:
            b = bands[-1]
        else:
            b = Band(gc.length, 0)
            bands.append(b)
        b.multiplicity += 1
        b.profiles[gc.profile] += 1
        b.witnesses.append(gc.witness)
    return LengthSpectrum(cat.complex_name, cat.max_length, cat.max_crossings,
                          bands, tol, cat.crossing_bound_note)


def build_spectrum(cx: BlockComplex, cutoff: float,
                   max_crossings: int | None = None, *,
                   tol: float = DEFAULT_TOL, workers: int = 1
                   ) -> LengthSpectrum:
    cat = enumerate_geodesics(cx, cutoff, max_crossings, workers=workers,
                              keep_encodings=False)
    return spectrum_from_catalog(cat, tol)


@dataclass
class BandMismatch:
    length: float
    multiplicity_a: int
    multiplicity_b: int
    witness_a: str = ""
    witness_b: str = ""


@dataclass
class Comparison:
    name_a: str
    name_b: str
    cutoff: float
    weak: bool
    mismatches: list[BandMismatch]

    @property
    def equal(self) -> bool:
        return not self.mismatches

    def to_markdown(self) -> str:
        kind = "length sets" if self.weak else "length spectra"
        verdict = "equal" if self.equal else "differ"
        lines = [f"## {self.name_a} vs {self.name_b}",
                 "",
                 f"{kind} up to {self.cutoff:g}: **{verdict}**"]
        if self.mismatches:
            lines += ["", "| length | mult a | mult b | witness a | witness b |",
                      "|---|---|---|---|---|"]
            for m in self.mismatches:
                lines.append(f"| {m.length:.9f} | {m.multiplicity_a} | "
                             f"{m.multiplicity_b} | {m.witness_a} | "
                             f"{m.witness_b} |")
        return "\n".join(lines) + "\n"


def compare(a: LengthSpectrum, b: LengthSpectrum, *, weak: bool = False
            ) -> Comparison:
    """Band-by-band comparison; weak mode ignores multiplicities."""
    if abs(a.cutoff - b.cutoff) > 1e-12:
        raise CutoffMismatch(f"cutoffs differ: {a.cutoff} vs {b.cutoff}")
    tol = max(a.tol, b.tol)
    out = []
    i = j = 0
    while i < len(a.bands) or j < len(b.bands):
        ba = a.bands[i] if i < len(a.bands) else None
        bb = b.bands[j] if j < len(b.bands) else None
        if ba and bb and abs(ba.length - bb.length) <= tol:
            if not weak and ba.multiplicity != bb.multiplicity:
                out.append(BandMismatch(ba.length, ba.multiplicity,
                                        bb.multiplicity, ba.witnesses[0],
                                        bb.witnesses[0]))
            i += 1
            j += 1
        elif bb is None or (ba is not None and ba.length < bb.length):
            out.append(BandMismatch(ba.length, ba.multiplicity, 0,
                                    ba.witnesses[0]))
            i += 1
        else:
            out.append(BandMismatch(bb.length, 0, bb.multiplicity, "",
                                    bb.witnesses[0]))
            j += 1
    return Comparison(a.complex_name, b.complex_name, a.cutoff, weak, out)
