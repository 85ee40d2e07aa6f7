"""Metric realization of the octagonal building block in the upper half-plane.

Isometries are stored as real 2x2 matrices.  A matrix of determinant +1 acts
by z -> (az + b)/(cz + d); a matrix of determinant -1 acts on the conjugate,
z -> (a conj(z) + b)/(c conj(z) + d).  With that convention composition is
the ordinary matrix product, which keeps holonomy computations uniform when
an amalgam glues sheets with opposite orientations.

The block sits with its centre at i.  The imaginary axis carries the
m-bisector (between the two b-sides) and the unit circle carries the
h-segment (between the two c-sides).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .block_complex import CELL_SIDES, Half, Side

EPS_HYP = 1e-9


class NonHyperbolic(ArithmeticError):
    """The isometry is elliptic, parabolic or a reflection."""


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Isometry:
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def scale(self) -> float:
        """sqrt|det|, taken as exactly 1 when the deviation is rounding.

        ad - bc cancels badly for large entries, so a deviation below the
        rounding bound of the determinant itself is not evidence of drift.
        """
        det = abs(self.det)
        bound = 1e-12 * max(1.0, abs(self.a * self.d) + abs(self.b * self.c))
        return 1.0 if abs(det - 1.0) <= bound else math.sqrt(det)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def preserves_orientation(self) -> bool:
        return self.det > 0

    def __matmul__(self, o: "Isometry") -> "Isometry":
        a = self.a * o.a + self.b * o.c
        b = self.a * o.b + self.b * o.d
        c = self.c * o.a + self.d * o.c
        d = self.c * o.b + self.d * o.d
        out = Isometry(a, b, c, d)
        s = out.scale
        if s != 1.0:
            out = Isometry(a / s, b / s, c / s, d / s)
        return out

    def inverse(self) -> "Isometry":
        det = math.copysign(self.scale ** 2, self.det)
        return Isometry(self.d / det, -self.b / det, -self.c / det,
                        self.a / det)

    def __call__(self, z: complex) -> complex:
        if self.det < 0:
            z = z.conjugate()
        den = self.c * z + self.d
        if den == 0:
            return complex(math.inf, 0)
        return (self.a * z + self.b) / den

    def close_to(self, o: "Isometry", tol: float = 1e-9) -> bool:
        """Equality as isometries (the matrices may differ by sign)."""
        p = (self.a, self.b, self.c, self.d)
        q = (o.a, o.b, o.c, o.d)
        return (max(abs(x - y) for x, y in zip(p, q)) < tol
                or max(abs(x + y) for x, y in zip(p, q)) < tol)


def hdist(z: complex, w: complex) -> float:
    """Hyperbolic distance in the upper half-plane."""
    num = abs(z - w) ** 2
    return math.acosh(1.0 + num / (2.0 * z.imag * w.imag))


def to_i_map(p: complex) -> Isometry:
    """Orientation-preserving isometry z -> (z - x)/y sending p to i."""
    s = math.sqrt(p.imag)
    return Isometry(1.0 / s, -p.real / s, 0.0, s)


def rotation_about_i(theta: float) -> Isometry:
    ct, st = math.cos(theta), math.sin(theta)
    return Isometry(ct, -st, st, ct)


def frame_map(p: complex, q: complex) -> Isometry:
    """Orientation-preserving isometry sending p to i and q onto i*e^t, t > 0."""
    a = to_i_map(p)
    w = a(q)
    zeta = (w - 1j) / (w + 1j)
    # K(theta) multiplies the disc coordinate by exp(-2i theta)
    k = rotation_about_i(cmath.phase(zeta) / 2.0)
    return k @ a


def pair_map(p1: complex, p2: complex, q1: complex, q2: complex) -> Isometry:
    """Orientation-preserving isometry with p1 -> q1 and p2 -> q2."""
    return frame_map(q1, q2).inverse() @ frame_map(p1, p2)


def line_reflection(p: complex, q: complex) -> Isometry:
    """Reflection in the geodesic line through p and q."""
    a = frame_map(p, q)
    return a.inverse() @ Isometry(-1.0, 0.0, 0.0, 1.0) @ a


@dataclass(frozen=True)
class BlockGeometry:
    b: float
    c: float
    a: float
    m: float
    h: float
    vertices: tuple[complex, ...]      # O0..O7 (corner j between sides j, j+1)
    m_top: complex
    m_bottom: complex

    def corners(self, half: Half) -> tuple[complex, ...]:
        v = self.vertices
        if half is Half.WHOLE:
            return v
        if half is Half.LEFT:
            return (v[0], v[1], self.m_top, self.m_bottom, v[6], v[7])
        return (self.m_top, v[2], v[3], v[4], v[5], self.m_bottom)

    def side_endpoints(self, half: Half, side: Side) -> tuple[complex, complex]:
        sides = CELL_SIDES[half]
        cs = self.corners(half)
        j = sides.index(side)
        return cs[j - 1], cs[j]

    def side_length(self, half: Half, side: Side) -> float:
        p, q = self.side_endpoints(half, side)
        return hdist(p, q)

    def side_reflection(self, half: Half, side: Side) -> Isometry:
        return line_reflection(*self.side_endpoints(half, side))

    @property
    def bisector_reflection(self) -> Isometry:
        return Isometry(-1.0, 0.0, 0.0, 1.0)

    @property
    def interior_angles(self) -> tuple[float, ...]:
        return tuple(_corner_angle(self.vertices, j) for j in range(8))

    @property
    def area(self) -> float:
        return 6.0 * math.pi - sum(self.interior_angles)

    @property
    def closure_residual(self) -> float:
        """Distance from the identity of the turtle walk around the octagon.

        Walk each side (translation along the current heading), then turn by
        a right angle; for a closed right-angled octagon the product of the
        eight steps is the identity up to sign.
        """
        lengths = (self.c, self.a, self.b, self.a, self.c, self.a, self.b,
                   self.a)
        g = Isometry.identity()
        turn = rotation_about_i(-math.pi / 4)  # disc rotation by pi/2
        for ell in lengths:
            e = math.exp(ell / 2)
            g = g @ Isometry(e, 0.0, 0.0, 1.0 / e) @ turn
        ident = Isometry.identity()
        return min(max(abs(x - y) for x, y in zip(
            (g.a, g.b, g.c, g.d), (s * ident.a, 0.0, 0.0, s * ident.d)))
            for s in (1.0, -1.0))

    def report(self) -> dict:
        return {
            "b": self.b, "c": self.c, "a": self.a, "m": self.m, "h": self.h,
            "vertices": [[z.real, z.imag] for z in self.vertices],
            "side_lengths": [hdist(self.vertices[j - 1], self.vertices[j])
                             for j in range(8)],
            "angle_residual": max(abs(t - math.pi / 2)
                                  for t in self.interior_angles),
            "area_residual": abs(self.area - 2 * math.pi),
            "closure_residual": self.closure_residual,
        }


def _unit_tangent(z: complex, w: complex) -> complex:
    """Unit tangent direction at z of the geodesic towards w."""
    f = frame_map(z, w)
    # f sends z to i and w up the imaginary axis; pull back the vertical
    # direction through the derivative of f^{-1} at i
    g = f.inverse()
    der = 1.0 / (g.c * 1j + g.d) ** 2  # derivative of a Mobius map at i
    t = der * 1j
    return t / abs(t)


def _corner_angle(vs, j: int) -> float:
    z = vs[j]
    t1 = _unit_tangent(z, vs[j - 1])
    t2 = _unit_tangent(z, vs[(j + 1) % len(vs)])
    return abs(cmath.phase(t2 / t1))


def _qmap(z: complex) -> complex:
    return (z - 1) / (z + 1)


@lru_cache(maxsize=64)
def solve_block(b: float, c: float, *, allow_equal: bool = False
                ) -> BlockGeometry:
    """Solve the doubly symmetric right-angled octagon with sides c,a,b,a,...

    The quarter pentagon has consecutive sides (c/2, a, b/2, m/2, h/2).
    """
    if not (b > 0 and c > 0 and (c < b or (allow_equal and c == b))
            and b < 1):
        raise GeometryError(f"block needs 0 < c < b < 1, got b={b}, c={c}")
    sm = math.cosh(c / 2) / math.sinh(b / 2)
    sh = math.cosh(b / 2) / math.sinh(c / 2)
    m = 2 * math.asinh(sm)
    h = 2 * math.asinh(sh)
    a = math.acosh(sm * sh)
    em = math.exp(m / 2)
    tb, hb = math.tanh(b / 2), 1 / math.cosh(b / 2)
    tc, hc = math.tanh(c / 2), 1 / math.cosh(c / 2)
    eh = math.exp(h / 2)
    o1 = em * complex(-tb, hb)
    o2 = em * complex(tb, hb)
    o5 = complex(tb, hb) / em
    o6 = complex(-tb, hb) / em
    p, q = _qmap(eh * complex(tc, hc)), _qmap(eh * complex(-tc, hc))
    o3, o4 = (p, q) if abs(p) > 1 else (q, p)
    o0 = -o3.conjugate()
    o7 = -o4.conjugate()
    return BlockGeometry(b, c, a, m, h, (o0, o1, o2, o3, o4, o5, o6, o7),
                         1j * em, 1j / em)


def crossing_isometry(geom: BlockGeometry, exit_cell: tuple[Half, Side],
                      entry_cell: tuple[Half, Side],
                      orientation: str = "reversing") -> Isometry:
    """Placement of the neighbour cell in the frame of the current cell.

    ``exit_cell`` is (shape, side) of the side being left, ``entry_cell`` the
    matching side of the neighbour.  The returned map carries neighbour
    coordinates into current-cell coordinates.
    """
    (h1, s1), (h2, s2) = exit_cell, entry_cell
    if s1.length_class != s2.length_class:
        raise GeometryError(
            f"cannot cross {s1.label} into {s2.label}: length classes differ")
    vs, ve = geom.side_endpoints(h1, s1)
    ws, we = geom.side_endpoints(h2, s2)
    if orientation == "reversing":
        return pair_map(ws, we, ve, vs)
    if orientation == "preserving":
        return line_reflection(vs, ve) @ pair_map(ws, we, vs, ve)
    raise GeometryError(f"unknown orientation {orientation!r}")


@dataclass(frozen=True)
class DevelopedChain:
    """Cells placed in the plane along a word; placements[k] maps cell k."""
    cells: tuple
    placements: tuple[Isometry, ...]
    closing: Isometry | None = None


def holonomy(chain: DevelopedChain) -> Isometry:
    if not chain.placements:
        return Isometry.identity()
    if chain.closing is None:
        raise GeometryError("chain does not close")
    return chain.closing @ chain.placements[0].inverse()


def geodesic_length(h: Isometry) -> float:
    t = abs(h.trace) / h.scale
    if h.det > 0:
        if t <= 2 + EPS_HYP:
            raise NonHyperbolic(f"|trace| = {t!r} is not hyperbolic")
        return 2 * math.acosh(t / 2)
    if t <= EPS_HYP:
        raise NonHyperbolic("orientation-reversing isometry is a reflection")
    return 2 * math.asinh(t / 2)


def fixed_points(h: Isometry) -> tuple[float, float]:
    """(repelling, attracting) boundary fixed points of a hyperbolic h."""
    geodesic_length(h)
    a, b, c, d = h.a, h.b, h.c, h.d
    if h.det < 0:
        # the fixed points of the glide are those of its square
        sq = h @ h
        a, b, c, d = sq.a, sq.b, sq.c, sq.d
    if abs(c) < 1e-14:
        # one fixed point at infinity
        x = b / (d - a)
        return (x, math.inf) if abs(a) > abs(d) else (math.inf, x)
    disc = (d - a) ** 2 + 4 * b * c
    r = math.sqrt(max(disc, 0.0))
    x1, x2 = ((a - d) - r) / (2 * c), ((a - d) + r) / (2 * c)
    # attracting where |c x + d| > 1
    if abs(c * x1 + d) > abs(c * x2 + d):
        return x2, x1
    return x1, x2


def axis_frame(u: float, v: float) -> Isometry:
    """Isometry sending the directed line u -> v to 0 -> infinity."""
    if u == math.inf:
        return _axis_inf_start(v)
    if v == math.inf:
        return Isometry(1.0, -u, 0.0, 1.0)
    if u > v:
        m = Isometry(1.0, -u, 1.0, -v)
    else:
        m = Isometry(-1.0, u, 1.0, -v)
    s = 1.0 / math.sqrt(abs(m.det))
    return Isometry(m.a * s, m.b * s, m.c * s, m.d * s)


def _axis_inf_start(v: float) -> Isometry:
    # z -> -1/(z - v) sends infinity to 0 and v to infinity
    return Isometry(0.0, -1.0, 1.0, -v)


def signed_side(u: float, v: float, z: complex) -> float:
    """Positive when z lies to the left of the directed line u -> v.

    Returns the hyperbolic sine of the signed distance.
    """
    x, y = z.real, z.imag
    if v == math.inf:
        return (u - x) / y
    if u == math.inf:
        return (x - v) / y
    f = x * x + y * y - x * (u + v) + u * v
    return f / (y * (v - u))


@dataclass(frozen=True)
class AxisReport:
    repelling: float
    attracting: float
    length: float
    crossings: tuple[float, ...]     # axis parameter (log height) per side
    angles: tuple[float, ...]        # angle between axis and side
    sides_left: tuple[float, ...]    # signed sinh-distance of the left end
    sides_right: tuple[float, ...]
    miss: int | None


def axis_and_angles(h: Isometry, sides: list[tuple[complex, complex]],
                    tol: float = 1e-9) -> AxisReport:
    """Axis of h and its crossing data with each developed side (P, Q).

    P should lie to the left of the axis and Q to the right; the first index
    at which that fails is reported as ``miss``.
    """
    length = geodesic_length(h)
    u, v = fixed_points(h)
    m = axis_frame(u, v)
    ts, angs, lefts, rights = [], [], [], []
    miss = None
    for k, (p, q) in enumerate(sides):
        sp, sq = signed_side(u, v, p), signed_side(u, v, q)
        lefts.append(sp)
        rights.append(sq)
        if miss is None and not (sp >= -tol and sq <= tol):
            miss = k
        mp, mq = m(p), m(q)
        t, ang = _vertical_crossing(mp, mq)
        ts.append(t)
        angs.append(ang)
    return AxisReport(u, v, length, tuple(ts), tuple(angs), tuple(lefts),
                      tuple(rights), miss)


def _vertical_crossing(p: complex, q: complex) -> tuple[float, float]:
    """Log-height and angle where the line through p, q meets the imaginary axis."""
    if abs(p.real - q.real) < 1e-15 * (abs(p) + abs(q)):
        # vertical line: parallel to the axis or equal to it
        if abs(p.real) < 1e-12:
            return math.log(math.sqrt(p.imag * q.imag)), 0.0
        return math.nan, 0.0
    # circle centred on the real axis through p and q
    c0 = ((abs(p) ** 2 - abs(q) ** 2) / (2 * (p.real - q.real)))
    r2 = (p.real - c0) ** 2 + p.imag ** 2
    y2 = r2 - c0 * c0
    if y2 <= 0:
        return math.nan, 0.0
    y0 = math.sqrt(y2)
    # angle between the vertical and the circle at iy0
    return math.log(y0), math.atan2(y0, abs(c0)) if c0 else math.pi / 2


# ------------------------------------------------------------ hyperboloid
def to_hyperboloid(z: complex) -> tuple[float, float, float]:
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return ((r2 + 1) / (2 * y), (r2 - 1) / (2 * y), x / y)


def mink(u, v) -> float:
    return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def lcross(u, v):
    c0 = u[1] * v[2] - u[2] * v[1]
    c1 = u[2] * v[0] - u[0] * v[2]
    c2 = u[0] * v[1] - u[1] * v[0]
    return (-c0, c1, c2)


def _normalize_space(n):
    s = math.sqrt(max(mink(n, n), 1e-300))
    return (n[0] / s, n[1] / s, n[2] / s)


def _normalize_time(p):
    s = math.sqrt(max(-mink(p, p), 1e-300))
    if p[0] < 0:
        s = -s
    return (p[0] / s, p[1] / s, p[2] / s)


def _pt_dist(p, q) -> float:
    return math.acosh(max(1.0, -mink(p, q)))


def _on_segment(f, a, b) -> bool:
    """Is f (on the line ab) between a and b?"""
    k = mink(a, b)
    fa, fb = mink(f, a), mink(f, b)
    # f = alpha a + beta b ; <f,a> = -alpha + beta k, <f,b> = alpha k - beta
    det = 1 - k * k
    if abs(det) < 1e-300:
        return True
    alpha = (-fa - k * fb) / det
    beta = (-fb - k * fa) / det
    return alpha >= -1e-12 and beta >= -1e-12


def _point_segment(x, a, b, n) -> float:
    s = mink(x, n)
    foot = (x[0] - s * n[0], x[1] - s * n[1], x[2] - s * n[2])
    foot = _normalize_time(foot)
    if _on_segment(foot, a, b):
        return math.asinh(abs(s))
    return min(_pt_dist(x, a), _pt_dist(x, b))


class Segment:
    """A geodesic segment of the plane in hyperboloid coordinates."""
    __slots__ = ("a", "b", "n")

    def __init__(self, p: complex, q: complex) -> None:
        self.a = to_hyperboloid(p)
        self.b = to_hyperboloid(q)
        self.n = _normalize_space(lcross(self.a, self.b))

    def distance(self, o: "Segment") -> float:
        sa, sb = mink(o.a, self.n), mink(o.b, self.n)
        ta, tb = mink(self.a, o.n), mink(self.b, o.n)
        if sa * sb <= 0 and ta * tb <= 0:
            return 0.0
        best = min(_point_segment(o.a, self.a, self.b, self.n),
                   _point_segment(o.b, self.a, self.b, self.n),
                   _point_segment(self.a, o.a, o.b, o.n),
                   _point_segment(self.b, o.a, o.b, o.n))
        k = abs(mink(self.n, o.n))
        if k > 1:
            w = lcross(self.n, o.n)
            f1 = _normalize_time(lcross(self.n, w))
            f2 = _normalize_time(lcross(o.n, w))
            if _on_segment(f1, self.a, self.b) and _on_segment(f2, o.a, o.b):
                best = min(best, math.acosh(k))
        return best
