"""Independent reference computations used by the tests.

Nothing here calls the package's solver or search: the block side a is
found by shooting a quarter pentagon on the hyperboloid with numpy, and
closed crossing words are enumerated by plain depth-first search over
side-ends.
"""

from __future__ import annotations

import numpy as np

J = np.diag([-1.0, 1.0, 1.0])


def mink(u, v) -> float:
    return float(u @ J @ v)


def _boost(t: float) -> np.ndarray:
    ch, sh = np.cosh(t), np.sinh(t)
    return np.array([[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]])


_LEFT = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def turtle(steps) -> np.ndarray:
    """Frame (position, heading, normal) after walking and turning left.

    steps is a sequence of lengths; a right-angle left turn follows each.
    """
    f = np.eye(3)
    for ell in steps:
        f = f @ _boost(ell) @ _LEFT
    return f


def _pentagon_residual(a: float, b: float, c: float) -> float:
    # start at the midpoint of a c-side heading along it; walk c/2, a, b/2.
    # the last side must end perpendicular to the line through the start
    # point orthogonal to c, which has normal e1
    f = np.eye(3) @ _boost(c / 2) @ _LEFT @ _boost(a) @ _LEFT @ _boost(b / 2)
    return mink(np.array([0.0, 1.0, 0.0]), f[:, 1])


def shoot_a(b: float, c: float, lo: float = 1e-3, hi: float = 10.0) -> float:
    grid = np.linspace(lo, hi, 400)
    vals = [_pentagon_residual(x, b, c) for x in grid]
    k = next(i for i in range(len(grid) - 1) if vals[i] * vals[i + 1] <= 0)
    x0, x1 = grid[k], grid[k + 1]
    for _ in range(100):
        mid = 0.5 * (x0 + x1)
        if _pentagon_residual(x0, b, c) * _pentagon_residual(mid, b, c) <= 0:
            x1 = mid
        else:
            x0 = mid
    return 0.5 * (x0 + x1)


def octagon_closes(b: float, c: float, a: float) -> float:
    """Distance from the identity after walking the full octagon."""
    f = turtle([c, a, b, a, c, a, b, a])
    return float(np.abs(f - np.eye(3)).max())


def translation_length(m) -> float:
    """Translation length of a hyperbolic 2x2 matrix (det +-1)."""
    m = np.asarray(m, dtype=float)
    tr = abs(np.trace(m)) / np.sqrt(abs(np.linalg.det(m)))
    return float(2 * np.arccosh(tr / 2))


def brute_words(cx, geo, max_cells: int) -> set:
    """Least rotations of all primitive closed side-end words.

    A word is a cyclic sequence of (entry, exit) side-end pairs in which
    every exit crosses into the next entry.
    """
    found = set()
    for e0 in range(len(geo.cell_of)):
        for x0 in geo.other_exits(e0):
            path = [(e0, x0)]

            def extend():
                x = path[-1][1]
                for f, _ in cx.crossing_options(x):
                    if f == e0:
                        t = tuple(path)
                        if _primitive(t):
                            found.add(_least_rotation(t))
                    if len(path) < max_cells:
                        for y in geo.other_exits(f):
                            path.append((f, y))
                            extend()
                            path.pop()
            extend()
    return found


def _least_rotation(t):
    return min(t[k:] + t[:k] for k in range(len(t)))


def _primitive(t) -> bool:
    n = len(t)
    return all(t != t[d:] + t[:d] for d in range(1, n) if n % d == 0)
