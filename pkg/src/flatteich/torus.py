"""Closed-form Teichmueller geometry of the flat torus.

Points are tau in the upper half-plane; the Teichmueller distance is half
the hyperbolic distance, so that d(i, K i) = log(K) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from .errors import BadTau


@dataclass(frozen=True)
class TorusPoint:
    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise BadTau(f"tau must lie in the upper half-plane, got {tau}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class TorusClass:
    p: int
    q: int

    def __post_init__(self):
        if (self.p, self.q) == (0, 0) or math.gcd(self.p, self.q) != 1:
            raise ValueError(f"({self.p}, {self.q}) is not a primitive class")


def _tau(t) -> complex:
    return t.tau if isinstance(t, TorusPoint) else TorusPoint(t).tau


def torus_ext(t, c) -> float:
    tau = _tau(t)
    p, q = (c.p, c.q) if isinstance(c, TorusClass) else c
    return abs(p + q * tau) ** 2 / tau.imag


def torus_distance(t1, t2) -> float:
    """Half the hyperbolic distance, in the form asinh(|dtau| / (2 sqrt(y1 y2)))."""
    a, b = _tau(t1), _tau(t2)
    return math.asinh(abs(a - b) / (2 * math.sqrt(a.imag * b.imag)))


def primitive_classes(height: int) -> Iterator[Tuple[int, int]]:
    """Primitive (p, q) with |p|, |q| <= height, one per sign class."""
    for q in range(0, height + 1):
        for p in range(-height, height + 1):
            if q == 0 and p <= 0:
                continue
            if math.gcd(p, q) == 1:
                yield p, q


def torus_kerckhoff(t1, t2, height: int) -> float:
    """Half the log of the best extremal-length ratio over enumerated classes."""
    if height < 1:
        raise ValueError(f"height must be positive, got {height}")
    a, b = _tau(t1), _tau(t2)
    best = 1.0
    for p, q in primitive_classes(height):
        ea, eb = torus_ext(a, (p, q)), torus_ext(b, (p, q))
        best = max(best, ea / eb, eb / ea)
    return 0.5 * math.log(best)


# -- hyperbolic segments, for the control triangles -------------------------

def _geodesic_params(a: complex, b: complex):
    """Geodesic through a, b: ('v', x) for a vertical line or ('c', centre, radius)."""
    if abs(a.real - b.real) <= 1e-13 * (abs(a) + abs(b)):
        return ("v", 0.5 * (a.real + b.real))
    c = (abs(b) ** 2 - abs(a) ** 2) / (2 * (b.real - a.real))
    return ("c", c, abs(a - c))


def _to_vertical(a: complex, b: complex):
    """Moebius map sending the geodesic through a, b to the imaginary axis."""
    g = _geodesic_params(a, b)
    if g[0] == "v":
        x = g[1]
        return lambda z: z - x
    _, c, r = g
    e1, e2 = c + r, c - r
    return lambda z: (z - e1) / (z - e2)


def hyperbolic_distance(a: complex, b: complex) -> float:
    return 2 * math.asinh(abs(a - b) / (2 * math.sqrt(a.imag * b.imag)))


def point_segment_distance(u: complex, a: complex, b: complex) -> float:
    """Teichmueller (half-hyperbolic) distance from u to the geodesic segment [a, b]."""
    f = _to_vertical(a, b)
    fa, fb, fu = f(a), f(b), f(u)
    # after the map the geodesic is the positive imaginary axis (up to orientation)
    if fa.imag < 0:
        fa, fb, fu = -fa.conjugate(), -fb.conjugate(), -fu.conjugate()
    lo, hi = sorted((fa.imag, fb.imag))
    r = abs(fu)
    if lo <= r <= hi:
        d = math.asinh(abs(fu.real) / fu.imag)
    else:
        d = min(hyperbolic_distance(fu, complex(0, lo)), hyperbolic_distance(fu, complex(0, hi)))
    return 0.5 * d


def geodesic_point(a: complex, b: complex, s: float) -> complex:
    """Point at fraction s of the way from a to b along the hyperbolic geodesic."""
    f = _to_vertical(a, b)
    fa, fb = f(a), f(b)
    flip = fa.imag < 0
    if flip:
        fa, fb = -fa.conjugate(), -fb.conjugate()
    ya, yb = fa.imag, fb.imag
    w = complex(0, ya * (yb / ya) ** s)
    if flip:
        w = -w.conjugate()
    g = _geodesic_params(a, b)
    if g[0] == "v":
        return w + g[1]
    _, c, r = g
    e1, e2 = c + r, c - r
    return (e1 - e2 * w) / (1 - w)


@dataclass(frozen=True)
class TorusTriangle:
    n: int
    x0: complex
    y1: complex
    y2: complex
    delta_thin: float  # sampled max over u in [y1 y2] of the distance to the other sides
    delta_star: float  # same quantity at the midpoint of [y1 y2]


def torus_triangle(n: int, samples: int = 257) -> TorusTriangle:
    """Triangle i, i+n, i-n: the twist images of the square torus."""
    x0, y1, y2 = 1j, complex(n, 1), complex(-n, 1)
    best = 0.0
    for k in range(samples):
        u = geodesic_point(y1, y2, k / (samples - 1))
        best = max(best, min(point_segment_distance(u, x0, y1), point_segment_distance(u, x0, y2)))
    mid = geodesic_point(y1, y2, 0.5)
    star = min(point_segment_distance(mid, x0, y1), point_segment_distance(mid, x0, y2))
    return TorusTriangle(n, x0, y1, y2, best, star)


def triangle_sample_points(n: int, per_side: int = 5) -> List[complex]:
    x0, y1, y2 = 1j, complex(n, 1), complex(-n, 1)
    pts = []
    for a, b in ((x0, y1), (y1, y2), (y2, x0)):
        for k in range(per_side):
            pts.append(geodesic_point(a, b, k / per_side))
    return pts


def distance_matrix(points: Sequence[complex]):
    import numpy as np
    n = len(points)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = torus_distance(points[i], points[j])
    return D
