"""Certified bounds on extremal length and Teichmueller distance.

Lower bounds for ext come from the flat metric itself (length^2 / area);
upper bounds come from explicit embedded flat annuli (ext <= 1/mod).
Distances are bounded below through extremal-length ratios and above by
explicit stretch maps.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .curves import CurveClass, holonomy_stats, length_lower_bound_sq, transport_curve
from .errors import AnnulusTouchesCore, BadK, CertificationError, ChartMismatch, EmptyFamily, NotCore
from .exact import Number, Vec, cross, det, dot, exact_sqrt, is_exact, mat_vec, norm_sq, vadd, vscale, vsub
from .surface import FlatSurface, MarkedPoint, base_diagnostics, core_path, develop, plumb, rotate_structure

INF = math.inf


@dataclass(frozen=True)
class ExtInterval:
    curve: str
    lo: Number
    hi: Number
    lo_witness: str = ""
    hi_witness: str = ""

    @property
    def tight(self) -> bool:
        return self.hi != INF and float(self.hi) - float(self.lo) < 1e-12


@dataclass(frozen=True)
class DistBound:
    lo: float
    hi: float
    provenance: str = ""


# -- audit trail -----------------------------------------------------------

_AUDIT: ContextVar[Optional[list]] = ContextVar("flatteich_audit", default=None)


@contextmanager
def audit():
    """Collect every ExtInterval and DistBound produced inside the block."""
    token = _AUDIT.set([])
    try:
        yield _AUDIT.get()
    finally:
        _AUDIT.reset(token)


def _record(obj) -> None:
    log = _AUDIT.get()
    if log is not None:
        log.append(obj)


def _le(lo: Number, hi: Number) -> bool:
    if hi == INF:
        return True
    if is_exact(lo) and is_exact(hi):
        return lo <= hi
    return float(lo) <= float(hi) * (1 + 1e-12) + 1e-300


# -- fixture annuli --------------------------------------------------------

@dataclass(frozen=True)
class Annulus:
    """A flat collar: the strip of width ``width`` around the closed straight
    line from ``anchor`` with holonomy ``vector`` (fixture coordinates)."""

    name: str
    curve: str
    polygon: int
    anchor: Vec
    vector: Vec
    width: Number
    avoids: Tuple[str, ...] = ()
    quads: Tuple[Tuple[int, Tuple[Vec, ...]], ...] = ()

    @property
    def base_modulus(self) -> Number:
        return self.width / exact_sqrt(norm_sq(self.vector))


def _project(poly: Sequence[Vec], axis: Vec):
    vals = [dot(p, axis) for p in poly]
    return min(vals), max(vals)


def _interiors_meet(a: Sequence[Vec], b: Sequence[Vec]) -> bool:
    """Separating-axis test; touching boundaries do not count as meeting."""
    for poly in (a, b):
        n = len(poly)
        for i in range(n if n > 2 else 1):
            e = vsub(poly[(i + 1) % n], poly[i])
            axis = (-e[1], e[0])
            lo1, hi1 = _project(a, axis)
            lo2, hi2 = _project(b, axis)
            if hi1 <= lo2 or hi2 <= lo1:
                return False
    return True


def annulus_geometry(s: FlatSurface, ann: Annulus) -> Annulus:
    """Validate an annulus on its fixture and attach its per-polygon pieces.

    Checks that the centre line and both boundary lines close up crossing
    the same edges, that no polygon corner lies inside the strip, that the
    strip does not overlap itself and that it misses the cores listed in
    ``avoids``.
    """
    if not s.is_base:
        raise ChartMismatch("annuli are validated on the undeformed fixture surface")
    L = exact_sqrt(norm_sq(ann.vector))
    off = vscale(ann.width / (2 * L), (-ann.vector[1], ann.vector[0]))
    paths = []
    for k in (1, 0, -1):
        start = vadd(ann.anchor, vscale(k, off))
        try:
            p = develop(s, ann.polygon, start, ann.vector)
        except ChartMismatch as exc:
            raise ChartMismatch(f"annulus {ann.name}: {exc}") from None
        if p.end_polygon != ann.polygon or p.end_point != start or p.end_sign != 1:
            raise ChartMismatch(f"annulus {ann.name}: boundary line does not close up")
        paths.append(p)
    left, mid, right = paths
    if not (left.crossed == mid.crossed == right.crossed):
        raise ChartMismatch(f"annulus {ann.name}: strip is cut by a polygon corner")
    quads = []
    for a, b in zip(left.pieces, right.pieces):
        q = (a.start, a.end, b.end, b.start)
        if cross(vsub(q[1], q[0]), vsub(q[3], q[0])) > 0:
            q = q[::-1]
        quads.append((a.polygon, q))
        for v in s._vertex_cache[a.polygon]:
            if _strictly_inside(q, v):
                raise ChartMismatch(f"annulus {ann.name}: polygon {a.polygon} has a corner inside the strip")
    for i in range(len(quads)):
        for j in range(i + 1, len(quads)):
            if quads[i][0] == quads[j][0] and _interiors_meet(quads[i][1], quads[j][1]):
                raise ChartMismatch(f"annulus {ann.name} overlaps itself in polygon {quads[i][0]}")
    for cid in ann.avoids:
        cp = core_path(s, s.cylinder(cid))
        for pc in cp.pieces:
            for poly, q in quads:
                if poly == pc.polygon and _interiors_meet(q, (pc.start, pc.end)):
                    raise AnnulusTouchesCore(f"annulus {ann.name} meets the core of cylinder {cid}")
    return Annulus(ann.name, ann.curve, ann.polygon, ann.anchor, ann.vector, ann.width, ann.avoids, tuple(quads))


def _strictly_inside(quad: Sequence[Vec], x: Vec) -> bool:
    n = len(quad)
    sides = [cross(vsub(quad[(i + 1) % n], quad[i]), vsub(x, quad[i])) for i in range(n)]
    return all(v > 0 for v in sides) or all(v < 0 for v in sides)


def annulus_meets_core(s: FlatSurface, ann: Annulus, cid: str) -> bool:
    cp = core_path(s, s.cylinder(cid))
    return any(poly == pc.polygon and _interiors_meet(q, (pc.start, pc.end))
               for pc in cp.pieces for poly, q in ann.quads)


def _common_map(s: FlatSurface, polys: Iterable[int]):
    maps = {s.maps[p] for p in polys}
    return maps.pop() if len(maps) == 1 else None


def annulus_modulus(s: FlatSurface, ann: Annulus) -> Optional[Number]:
    """Modulus of the image of a fixture annulus, if one linear map carries it."""
    if not ann.quads:
        raise ChartMismatch(f"annulus {ann.name} has not been validated")
    m = _common_map(s, (p for p, _ in ann.quads))
    if m is None:
        return None
    v = ann.vector
    mv = mat_vec(m, v)
    return abs(det(m)) * ann.width * exact_sqrt(norm_sq(v)) / norm_sq(mv)


def cylinder_image_modulus(point: MarkedPoint, cid: str) -> Optional[Number]:
    """Modulus of the image of a fixture cylinder on the deformed surface."""
    c = point.base.cylinder(cid)
    if not c.polygons:
        return None
    m = _common_map(point.surface, c.polygons)
    if m is None:
        return None
    core = c.core_holonomy
    return abs(det(m)) * c.circumference * c.height / norm_sq(mat_vec(m, core))


# -- extremal length -------------------------------------------------------

def ext_interval(gamma: CurveClass, point: MarkedPoint, annuli: Sequence[Annulus] = ()) -> ExtInterval:
    """Certified interval for the extremal length of ``gamma`` at ``point``.

    ``gamma`` is a fixture curve; it is pulled back through the point's
    twists before measuring.
    """
    s = point.surface
    gt = transport_curve(gamma, point)
    lsq, lo_wit = length_lower_bound_sq(gt, s)
    area = s.area
    lo = lsq / area
    hi, hi_wit = INF, "none"
    if gamma.core_of is not None and gt is gamma:
        mod = cylinder_image_modulus(point, gamma.core_of)
        if mod is not None:
            hi, hi_wit = 1 / mod, f"cylinder {gamma.core_of}"
    if gt is gamma:
        for ann in annuli:
            if ann.curve != gamma.name:
                continue
            mod = annulus_modulus(s, ann)
            if mod is not None and 1 / mod < hi:
                hi, hi_wit = 1 / mod, f"annulus {ann.name}"
    diag = base_diagnostics(point.base)
    if diag.genus == 1 and diag.translation and s.is_global_linear:
        net = (0, 0)
        for v in gt.holonomies(s.maps):
            net = vadd(net, v)
        q = norm_sq(net) / area
        if q > 0 and q < hi:
            hi, hi_wit = q, "flat torus"
    if not _le(lo, hi):
        raise CertificationError(f"ext interval for {gamma.name} has lo {lo} > hi {hi}")
    out = ExtInterval(gamma.name, lo, hi, lo_wit, hi_wit)
    _record(out)
    return out


# -- distances -------------------------------------------------------------

def kerckhoff_lower_bound(family: Sequence[Tuple[ExtInterval, ExtInterval]]) -> float:
    """Half the log of the best certified extremal-length ratio (0 if none exceeds 1)."""
    if not family:
        raise EmptyFamily("the Kerckhoff family is empty")
    best = 1.0
    for a, b in family:
        for lo, hi in ((a.lo, b.hi), (b.lo, a.hi)):
            if hi == INF or lo == 0:
                continue
            best = max(best, float(Fraction(lo) / Fraction(hi)) if is_exact(lo) and is_exact(hi)
                       else float(lo) / float(hi))
    return 0.5 * math.log(best)


def stretch_upper_bound(K) -> float:
    if not K >= 1:
        raise BadK(f"stretch factor must be at least 1, got {K}")
    return 0.5 * math.log(K)


def certify_pair(family: Sequence[Tuple[ExtInterval, ExtInterval]], K, label: str = "") -> DistBound:
    """Kerckhoff lower bound sandwiched under an explicit stretch upper bound."""
    lo = kerckhoff_lower_bound(family)
    hi = stretch_upper_bound(K)
    if lo > hi + 1e-12:
        raise CertificationError(f"{label}: Kerckhoff bound {lo} exceeds stretch bound {hi}")
    out = DistBound(lo, hi, label)
    _record(out)
    return out


# -- convexity along a leg -------------------------------------------------

@dataclass(frozen=True)
class ConvexityReport:
    curve: str
    h: float
    v: float
    K: Tuple[Fraction, ...]
    length_sq: Tuple[Fraction, ...]
    second_differences: Tuple[Fraction, ...]
    interior_below_endpoints: bool
    monotone_only: bool

    @property
    def ok(self) -> bool:
        return all(d >= 0 for d in self.second_differences) and self.interior_below_endpoints

    @property
    def modulus_lower_bounds(self) -> Tuple[float, ...]:
        """area / |beta|^2 along the leg (area taken as 1)."""
        return tuple(1 / float(x) for x in self.length_sq)


def modulus_convexity_check(beta: CurveClass, base: MarkedPoint, theta: float,
                            K_values: Sequence) -> ConvexityReport:
    """|beta|^2(K) = K h^2 + v^2 / K along the leg in direction ``theta``.

    ``h`` and ``v`` are measured on the rotated structure; the check runs in
    exact arithmetic on the binary64 values of h^2 and v^2.
    """
    if beta.core_of is None:
        raise NotCore(f"curve {beta.name} is not a cylinder core")
    rot = rotate_structure(base.surface, theta)
    st = holonomy_stats(transport_curve(beta, base), rot)
    h2, v2 = Fraction(st.h * st.h), Fraction(st.v * st.v)
    ks = sorted(Fraction(k) for k in K_values)
    vals = [k * h2 + v2 / k for k in ks]
    dd = []
    for i in range(1, len(ks) - 1):
        a, b, c = ks[i - 1], ks[i], ks[i + 1]
        dd.append(((vals[i + 1] - vals[i]) / (c - b) - (vals[i] - vals[i - 1]) / (b - a)) / (c - a))
    if v2 == 0:
        below = all(vals[i] < vals[i + 1] for i in range(len(vals) - 1))
    else:
        top = max(vals[0], vals[-1])
        below = all(x <= top for x in vals[1:-1])
    return ConvexityReport(beta.name, st.h, st.v, tuple(ks), tuple(vals), tuple(dd), below, v2 == 0)
