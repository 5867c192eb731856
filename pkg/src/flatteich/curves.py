"""Homotopy classes of closed curves carried as flat segment chains.

A curve is developed once on its fixture surface.  Each segment is stored
as its per-polygon holonomy in the curve's starting chart, so that on a
deformed surface (per-polygon linear maps) the segment holonomy is
``sum_p M_p @ part_p``.  Dehn twists add whole core loops to the segments
that cross the core, which keeps everything exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ChartMismatch, NonPositiveK, UnknownCylinder
from .exact import Number, Vec, cross, exact_sqrt, mat_vec, norm, norm_sq, sign, vadd, vscale
from .surface import Cylinder, DevelopedPath, FlatSurface, MarkedPoint, chart_parts, core_path, develop

Parts = Tuple[Tuple[int, Vec], ...]
_ZERO = (Fraction(0), Fraction(0))


def _add_parts(a: Parts, b: Parts, k: Number = 1) -> Parts:
    acc: Dict[int, Vec] = dict(a)
    for p, v in b:
        acc[p] = vadd(acc.get(p, _ZERO), vscale(k, v))
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class Segment:
    parts: Parts
    # cylinder id -> sum over crossings of (intersection sign * chart signs); used to add core loops
    twist_factor: Tuple[Tuple[str, int], ...] = ()
    # cylinder id -> algebraic intersection number of this segment with the core
    crossing: Tuple[Tuple[str, int], ...] = ()

    def holonomy(self, maps: Optional[Sequence] = None) -> Vec:
        v = _ZERO
        for p, w in self.parts:
            v = vadd(v, mat_vec(maps[p], w) if maps is not None else w)
        return v


@dataclass(frozen=True)
class CurveClass:
    name: str
    segments: Tuple[Segment, ...]
    base_key: str
    taut: bool = False
    core_of: Optional[str] = None
    start: Optional[Tuple[int, Vec]] = None

    @property
    def crossings(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for seg in self.segments:
            for cid, k in seg.crossing:
                out[cid] = out.get(cid, 0) + k
        return out

    @property
    def crossing_segments(self) -> Dict[str, int]:
        """Number of segments meeting each core."""
        out: Dict[str, int] = {}
        for seg in self.segments:
            for cid, k in seg.crossing:
                if k:
                    out[cid] = out.get(cid, 0) + 1
        return out

    def holonomies(self, maps=None) -> Tuple[Vec, ...]:
        return tuple(seg.holonomy(maps) for seg in self.segments)


@dataclass(frozen=True)
class HolonomyStats:
    h: float
    v: float
    len: float
    segments: Tuple[Vec, ...] = ()
    bound_only: bool = False  # len came from the single-segment formula


def _crossing_events(path: DevelopedPath, core: DevelopedPath, cid: str) -> Tuple[int, int]:
    """(algebraic count, twist factor) of a curve segment against a core loop."""
    count = factor = 0
    for a in path.pieces:
        for b in core.pieces:
            if a.polygon != b.polygon:
                continue
            da, db = a.vector, b.vector
            den = cross(db, da)
            if den == 0:
                continue
            w = (a.start[0] - b.start[0], a.start[1] - b.start[1])
            t = cross(w, db) / den  # along the curve piece
            u = cross(w, da) / den  # along the core piece
            if t < 0 or t > 1 or u < 0 or u > 1:
                continue
            if t in (0, 1) or u in (0, 1):
                raise ChartMismatch(f"curve meets the core of {cid} on a polygon edge")
            eps = sign(den)
            count += eps
            factor += eps * a.sign * b.sign
    return count, factor


def curve_paths(s: FlatSurface, start_polygon: int, start_point: Vec,
                segments: Sequence[Vec], name: str = "curve") -> List[DevelopedPath]:
    """Develop each segment of a chain; piece signs refer to the starting chart."""
    poly, pt, sgn = start_polygon, start_point, 1
    out = []
    for vec in segments:
        if vec[0] == 0 and vec[1] == 0:
            raise ChartMismatch(f"curve {name}: zero-length segment")
        path = develop(s, poly, pt, vscale(sgn, vec))
        path = DevelopedPath(tuple(replace(pc, sign=pc.sign * sgn) for pc in path.pieces),
                             path.end_polygon, path.end_point, path.end_sign * sgn, path.crossed)
        out.append(path)
        poly, pt, sgn = path.end_polygon, path.end_point, path.end_sign
    if poly != start_polygon or pt != start_point:
        raise ChartMismatch(f"curve {name} does not close: ends at polygon {poly}, point {pt}")
    return out


def develop_curve(s: FlatSurface, name: str, start_polygon: int, start_point: Vec,
                  segments: Sequence[Vec], taut: bool = False, core_of: Optional[str] = None) -> CurveClass:
    """Develop a closed chain on a fixture surface and record its core crossings.

    Segment vectors are given in the chart of ``start_polygon`` continued
    along the chain.
    """
    if not s.is_base:
        raise ChartMismatch("curves are developed on the undeformed fixture surface")
    cores = {c.id: core_path(s, c) for c in s.cylinders if c.core_anchor is not None}
    segs: List[Segment] = []
    for path in curve_paths(s, start_polygon, start_point, segments, name):
        tf, cr = [], []
        for cid, cp in cores.items():
            k, f = _crossing_events(path, cp, cid)
            tf.append((cid, f))
            cr.append((cid, k))
        segs.append(Segment(chart_parts(path), tuple(tf), tuple(cr)))
    return CurveClass(name, tuple(segs), s.base_key, taut, core_of, (start_polygon, start_point))


def _check_chart(gamma: CurveClass, s: FlatSurface) -> None:
    if gamma.base_key != s.base_key:
        raise ChartMismatch(f"curve {gamma.name} belongs to another fixture")


def holonomy_stats(gamma: CurveClass, s: FlatSurface) -> HolonomyStats:
    _check_chart(gamma, s)
    vecs = gamma.holonomies(s.maps)
    h = sum(abs(float(v[0])) for v in vecs)
    v = sum(abs(float(v[1])) for v in vecs)
    ln = sum(math.hypot(float(x[0]), float(x[1])) for x in vecs)
    return HolonomyStats(h, v, ln, vecs)


def stats_at(gamma: CurveClass, point: MarkedPoint) -> HolonomyStats:
    return holonomy_stats(transport_curve(gamma, point), point.surface)


def transform_stats(st: HolonomyStats, K: Number) -> HolonomyStats:
    """Horizontal lengths scale by sqrt(K), vertical ones by 1/sqrt(K)."""
    if not K > 0:
        raise NonPositiveK(f"stretch factor must be positive, got {K}")
    r = math.sqrt(float(K))
    if st.segments:
        segs = tuple((r * float(x), float(y) / r) for x, y in st.segments)
        return HolonomyStats(st.h * r, st.v / r, sum(math.hypot(x, y) for x, y in segs), segs)
    h, v = st.h * r, st.v / r
    return HolonomyStats(h, v, math.hypot(h, v), (), bound_only=True)


def twist_curve(gamma: CurveClass, cyl: Cylinder, n: int) -> CurveClass:
    """Image of ``gamma`` under the n-th power of the Dehn twist about ``cyl``."""
    factors = {cid for seg in gamma.segments for cid, _ in seg.twist_factor}
    if cyl.id not in factors:
        raise UnknownCylinder(f"curve {gamma.name} has no crossing data for cylinder {cyl.id}")
    if n == 0 or all(dict(seg.twist_factor)[cyl.id] == 0 for seg in gamma.segments):
        return gamma
    if not cyl.core_parts:
        raise ChartMismatch(f"cylinder {cyl.id} has no developed core")
    segs = []
    for seg in gamma.segments:
        f = dict(seg.twist_factor)[cyl.id]
        segs.append(replace(seg, parts=_add_parts(seg.parts, cyl.core_parts, n * f)) if f else seg)
    return replace(gamma, segments=tuple(segs), taut=False)


def transport_curve(gamma: CurveClass, point: MarkedPoint) -> CurveClass:
    """Pull ``gamma`` back through the twists in the point's marking."""
    out = gamma
    for tw in reversed(point.twists):
        out = twist_curve(out, point.base.cylinder(tw.cylinder), -tw.n)
    return out


def _monotone(vecs: Iterable[Vec]) -> bool:
    vecs = list(vecs)
    xs = {sign(v[0]) for v in vecs} - {0}
    ys = {sign(v[1]) for v in vecs} - {0}
    return len(xs) <= 1 and len(ys) <= 1


def length_lower_bound_sq(gamma: CurveClass, s: FlatSurface) -> Tuple[Number, str]:
    """Square of a homotopy-invariant lower bound for the flat length of ``gamma``.

    The bound is the largest of
      (a) sum over annotated cylinders of |algebraic crossings| * height,
      (b) max(h, v) for a taut crossing-monotone chain on a linear image of its fixture,
      (c) |net holonomy| on a translation surface (a homology invariant).
    Squares are returned so that exact data stays exact.
    """
    _check_chart(gamma, s)
    best, wit = 0, "none"
    cnt = gamma.crossings
    a = 0
    for c in s.cylinders:
        a += abs(cnt.get(c.id, 0)) * c.height
    if a > 0:
        best, wit = a * a, "crossings"
    vecs = gamma.holonomies(s.maps)
    if gamma.taut and s.is_global_linear and _monotone(vecs):
        h = sum(abs(v[0]) for v in vecs)
        v = sum(abs(v[1]) for v in vecs)
        m = max(h, v)
        if m * m > best:
            best, wit = m * m, "transverse measure"
    if s.is_translation:
        net = _ZERO
        for v in vecs:
            net = vadd(net, v)
        q = norm_sq(net)
        if q > best:
            best, wit = q, "net holonomy"
    return best, wit


def geodesic_length_lower_bound(gamma: CurveClass, s: FlatSurface) -> Number:
    sq, _ = length_lower_bound_sq(gamma, s)
    return exact_sqrt(sq)
