"""Flat half-translation surfaces given by polygons with paired edges.

A surface is a tuple of counter-clockwise polygons, each a cyclic list of
edge vectors in the natural coordinate ``w`` of a quadratic differential.
Edge ``(p, j)`` is glued to its partner either by a translation (sign +1,
partner vector is ``-v``) or by a half-turn (sign -1, partner vector is
``v``).

Deformations (stretch, rotation, plumbing, homothety) act linearly on
each polygon.  Every surface remembers, per polygon, the accumulated
linear map relative to the fixture it was derived from (``maps``) and a
digest of that fixture (``base_key``).  Curves are stored in fixture
coordinates and pushed through ``maps`` when measured, so fixture curves
can be evaluated on any deformation of their fixture.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    BadPairing,
    ChartMismatch,
    DegeneratePolygon,
    NonClosingPolygon,
    NonHalfTranslationAngle,
    NonPositiveK,
    UnknownCylinder,
    ZeroArea,
)
from .exact import (
    IDENTITY,
    Mat,
    Number,
    Vec,
    cross,
    det,
    dot,
    exact_sqrt,
    is_exact,
    mat_mul,
    mat_vec,
    rotation,
    vadd,
    vscale,
    vsub,
)

EdgeRef = Tuple[int, int]

_FLOAT_TOL = 1e-12
_MAX_CROSSINGS = 200_000


def _close(a: Number, b: Number, tol: float = _FLOAT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a)), abs(float(b)))


def _vclose(u: Vec, v: Vec) -> bool:
    return _close(u[0], v[0]) and _close(u[1], v[1])


@dataclass(frozen=True)
class Pairing:
    a: EdgeRef
    b: EdgeRef
    sign: int = 1  # +1 translation, -1 half-turn


@dataclass(frozen=True)
class Cylinder:
    """A horizontal cylinder annotation.

    ``polygons`` lists the polygons the cylinder is made of (fixtures are
    cut along cylinder boundaries).  ``core_anchor`` is a point of the core
    in fixture coordinates; ``core_parts`` is the developed core loop,
    summed per polygon in the core's own chart, filled by
    :meth:`FlatSurface.with_cores`.  Both are fixture-chart data and are
    carried unchanged by deformations.
    """

    id: str
    core_holonomy: Vec
    height: Number
    polygons: Tuple[int, ...] = ()
    core_anchor: Optional[Tuple[int, Vec]] = None
    crossing_edges: Tuple[EdgeRef, ...] = ()
    core_parts: Tuple[Tuple[int, Vec], ...] = ()

    @property
    def circumference(self) -> Number:
        return self.core_holonomy[0]

    @property
    def modulus(self) -> Number:
        return cylinder_modulus(self)


def cylinder_modulus(c: Cylinder) -> Number:
    """Height over circumference."""
    return c.height / c.circumference


@dataclass(frozen=True)
class Piece:
    """A straight piece of a developed path inside one polygon.

    ``sign`` converts the path's starting chart to polygon coordinates.
    """

    polygon: int
    start: Vec
    end: Vec
    sign: int

    @property
    def vector(self) -> Vec:
        return vsub(self.end, self.start)


@dataclass(frozen=True)
class DevelopedPath:
    pieces: Tuple[Piece, ...]
    end_polygon: int
    end_point: Vec
    end_sign: int
    crossed: Tuple[EdgeRef, ...]


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class Diagnostics:
    genus: int
    cone_angles: Tuple[int, ...]  # total angle of each vertex class in units of pi
    area: Number
    translation: bool
    completely_periodic: bool
    checks: Tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def cone_points(self) -> Tuple[int, ...]:
        return tuple(k for k in self.cone_angles if k != 2)


@dataclass(frozen=True)
class FlatSurface:
    polygons: Tuple[Tuple[Vec, ...], ...]
    pairings: Tuple[Pairing, ...]
    cylinders: Tuple[Cylinder, ...] = ()
    maps: Tuple[Mat, ...] = ()
    base_key: str = ""
    name: str = ""

    def __post_init__(self):
        polys = tuple(tuple((e[0], e[1]) for e in poly) for poly in self.polygons)
        object.__setattr__(self, "polygons", polys)
        object.__setattr__(self, "pairings", tuple(self.pairings))
        object.__setattr__(self, "cylinders", tuple(self.cylinders))
        if not self.maps:
            object.__setattr__(self, "maps", tuple(IDENTITY for _ in polys))
        if not self.base_key:
            digest = hashlib.sha1(repr((polys, self.pairings)).encode()).hexdigest()[:16]
            object.__setattr__(self, "base_key", digest)

    # -- combinatorics -------------------------------------------------
    @cached_property
    def partner(self) -> Dict[EdgeRef, Tuple[EdgeRef, int]]:
        out: Dict[EdgeRef, Tuple[EdgeRef, int]] = {}
        for pr in self.pairings:
            if pr.a == pr.b:
                raise BadPairing(f"edge {pr.a} is paired with itself")
            for e, f in ((pr.a, pr.b), (pr.b, pr.a)):
                if e in out:
                    raise BadPairing(f"edge {e} is paired more than once")
                out[e] = (f, pr.sign)
        return out

    def vertices(self, p: int) -> List[Vec]:
        pts = [(Fraction(0), Fraction(0))]
        for e in self.polygons[p][:-1]:
            pts.append(vadd(pts[-1], e))
        return pts

    @cached_property
    def _vertex_cache(self) -> Tuple[Tuple[Vec, ...], ...]:
        return tuple(tuple(self.vertices(p)) for p in range(len(self.polygons)))

    def polygon_area(self, p: int) -> Number:
        pts = self._vertex_cache[p]
        s = 0
        for i, a in enumerate(pts):
            s += cross(a, pts[(i + 1) % len(pts)])
        return s / 2

    @property
    def area(self) -> Number:
        return sum(self.polygon_area(p) for p in range(len(self.polygons)))

    @property
    def is_translation(self) -> bool:
        return all(pr.sign == 1 for pr in self.pairings)

    @property
    def is_base(self) -> bool:
        return all(m == IDENTITY for m in self.maps)

    @property
    def is_global_linear(self) -> bool:
        """True when one linear map relates every polygon to the fixture."""
        return len(set(self.maps)) <= 1

    def cylinder(self, cid: str) -> Cylinder:
        for c in self.cylinders:
            if c.id == cid:
                return c
        raise UnknownCylinder(f"no cylinder {cid!r} on surface {self.name or self.base_key}")

    def with_cores(self) -> "FlatSurface":
        """Develop every cylinder core from its anchor and store it per polygon."""
        if not self.is_base:
            raise ChartMismatch("cores can only be developed on an undeformed fixture surface")
        cyls = []
        for c in self.cylinders:
            if c.core_anchor is None:
                cyls.append(c)
                continue
            path = core_path(self, c)
            cyls.append(replace(c, core_parts=chart_parts(path)))
        return replace(self, cylinders=tuple(cyls))


# -- developing straight paths ---------------------------------------------

def _point_in_polygon(s: FlatSurface, p: int, x: Vec) -> bool:
    """Strict interior test (even-odd rule; boundary counts as outside)."""
    pts = s._vertex_cache[p]
    n = len(pts)
    inside = False
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        if cross(vsub(b, a), vsub(x, a)) == 0 and min(a[0], b[0]) <= x[0] <= max(a[0], b[0]) \
                and min(a[1], b[1]) <= x[1] <= max(a[1], b[1]):
            return False
        if (a[1] > x[1]) != (b[1] > x[1]):
            xi = a[0] + (x[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if x[0] < xi:
                inside = not inside
    return inside


def develop(s: FlatSurface, polygon: int, point: Vec, vector: Vec) -> DevelopedPath:
    """Follow the straight segment ``point + t*vector`` across edge gluings.

    ``vector`` is expressed in the coordinates of ``polygon``.  Raises
    :class:`ChartMismatch` if the start point is not interior, or if the
    path meets a polygon corner, runs along an edge, or ends on an edge.
    """
    if not (0 <= polygon < len(s.polygons)):
        raise ChartMismatch(f"no polygon {polygon}")
    if not _point_in_polygon(s, polygon, point):
        raise ChartMismatch(f"start point {point} is not interior to polygon {polygon}")
    exact = is_exact(point[0]) and is_exact(vector[0])
    eps = 0 if exact else 1e-13
    pieces: List[Piece] = []
    crossed: List[EdgeRef] = []
    p, x, r, sgn = polygon, point, vector, 1
    for _ in range(_MAX_CROSSINGS):
        pts = s._vertex_cache[p]
        n = len(pts)
        best_t, hits = None, []
        for j in range(n):
            a, b = pts[j], pts[(j + 1) % n]
            e = vsub(b, a)
            den = cross(r, e)
            ax = vsub(a, x)
            if den == 0 or (not exact and abs(den) < 1e-300):
                if cross(ax, r) == 0:
                    # collinear: overlapping forward travel along the edge is degenerate
                    ta, tb = dot(ax, r), dot(vsub(b, x), r)
                    if max(ta, tb) > eps and min(ta, tb) < dot(r, r):
                        raise ChartMismatch(f"path runs along edge ({p}, {j})")
                continue
            t = cross(ax, e) / den
            u = cross(ax, r) / den
            if t <= eps or u < -eps or u > 1 + eps:
                continue
            if best_t is None or t < best_t - eps:
                best_t, hits = t, [(j, u)]
            elif abs(t - best_t) <= eps:
                hits.append((j, u))
        if best_t is None or best_t > 1 + eps:
            end = vadd(x, r)
            pieces.append(Piece(p, x, end, sgn))
            return DevelopedPath(tuple(pieces), p, end, sgn, tuple(crossed))
        if abs(best_t - 1) <= eps:
            raise ChartMismatch(f"segment ends on edge ({p}, {hits[0][0]})")
        j, u = hits[0]
        if len(hits) > 1 or u <= eps or u >= 1 - eps:
            raise ChartMismatch(f"path passes through a corner of polygon {p}")
        q = vadd(x, vscale(best_t, r))
        pieces.append(Piece(p, x, q, sgn))
        crossed.append((p, j))
        (p2, j2), gsign = s.partner[(p, j)]
        pts2 = s._vertex_cache[p2]
        a2 = pts2[j2]
        e2 = s.polygons[p2][j2]
        x = vadd(a2, vscale(1 - u, e2))
        r = vscale((1 - best_t) * gsign, r)
        sgn *= gsign
        p = p2
    raise ChartMismatch("path crosses too many edges")


def chart_parts(path: DevelopedPath) -> Tuple[Tuple[int, Vec], ...]:
    """Per-polygon sums of a path's pieces, expressed in its starting chart."""
    acc: Dict[int, Vec] = {}
    for pc in path.pieces:
        v = vscale(pc.sign, pc.vector)
        acc[pc.polygon] = vadd(acc.get(pc.polygon, (Fraction(0), Fraction(0))), v)
    return tuple(sorted(acc.items()))


def core_path(s: FlatSurface, c: Cylinder) -> DevelopedPath:
    if c.core_anchor is None:
        raise ChartMismatch(f"cylinder {c.id} has no core anchor")
    poly, pt = c.core_anchor
    path = develop(s, poly, pt, c.core_holonomy)
    if path.end_polygon != poly or not _vclose(path.end_point, pt) or path.end_sign != 1:
        raise ChartMismatch(f"core of cylinder {c.id} does not close up")
    return path


# -- validation -----------------------------------------------------------

def _corner_angle(s: FlatSurface, p: int, j: int) -> float:
    edges = s.polygons[p]
    out = edges[j]
    back = vscale(-1, edges[j - 1])
    ang = math.atan2(float(cross(out, back)), float(dot(out, back)))
    if ang <= 0:
        ang += 2 * math.pi
    return ang


def _structure_checks(s: FlatSurface) -> None:
    for i, poly in enumerate(s.polygons):
        if len(poly) < 3:
            raise DegeneratePolygon(f"polygon {i} has fewer than 3 edges")
        tot = (sum(e[0] for e in poly), sum(e[1] for e in poly))
        if not (_close(tot[0], 0) and _close(tot[1], 0)):
            raise NonClosingPolygon(f"polygon {i}: edge vectors sum to {tot}")
        if s.polygon_area(i) <= 0:
            raise DegeneratePolygon(f"polygon {i} is not counter-clockwise with positive area")
    edges = {(p, j) for p, poly in enumerate(s.polygons) for j in range(len(poly))}
    try:
        partner = s.partner
    except BadPairing:
        raise
    missing = edges - set(partner)
    if missing:
        raise BadPairing(f"unpaired edges: {sorted(missing)}")
    extra = set(partner) - edges
    if extra:
        raise BadPairing(f"pairings reference unknown edges: {sorted(extra)}")
    for pr in s.pairings:
        if pr.sign not in (1, -1):
            raise BadPairing(f"pairing {pr.a}-{pr.b} has sign {pr.sign}")
        if pr.a == pr.b:
            raise BadPairing(f"edge {pr.a} is paired with itself")
        va = s.polygons[pr.a[0]][pr.a[1]]
        vb = s.polygons[pr.b[0]][pr.b[1]]
        want = vscale(-pr.sign, va)
        if not _vclose(vb, want):
            kind = "translation" if pr.sign == 1 else "half-turn"
            raise BadPairing(
                f"edges {pr.a} and {pr.b}: holonomies {va} and {vb} do not match a {kind} gluing")


def vertex_classes(s: FlatSurface) -> List[List[EdgeRef]]:
    """Corners grouped by the surface point they represent."""
    seen = set()
    classes = []
    for p, poly in enumerate(s.polygons):
        for j in range(len(poly)):
            if (p, j) in seen:
                continue
            cls = []
            cur = (p, j)
            while cur not in seen:
                seen.add(cur)
                cls.append(cur)
                (p2, j2), _ = s.partner[cur]
                cur = (p2, (j2 + 1) % len(s.polygons[p2]))
            classes.append(cls)
    return classes


def validate(s: FlatSurface) -> Diagnostics:
    """Check every surface invariant and compute the genus from cone angles.

    Structural defects raise (NonClosingPolygon, DegeneratePolygon,
    BadPairing, NonHalfTranslationAngle); cylinder annotation problems are
    reported as failed checks.
    """
    _structure_checks(s)
    checks = [Check("polygons close", True), Check("pairing is a matching involution", True)]

    angles = []
    for cls in vertex_classes(s):
        total = sum(_corner_angle(s, p, j) for p, j in cls)
        k = round(total / math.pi)
        if k < 1 or abs(total - k * math.pi) > 1e-9:
            raise NonHalfTranslationAngle(
                f"vertex at corner {cls[0]}: total angle {total:.12g} is not a positive multiple of pi")
        angles.append(k)
    checks.append(Check("cone angles are multiples of pi", True, f"{angles}"))

    excess = sum(k - 2 for k in angles)  # in units of pi
    if excess % 4:
        raise NonHalfTranslationAngle(f"cone angle excess {excess}pi is not a multiple of 4pi")
    genus = excess // 4 + 1
    n_edges = sum(len(p) for p in s.polygons) // 2
    euler = len(angles) - n_edges + len(s.polygons)
    checks.append(Check("Euler characteristic matches Gauss-Bonnet", euler == 2 - 2 * genus,
                        f"V-E+F={euler}, genus={genus}"))
    checks.append(Check("genus at least 1", genus >= 1, f"genus={genus}"))

    area = s.area
    checks.append(Check("area positive", area > 0, f"area={area}"))

    cyl_area = 0
    owner: Dict[int, str] = {}
    for c in s.cylinders:
        ok = c.circumference > 0 and c.height > 0 and c.core_holonomy[1] == 0
        checks.append(Check(f"cylinder {c.id}: horizontal core, positive size", bool(ok),
                            f"core={c.core_holonomy}, height={c.height}"))
        cyl_area += c.circumference * c.height
        bad_poly = [p for p in c.polygons if not 0 <= p < len(s.polygons)]
        if bad_poly:
            checks.append(Check(f"cylinder {c.id}: polygons exist", False, f"{bad_poly}"))
            continue
        clash = [p for p in c.polygons if p in owner]
        checks.append(Check(f"cylinder {c.id}: polygons not shared", not clash, f"{clash}"))
        for p in c.polygons:
            owner[p] = c.id
        if c.polygons:
            a = sum(s.polygon_area(p) for p in c.polygons)
            checks.append(Check(f"cylinder {c.id}: polygon area equals circumference x height",
                                _close(a, c.circumference * c.height), f"{a} vs {c.circumference * c.height}"))
        if c.core_anchor is not None and s.is_base:
            try:
                path = core_path(s, c)
                inside = all(pc.polygon in c.polygons for pc in path.pieces) if c.polygons else True
                checks.append(Check(f"cylinder {c.id}: core closes inside the cylinder", inside))
                if c.crossing_edges:
                    got = sorted(set(path.crossed))
                    checks.append(Check(f"cylinder {c.id}: declared crossing edges", got == sorted(set(c.crossing_edges)),
                                        f"computed {got}"))
            except ChartMismatch as exc:
                checks.append(Check(f"cylinder {c.id}: core closes inside the cylinder", False, str(exc)))
    for pr in s.pairings:
        oa, ob = owner.get(pr.a[0]), owner.get(pr.b[0])
        if oa != ob and (oa is not None or ob is not None):
            v = s.polygons[pr.a[0]][pr.a[1]]
            checks.append(Check(f"edge {pr.a}~{pr.b} between cylinders is horizontal", v[1] == 0 or _close(v[1], 0)))
    tiles = cyl_area <= area or _close(cyl_area, area)
    checks.append(Check("cylinders fit in the surface", tiles, f"{cyl_area} <= {area}"))
    periodic = bool(s.cylinders) and _close(cyl_area, area)
    return Diagnostics(genus, tuple(angles), area, s.is_translation, periodic, tuple(checks))


@lru_cache(maxsize=256)
def base_diagnostics(s: FlatSurface) -> Diagnostics:
    return validate(s)


# -- deformations ---------------------------------------------------------

def _apply(s: FlatSurface, per_poly: Sequence[Mat], cylinders) -> FlatSurface:
    polys = tuple(tuple(mat_vec(m, e) for e in poly) for m, poly in zip(per_poly, s.polygons))
    maps = tuple(mat_mul(m, old) for m, old in zip(per_poly, s.maps))
    return replace(s, polygons=polys, maps=maps, cylinders=tuple(cylinders))


def apply_teich_stretch(s: FlatSurface, K: Number) -> FlatSurface:
    """Stretch horizontally by sqrt(K) and compress vertically by sqrt(K)."""
    if not K > 0:
        raise NonPositiveK(f"stretch factor must be positive, got {K}")
    r = exact_sqrt(K)
    m = (r, 0, 0, 1 / r)
    cyls = [replace(c, core_holonomy=(r * c.core_holonomy[0], c.core_holonomy[1]), height=c.height / r)
            for c in s.cylinders]
    return _apply(s, [m] * len(s.polygons), cyls)


def rotate_structure(s: FlatSurface, theta: float) -> FlatSurface:
    """Replace q by exp(i*theta) q: natural coordinates turn by theta/2.

    Cylinder annotations survive only when theta/2 is a multiple of pi.
    """
    m = rotation(theta / 2)
    keep = m == IDENTITY or m == (-1, 0, 0, -1)
    return _apply(s, [m] * len(s.polygons), s.cylinders if keep else ())


def normalize_area(s: FlatSurface) -> FlatSurface:
    a = s.area
    if not a > 0:
        raise ZeroArea(f"surface {s.name or s.base_key} has area {a}")
    lam = 1 / exact_sqrt(a)
    m = (lam, 0, 0, lam)
    cyls = [replace(c, core_holonomy=(lam * c.core_holonomy[0], 0), height=lam * c.height) for c in s.cylinders]
    return _apply(s, [m] * len(s.polygons), cyls)


def plumb(s: FlatSurface, cyl: Union[Cylinder, str], dh: Number, twist_fraction: Number) -> FlatSurface:
    """Graft height ``dh`` into a horizontal cylinder and reglue with a twist.

    Modelled as the affine map (x, y) -> (x + t*c*y/h, (h+dh)*y/h) on the
    cylinder's polygons, which is isometric to cutting along the core,
    inserting a flat cylinder of height ``dh`` and regluing after shifting
    by ``t*c``.  Polygons outside the cylinder are untouched.
    """
    cid = cyl if isinstance(cyl, str) else cyl.id
    c = s.cylinder(cid)
    if dh < 0:
        raise ValueError(f"plumbing height must be nonnegative, got {dh}")
    if not c.polygons:
        raise UnknownCylinder(f"cylinder {cid} has no polygon list; cannot plumb")
    h, circ = c.height, c.circumference
    m = (1, twist_fraction * circ / h, 0, (h + dh) / h)
    per = [m if p in c.polygons else IDENTITY for p in range(len(s.polygons))]
    cyls = [replace(x, height=h + dh) if x.id == cid else x for x in s.cylinders]
    return _apply(s, per, cyls)


# -- marked points --------------------------------------------------------

@dataclass(frozen=True)
class Stretch:
    K: Number


@dataclass(frozen=True)
class Rotate:
    theta: float


@dataclass(frozen=True)
class Twist:
    cylinder: str
    n: int


@dataclass(frozen=True)
class Plumb:
    cylinder: str
    dh: Number
    twist_fraction: Number


@dataclass(frozen=True)
class Normalize:
    pass


Move = Union[Stretch, Rotate, Twist, Plumb, Normalize]


def replay(base: FlatSurface, log: Sequence[Move]) -> FlatSurface:
    s = base
    for mv in log:
        if isinstance(mv, Stretch):
            s = apply_teich_stretch(s, mv.K)
        elif isinstance(mv, Rotate):
            s = rotate_structure(s, mv.theta)
        elif isinstance(mv, Plumb):
            s = plumb(s, mv.cylinder, mv.dh, mv.twist_fraction)
        elif isinstance(mv, Normalize):
            s = normalize_area(s)
        elif isinstance(mv, Twist):
            base.cylinder(mv.cylinder)  # a twist changes the marking only
        else:
            raise TypeError(f"unknown move {mv!r}")
    return s


@dataclass(frozen=True)
class MarkedPoint:
    """A point of Teichmueller space: a fixture plus the moves applied to it.

    Twists act on the marking (curves are pulled back through them);
    the other moves change the flat structure.
    """

    base: FlatSurface
    marking_log: Tuple[Move, ...] = ()
    surface: FlatSurface = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "marking_log", tuple(self.marking_log))
        object.__setattr__(self, "surface", replay(self.base, self.marking_log))

    def then(self, *moves: Move) -> "MarkedPoint":
        return MarkedPoint(self.base, self.marking_log + tuple(moves))

    def stretch(self, K) -> "MarkedPoint":
        return self.then(Stretch(K))

    def rotate(self, theta) -> "MarkedPoint":
        return self.then(Rotate(theta))

    def twist(self, cylinder: str, n: int) -> "MarkedPoint":
        return self.then(Twist(cylinder, n))

    def plumb(self, cylinder: str, dh, twist_fraction) -> "MarkedPoint":
        return self.then(Plumb(cylinder, dh, twist_fraction))

    def normalize(self) -> "MarkedPoint":
        return self.then(Normalize())

    @property
    def twists(self) -> Tuple[Twist, ...]:
        return tuple(m for m in self.marking_log if isinstance(m, Twist))
